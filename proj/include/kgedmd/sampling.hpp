#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "operators.hpp"
#include "rng.hpp"
#include "samples.hpp"

namespace kgedmd {

struct TrajectoryConfig {
    double dt = 1e-3;
    std::size_t total_steps = 0;
    std::size_t burn_in = 0;
    std::size_t stride = 1;
    Vec x0;
    std::uint64_t seed = 0;
};

// X_{n+1} = X_n + b dt + sigma sqrt(dt) xi; keeps every stride-th state after burn-in.
inline SampleSet euler_maruyama(const GeneratorSpec& g, const TrajectoryConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw InputError("euler_maruyama: dt must be positive");
    if (cfg.stride < 1) throw InputError("euler_maruyama: stride must be >= 1");
    if (cfg.burn_in >= cfg.total_steps) throw InputError("euler_maruyama: burn-in must be below total steps");
    if (cfg.x0.size() != g.dim) throw InputError("euler_maruyama: x0 dimension mismatch");
    const std::size_t kept = (cfg.total_steps - cfg.burn_in) / cfg.stride;
    if (kept == 0) throw InputError("euler_maruyama: no samples retained");
    Mat out(g.dim, static_cast<Eigen::Index>(kept));
    Philox rng(cfg.seed, 0);
    Vec x = cfg.x0;
    Vec xi(g.dim);
    const double sdt = std::sqrt(cfg.dt);
    std::size_t col = 0;
    for (std::size_t n = 1; n <= cfg.total_steps && col < kept; ++n) {
        for (int i = 0; i < g.dim; ++i) xi(i) = rng.normal();
        x += g.drift(x) * cfg.dt + g.diffusion(x) * xi * sdt;
        if (!x.allFinite()) throw NumericalError("euler_maruyama: non-finite state at step " + std::to_string(n));
        if (n > cfg.burn_in && (n - cfg.burn_in) % cfg.stride == 0) out.col(static_cast<Eigen::Index>(col++)) = x;
    }
    return SampleSet(std::move(out), SampleSource::trajectory, cfg.seed);
}

// Uniform in the d-ball: normalized Gaussian direction, radius R u^(1/d).
// Points closer than min_norm to the origin are redrawn.
inline SampleSet sample_ball(double radius, Eigen::Index M, int d, std::uint64_t seed, double min_norm = 0.0) {
    if (!(radius > 0.0) || M < 1 || d < 1) throw InputError("sample_ball: radius > 0, M >= 1, d >= 1 required");
    Philox rng(seed, 1);
    Mat X(d, M);
    Vec z(d);
    for (Eigen::Index m = 0; m < M; ++m) {
        for (;;) {
            double nz = 0.0;
            while (nz == 0.0) {
                for (int i = 0; i < d; ++i) z(i) = rng.normal();
                nz = z.norm();
            }
            double r = radius * std::pow(rng.uniform(), 1.0 / d);
            Vec p = z * (r / nz);
            if (p.norm() >= min_norm) {
                X.col(m) = p;
                break;
            }
        }
    }
    return SampleSet(std::move(X), SampleSource::iid, seed);
}

inline SampleSet sample_box(const Vec& lo, const Vec& hi, Eigen::Index M, std::uint64_t seed) {
    if (lo.size() != hi.size() || lo.size() < 1 || M < 1) throw InputError("sample_box: invalid bounds or count");
    if (!(lo.array() < hi.array()).all()) throw InputError("sample_box: lo must be below hi componentwise");
    Philox rng(seed, 2);
    Mat X(lo.size(), M);
    for (Eigen::Index m = 0; m < M; ++m)
        for (Eigen::Index i = 0; i < lo.size(); ++i) X(i, m) = lo(i) + (hi(i) - lo(i)) * rng.uniform();
    return SampleSet(std::move(X), SampleSource::iid, seed);
}

// Evenly spaced tensor grid with n points per axis; axes with lo == hi contribute one point.
inline Mat tensor_grid(const Vec& lo, const Vec& hi, Eigen::Index n) {
    if (lo.size() != hi.size() || lo.size() < 1 || n < 1) throw InputError("tensor_grid: invalid bounds or point count");
    const auto d = lo.size();
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(d));
    Eigen::Index total = 1;
    for (Eigen::Index i = 0; i < d; ++i) {
        counts[static_cast<std::size_t>(i)] = lo(i) == hi(i) ? 1 : n;
        total *= counts[static_cast<std::size_t>(i)];
    }
    Mat G(d, total);
    for (Eigen::Index p = 0; p < total; ++p) {
        Eigen::Index rem = p;
        for (Eigen::Index i = d - 1; i >= 0; --i) {
            Eigen::Index ni = counts[static_cast<std::size_t>(i)];
            Eigen::Index k = rem % ni;
            rem /= ni;
            G(i, p) = ni == 1 ? lo(i) : lo(i) + (hi(i) - lo(i)) * static_cast<double>(k) / static_cast<double>(ni - 1);
        }
    }
    return G;
}

struct SwissRoll {
    SampleSet samples;
    Mat intrinsic;  // 2 x M: (t, h)
};

// (t cos t, h, t sin t) + noise, t ~ U[3pi/2, 9pi/2], h ~ U[0, 21]
inline SwissRoll swiss_roll(Eigen::Index M, double noise, std::uint64_t seed) {
    if (M < 1) throw InputError("swiss_roll: M >= 1 required");
    Philox rng(seed, 3);
    Mat X(3, M), T(2, M);
    const double t0 = 1.5 * std::numbers::pi, t1 = 4.5 * std::numbers::pi;
    for (Eigen::Index m = 0; m < M; ++m) {
        double t = t0 + (t1 - t0) * rng.uniform();
        double h = 21.0 * rng.uniform();
        T(0, m) = t;
        T(1, m) = h;
        X(0, m) = t * std::cos(t);
        X(1, m) = h;
        X(2, m) = t * std::sin(t);
    }
    if (noise > 0.0) {
        Philox nrng(seed, 4);
        for (Eigen::Index m = 0; m < M; ++m)
            for (int i = 0; i < 3; ++i) X(i, m) += noise * nrng.normal();
    }
    return {SampleSet(std::move(X), SampleSource::iid, seed), std::move(T)};
}

// U = -log(rho + delta), rho the normalized Gaussian mixture over the sample points.
struct KdePotential {
    Mat points;
    double bandwidth = 1.0;
    double floor = 1e-12;
    int norm_dim = 0;  // dimension in the normalization constant; 0 = ambient

    KdePotential() = default;
    KdePotential(Mat pts, double s, double delta = 1e-12, int nd = 0)
        : points(std::move(pts)), bandwidth(s), floor(delta), norm_dim(nd) {
        if (!(s > 0.0) || points.cols() < 1 || !(delta >= 0.0)) throw InputError("KdePotential: invalid parameters");
    }

    // log of the normalization 1 / (M (sqrt(2 pi) s)^d)
    double log_norm() const {
        int d = norm_dim > 0 ? norm_dim : static_cast<int>(points.rows());
        return -std::log(static_cast<double>(points.cols())) -
               d * (0.5 * std::log(2.0 * std::numbers::pi) + std::log(bandwidth));
    }

    std::pair<double, Vec> potential_and_gradient(const Vec& x) const {
        if (x.size() != points.rows()) throw InputError("KdePotential: dimension mismatch");
        const auto M = points.cols();
        const double s2 = bandwidth * bandwidth;
        Vec e(M);
        for (Eigen::Index m = 0; m < M; ++m) e(m) = -(x - points.col(m)).squaredNorm() / (2.0 * s2);
        double emax = e.maxCoeff();
        Vec w = (e.array() - emax).exp();
        double sw = w.sum();
        double log_rho = log_norm() + emax + std::log(sw);
        // grad log rho = -(x - weighted mean) / s^2
        Vec gl = -(x - points * w / sw) / s2;
        double rho = std::exp(log_rho);
        double U, frac;
        if (floor == 0.0) {
            U = -log_rho;
            frac = 1.0;
        } else {
            U = -std::log(rho + floor);
            frac = rho / (rho + floor);
        }
        return {U, -frac * gl};
    }

    // b = -grad U, sigma = sqrt(2/beta) I
    GeneratorSpec generator(double inv_beta = 1.0) const {
        GeneratorSpec g;
        g.dim = static_cast<int>(points.rows());
        auto self = *this;
        g.drift = [self](const Vec& x) -> Vec { return -self.potential_and_gradient(x).second; };
        double s = std::sqrt(2.0 * inv_beta);
        int d = g.dim;
        g.diffusion = [s, d](const Vec&) -> Mat { return s * Mat::Identity(d, d); };
        g.reversible = true;
        return g;
    }
};

inline std::pair<double, Vec> kde_potential_and_gradient(const KdePotential& kde, const Vec& x) {
    return kde.potential_and_gradient(x);
}

}  // namespace kgedmd
