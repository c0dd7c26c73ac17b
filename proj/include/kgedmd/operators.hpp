#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "errors.hpp"

namespace kgedmd {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using ScalarField = std::function<double(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;
using MatrixField = std::function<Mat(const Vec&)>;

inline constexpr double kFdStep = 1e-5;

// dX = b(X) dt + sigma(X) dB
struct GeneratorSpec {
    int dim = 1;
    VectorField drift;
    MatrixField diffusion;
    bool reversible = false;
};

// b = -grad V, sigma = sqrt(2/beta) I
struct DriftDiffusionSpec {
    int dim = 1;
    ScalarField potential;
    VectorField grad_potential;
    MatrixField hess_potential;  // optional
    double inv_beta = 1.0;
    double energy_shift = 0.0;  // E0 when derived from a Schrodinger operator

    GeneratorSpec to_generator() const {
        GeneratorSpec g;
        g.dim = dim;
        auto gv = grad_potential;
        g.drift = [gv](const Vec& x) -> Vec { return -gv(x); };
        double s = std::sqrt(2.0 * inv_beta);
        int d = dim;
        g.diffusion = [s, d](const Vec&) -> Mat { return s * Mat::Identity(d, d); };
        g.reversible = true;
        return g;
    }
};

// T f = -1/2 e^F div(e^-F a grad f) + J.grad f + W f
struct SecondOrderSpec {
    int dim = 1;
    MatrixField a;
    VectorField J;      // optional, zero
    ScalarField W;      // optional, zero
    VectorField gradF;  // optional, zero
    VectorField divA;   // optional, zero; entries sum_j d_j a_ji
    MatrixField hessF;  // optional, finite differences on gradF otherwise
};

// H = -1/2 div(a grad) + J.grad + W, a defaulting to (hbar^2/m) I
struct SchrodingerSpec {
    int dim = 1;
    double hbar = 1.0;
    double mass = 1.0;
    ScalarField W;
    VectorField J;     // optional, zero
    MatrixField a;     // optional
    VectorField divA;  // optional, zero

    Mat diffusion_matrix(const Vec& x) const {
        if (a) return a(x);
        return (hbar * hbar / mass) * Mat::Identity(dim, dim);
    }
};

// Coefficients of T f = -1/2 a:D^2 f + c.grad f + W f at a point.
struct OperatorCoefficients {
    int dim = 1;
    MatrixField a;
    VectorField c;
    ScalarField W;      // optional, zero
    MatrixField sigma;  // optional; a = sigma sigma^T, needed by the symmetric pencil
    bool reversible = false;
};

namespace detail {
inline void require_finite(const Vec& v, const char* what) {
    if (!v.allFinite()) throw EvaluationError(std::string("non-finite ") + what, 0);
}

inline Vec zero_or(const VectorField& f, const Vec& x, int d) { return f ? f(x) : Vec::Zero(d); }

inline Mat fd_jacobian(const VectorField& f, const Vec& x, double h = kFdStep) {
    const auto d = x.size();
    Mat J(d, d);
    Vec xp = x, xm = x;
    for (Eigen::Index i = 0; i < d; ++i) {
        xp = x;
        xm = x;
        xp(i) += h;
        xm(i) -= h;
        J.col(i) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return 0.5 * (J + J.transpose());
}
}  // namespace detail

// c_i = J_i - 1/2 divA_i + 1/2 sum_j a_ji d_j F
inline Vec eval_first_order_coeff(const SecondOrderSpec& s, const Vec& x) {
    Mat a = s.a(x);
    Vec c = detail::zero_or(s.J, x, s.dim) - 0.5 * detail::zero_or(s.divA, x, s.dim) +
            0.5 * a.transpose() * detail::zero_or(s.gradF, x, s.dim);
    detail::require_finite(c, "first-order coefficient");
    return c;
}

inline OperatorCoefficients generator_as_T(const GeneratorSpec& g) {
    OperatorCoefficients t;
    t.dim = g.dim;
    auto sig = g.diffusion;
    auto b = g.drift;
    t.sigma = sig;
    t.a = [sig](const Vec& x) -> Mat {
        Mat s = sig(x);
        return s * s.transpose();
    };
    t.c = [b](const Vec& x) -> Vec { return -b(x); };
    t.reversible = g.reversible;
    return t;
}

inline OperatorCoefficients second_order_as_T(const SecondOrderSpec& s) {
    OperatorCoefficients t;
    t.dim = s.dim;
    t.a = s.a;
    t.c = [s](const Vec& x) { return eval_first_order_coeff(s, x); };
    t.W = s.W;
    t.reversible = !s.J;
    return t;
}

inline OperatorCoefficients schrodinger_as_T(const SchrodingerSpec& h) {
    OperatorCoefficients t;
    t.dim = h.dim;
    t.a = [h](const Vec& x) { return h.diffusion_matrix(x); };
    t.c = [h](const Vec& x) -> Vec {
        return detail::zero_or(h.J, x, h.dim) - 0.5 * detail::zero_or(h.divA, x, h.dim);
    };
    t.W = h.W;
    if (!h.a) {
        double s = h.hbar / std::sqrt(h.mass);
        int d = h.dim;
        t.sigma = [s, d](const Vec&) -> Mat { return s * Mat::Identity(d, d); };
    }
    t.reversible = !h.J;
    return t;
}

// Second-order form of a drift-diffusion generator: a = 2/beta I, F = beta V.
inline SecondOrderSpec drift_diffusion_as_second_order(const DriftDiffusionSpec& s) {
    SecondOrderSpec o;
    o.dim = s.dim;
    double a0 = 2.0 * s.inv_beta;
    double beta = 1.0 / s.inv_beta;
    int d = s.dim;
    o.a = [a0, d](const Vec&) -> Mat { return a0 * Mat::Identity(d, d); };
    auto gv = s.grad_potential;
    o.gradF = [gv, beta](const Vec& x) -> Vec { return beta * gv(x); };
    if (s.hess_potential) {
        auto hv = s.hess_potential;
        o.hessF = [hv, beta](const Vec& x) -> Mat { return beta * hv(x); };
    }
    return o;
}

// W = -1/4 div(a grad F) + 1/8 gradF^T a gradF + 1/2 J.gradF; a and J carried over.
inline SchrodingerSpec generator_to_schrodinger(const SecondOrderSpec& s, bool allow_fd = true) {
    if (!s.gradF) throw ConfigError("generator_to_schrodinger: gradient of the generalized potential is required");
    if (!s.hessF && !allow_fd)
        throw ConfigError("generator_to_schrodinger: no Hessian of F supplied and finite differences disabled");
    SchrodingerSpec h;
    h.dim = s.dim;
    h.a = s.a;
    h.divA = s.divA;
    h.J = s.J;
    h.W = [s](const Vec& x) -> double {
        Vec gF = s.gradF(x);
        Mat a = s.a(x);
        Mat HF = s.hessF ? s.hessF(x) : detail::fd_jacobian(s.gradF, x);
        double div = detail::zero_or(s.divA, x, s.dim).dot(gF) + (a.array() * HF.array()).sum();
        double w = -0.25 * div + 0.125 * gF.dot(a * gF) + 0.5 * detail::zero_or(s.J, x, s.dim).dot(gF);
        if (!std::isfinite(w)) throw EvaluationError("non-finite Schrodinger potential", 0);
        return w;
    };
    return h;
}

inline SchrodingerSpec generator_to_schrodinger(const DriftDiffusionSpec& s, bool allow_fd = true) {
    SchrodingerSpec h = generator_to_schrodinger(drift_diffusion_as_second_order(s), allow_fd);
    // isotropic a = 2/beta I, expressed through hbar^2 / m
    h.a = nullptr;
    h.divA = nullptr;
    h.hbar = std::sqrt(2.0 * s.inv_beta);
    h.mass = 1.0;
    return h;
}

// V = (hbar^2/m) eta, 1/beta = hbar^2/(2m), energies later read as E0 + lambda.
inline DriftDiffusionSpec schrodinger_to_generator(const SchrodingerSpec& h, ScalarField eta, VectorField grad_eta,
                                                   double E0, MatrixField hess_eta = nullptr) {
    if (h.a) throw InputError("schrodinger_to_generator: operator must have the isotropic form -hbar^2/2m Laplacian");
    if (h.J) throw InputError("schrodinger_to_generator: nonzero J is not supported");
    double s = h.hbar * h.hbar / h.mass;
    DriftDiffusionSpec g;
    g.dim = h.dim;
    g.inv_beta = s / 2.0;
    g.energy_shift = E0;
    g.potential = [eta, s](const Vec& x) {
        double v = eta(x);
        if (!std::isfinite(v)) throw DomainError("ground state is not strictly positive (non-finite -log psi0)");
        return s * v;
    };
    g.grad_potential = [grad_eta, s](const Vec& x) -> Vec { return s * grad_eta(x); };
    if (hess_eta) g.hess_potential = [hess_eta, s](const Vec& x) -> Mat { return s * hess_eta(x); };
    return g;
}

// Pointwise H f from f, grad f, Hess f at x.
inline double apply_schrodinger(const SchrodingerSpec& h, const Vec& x, double f, const Vec& gf, const Mat& Hf) {
    Mat a = h.diffusion_matrix(x);
    double second = (a.array() * Hf.array()).sum() + detail::zero_or(h.divA, x, h.dim).dot(gf);
    double w = h.W ? h.W(x) : 0.0;
    return -0.5 * second + detail::zero_or(h.J, x, h.dim).dot(gf) + w * f;
}

// H applied to psi0 = exp(-F/2) using analytic derivatives of psi0.
inline double ground_state_residual(const SchrodingerSpec& h, const SecondOrderSpec& s, const Vec& x, double F) {
    Vec gF = s.gradF(x);
    Mat HF = s.hessF ? s.hessF(x) : detail::fd_jacobian(s.gradF, x);
    double psi = std::exp(-0.5 * F);
    Vec gpsi = -0.5 * gF * psi;
    Mat Hpsi = (0.25 * gF * gF.transpose() - 0.5 * HF) * psi;
    return apply_schrodinger(h, x, psi, gpsi, Hpsi);
}

// Max deviation after generator -> Schrodinger -> generator with eta = F/2, E0 = 0:
// potential up to a constant, and the Schrodinger potential recomputed from the recovered system.
inline double roundtrip_check(const DriftDiffusionSpec& s, const Mat& grid) {
    if (grid.cols() == 0) throw InputError("roundtrip_check: empty grid");
    SchrodingerSpec h = generator_to_schrodinger(s);
    double beta = 1.0 / s.inv_beta;
    auto V = s.potential;
    auto gV = s.grad_potential;
    DriftDiffusionSpec back = schrodinger_to_generator(
        h, [V, beta](const Vec& x) { return 0.5 * beta * V(x); },
        [gV, beta](const Vec& x) -> Vec { return 0.5 * beta * gV(x); }, 0.0);
    SchrodingerSpec h2 = generator_to_schrodinger(back);

    const auto n = grid.cols();
    Vec dv(n);
    double werr = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        Vec x = grid.col(i);
        dv(i) = back.potential(x) - V(x);
        werr = std::max(werr, std::abs(h2.W(x) - h.W(x)));
    }
    double verr = (dv.array() - dv.mean()).abs().maxCoeff();
    return std::max(verr, werr);
}

}  // namespace kgedmd
