#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "operators.hpp"

namespace kgedmd {

enum class SystemKind { generator, schrodinger };

struct System {
    std::string id;
    int dim = 1;
    SystemKind kind = SystemKind::generator;
    DriftDiffusionSpec drift_diffusion;  // generator kind
    SchrodingerSpec schrodinger;         // schrodinger kind
    // ground state data psi0 = exp(-eta), schrodinger kind
    ScalarField eta;
    VectorField grad_eta;
    MatrixField hess_eta;
    double ground_energy = 0.0;
    double min_norm = 0.0;  // samples closer than this to the origin are rejected
    // analytic eigenvalues of T in ascending order; empty if unknown
    std::function<std::vector<double>(std::size_t)> reference;
    // custom generator overriding drift_diffusion; reversible = false declares a nonzero flow J
    std::optional<GeneratorSpec> generator;
};

namespace systems {

// dX = -alpha X dt + sqrt(2/beta) dB, alpha = 1, beta = 2
inline System ou() {
    System s;
    s.id = "ou";
    s.dim = 1;
    auto& d = s.drift_diffusion;
    d.dim = 1;
    d.inv_beta = 0.5;
    d.potential = [](const Vec& x) { return 0.5 * x(0) * x(0); };
    d.grad_potential = [](const Vec& x) -> Vec { return x; };
    d.hess_potential = [](const Vec&) -> Mat { return Mat::Identity(1, 1); };
    s.reference = [](std::size_t n) {
        std::vector<double> r;
        for (std::size_t l = 0; l < n; ++l) r.push_back(static_cast<double>(l));
        return r;
    };
    return s;
}

// V = (x^2 - 1)^2 + (y^2 - 1)^2, 1/beta = 0.5
inline System quadwell() {
    System s;
    s.id = "quadwell";
    s.dim = 2;
    auto& d = s.drift_diffusion;
    d.dim = 2;
    d.inv_beta = 0.5;
    d.potential = [](const Vec& x) {
        double a = x(0) * x(0) - 1.0, b = x(1) * x(1) - 1.0;
        return a * a + b * b;
    };
    d.grad_potential = [](const Vec& x) -> Vec {
        Vec g(2);
        g << 4.0 * x(0) * (x(0) * x(0) - 1.0), 4.0 * x(1) * (x(1) * x(1) - 1.0);
        return g;
    };
    d.hess_potential = [](const Vec& x) -> Mat {
        Mat h = Mat::Zero(2, 2);
        h(0, 0) = 12.0 * x(0) * x(0) - 4.0;
        h(1, 1) = 12.0 * x(1) * x(1) - 4.0;
        return h;
    };
    return s;
}

// H = -1/2 d^2/dx^2 + x^2/2 (hbar = m = omega = 1), psi0 = exp(-x^2/2), E0 = 1/2
inline System qho() {
    System s;
    s.id = "qho";
    s.dim = 1;
    s.kind = SystemKind::schrodinger;
    auto& h = s.schrodinger;
    h.dim = 1;
    h.W = [](const Vec& x) { return 0.5 * x(0) * x(0); };
    s.eta = [](const Vec& x) { return 0.5 * x(0) * x(0); };
    s.grad_eta = [](const Vec& x) -> Vec { return x; };
    s.hess_eta = [](const Vec&) -> Mat { return Mat::Identity(1, 1); };
    s.ground_energy = 0.5;
    s.reference = [](std::size_t n) {
        std::vector<double> r;
        for (std::size_t l = 0; l < n; ++l) r.push_back(static_cast<double>(l) + 0.5);
        return r;
    };
    return s;
}

// H = -1/2 Laplacian - 1/|x| in 3-d, psi0 = exp(-|x|), E0 = -1/2
inline System hydrogen() {
    System s;
    s.id = "hydrogen";
    s.dim = 3;
    s.kind = SystemKind::schrodinger;
    s.min_norm = 1e-8;
    auto& h = s.schrodinger;
    h.dim = 3;
    h.W = [](const Vec& x) { return -1.0 / x.norm(); };
    s.eta = [](const Vec& x) { return x.norm(); };
    s.grad_eta = [](const Vec& x) -> Vec {
        double r = x.norm();
        if (r < 1e-12) return Vec::Zero(x.size());
        return x / r;
    };
    s.ground_energy = -0.5;
    s.reference = [](std::size_t n) {
        std::vector<double> r;
        for (int level = 1; r.size() < n; ++level)
            for (int k = 0; k < level * level && r.size() < n; ++k) r.push_back(-0.5 / (level * level));
        return r;
    };
    return s;
}

// Drift-diffusion with a KDE potential; the potential is attached by the pipeline once data exist.
inline System swissroll() {
    System s;
    s.id = "swissroll";
    s.dim = 3;
    s.drift_diffusion.dim = 3;
    s.drift_diffusion.inv_beta = 1.0;
    return s;
}

inline System by_name(const std::string& id) {
    if (id == "ou") return ou();
    if (id == "quadwell") return quadwell();
    if (id == "qho") return qho();
    if (id == "hydrogen") return hydrogen();
    if (id == "swissroll") return swissroll();
    if (id == "custom") throw ConfigError("system 'custom' is available through the C++ API only");
    throw ConfigError("unknown system '" + id + "'");
}

}  // namespace systems
}  // namespace kgedmd
