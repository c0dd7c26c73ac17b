#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "errors.hpp"

namespace kgedmd {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// k(x, y) = exp(-|x - y|^2 / (2 s^2))
struct GaussianKernel {
    double bandwidth = 1.0;
    int dim = 1;

    GaussianKernel() = default;
    GaussianKernel(double s, int d) : bandwidth(s), dim(d) {
        if (!(s > 0.0) || d < 1) throw InputError("gaussian kernel: bandwidth must be > 0 and dim >= 1");
    }

    double eval(const double* x, const double* y) const {
        double r2 = 0.0;
        for (int i = 0; i < dim; ++i) {
            double t = x[i] - y[i];
            r2 += t * t;
        }
        return std::exp(-r2 / (2.0 * bandwidth * bandwidth));
    }

    // g = grad_x k(x, y); returns k(x, y)
    double grad1(const double* x, const double* y, double* g) const {
        double k = eval(x, y);
        double s2 = bandwidth * bandwidth;
        for (int i = 0; i < dim; ++i) g[i] = -(x[i] - y[i]) / s2 * k;
        return k;
    }

    // g as above, h = row-major d x d Hessian in x; returns k(x, y)
    double hess1(const double* x, const double* y, double* g, double* h) const {
        double k = grad1(x, y, g);
        double s2 = bandwidth * bandwidth;
        double s4 = s2 * s2;
        for (int i = 0; i < dim; ++i) {
            double di = x[i] - y[i];
            for (int j = i; j < dim; ++j) {
                double v = di * (x[j] - y[j]) / s4;
                if (i == j) v -= 1.0 / s2;
                h[i * dim + j] = h[j * dim + i] = v * k;
            }
        }
        return k;
    }
};

// k(x, y) = (c + x.y)^q
struct PolynomialKernel {
    int degree = 2;
    double offset = 1.0;
    int dim = 1;

    PolynomialKernel() = default;
    PolynomialKernel(int q, double c, int d) : degree(q), offset(c), dim(d) {
        if (q < 1 || !(c >= 0.0) || d < 1)
            throw InputError("polynomial kernel: degree >= 1, offset >= 0 and dim >= 1 required");
    }

    double base(const double* x, const double* y) const {
        double s = offset;
        for (int i = 0; i < dim; ++i) s += x[i] * y[i];
        return s;
    }

    double eval(const double* x, const double* y) const { return ipow(base(x, y), degree); }

    double grad1(const double* x, const double* y, double* g) const {
        double b = base(x, y);
        double f = degree * ipow(b, degree - 1);
        for (int i = 0; i < dim; ++i) g[i] = f * y[i];
        return ipow(b, degree);
    }

    double hess1(const double* x, const double* y, double* g, double* h) const {
        double b = base(x, y);
        double f2 = degree >= 2 ? degree * (degree - 1) * ipow(b, degree - 2) : 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) h[i * dim + j] = h[j * dim + i] = f2 * y[i] * y[j];
        return grad1(x, y, g);
    }

    static double ipow(double b, int e) {
        double r = 1.0;
        for (int i = 0; i < e; ++i) r *= b;
        return r;
    }
};

template <class K>
concept DerivativeKernel = requires(const K& k, const double* x, double* out) {
    { k.dim } -> std::convertible_to<int>;
    { k.eval(x, x) } -> std::convertible_to<double>;
    { k.grad1(x, x, out) } -> std::convertible_to<double>;
    { k.hess1(x, x, out, out) } -> std::convertible_to<double>;
};

static_assert(DerivativeKernel<GaussianKernel>);
static_assert(DerivativeKernel<PolynomialKernel>);

using KernelSpec = std::variant<GaussianKernel, PolynomialKernel>;

inline int kernel_dim(const KernelSpec& k) {
    return std::visit([](const auto& kk) { return kk.dim; }, k);
}

inline std::string kernel_name(const KernelSpec& k) {
    return std::holds_alternative<GaussianKernel>(k) ? "gaussian" : "polynomial";
}

namespace detail {
inline void check_dims(const KernelSpec& k, const Vec& x, const Vec& y) {
    int d = kernel_dim(k);
    if (x.size() != d || y.size() != d) throw InputError("kernel: point dimension does not match kernel dimension");
}
}  // namespace detail

inline double eval(const KernelSpec& k, const Vec& x, const Vec& y) {
    detail::check_dims(k, x, y);
    return std::visit([&](const auto& kk) { return kk.eval(x.data(), y.data()); }, k);
}

inline Vec grad1(const KernelSpec& k, const Vec& x, const Vec& y) {
    detail::check_dims(k, x, y);
    Vec g(x.size());
    std::visit([&](const auto& kk) { kk.grad1(x.data(), y.data(), g.data()); }, k);
    return g;
}

inline Mat hess1(const KernelSpec& k, const Vec& x, const Vec& y) {
    detail::check_dims(k, x, y);
    const auto d = x.size();
    Vec g(d);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> h(d, d);
    std::visit([&](const auto& kk) { kk.hess1(x.data(), y.data(), g.data(), h.data()); }, k);
    return h;
}

struct FdErrors {
    double grad = 0.0;
    double hess = 0.0;
};

// Max-norm deviation of the analytic derivatives from central differences.
inline FdErrors fd_validate(const KernelSpec& k, const Vec& x, const Vec& y, double h = 1e-5) {
    if (!(h > 0.0)) throw InputError("fd_validate: step must be positive");
    detail::check_dims(k, x, y);
    const auto d = x.size();
    Vec g = grad1(k, x, y);
    Mat H = hess1(k, x, y);
    FdErrors err;
    Vec xp = x, xm = x;
    for (Eigen::Index i = 0; i < d; ++i) {
        xp = x;
        xm = x;
        xp(i) += h;
        xm(i) -= h;
        double fd = (eval(k, xp, y) - eval(k, xm, y)) / (2.0 * h);
        err.grad = std::max(err.grad, std::abs(fd - g(i)));
        Vec fdcol = (grad1(k, xp, y) - grad1(k, xm, y)) / (2.0 * h);
        for (Eigen::Index j = 0; j < d; ++j) err.hess = std::max(err.hess, std::abs(fdcol(j) - H(j, i)));
    }
    return err;
}

}  // namespace kgedmd
