#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "gram.hpp"
#include "kernels.hpp"
#include "lapack.hpp"
#include "samples.hpp"

namespace kgedmd {

using cplx = std::complex<double>;

enum class Regularization { truncation, tikhonov };

struct SolveOptions {
    double eps = 1e-8;
    std::size_t n = 6;
    Regularization regularization = Regularization::truncation;
    // tikhonov only: pairs whose regularization fraction exceeds this are dropped
    double dominance_threshold = 1e-3;
};

struct EigenSolution {
    PencilMode mode = PencilMode::general;
    Regularization regularization = Regularization::truncation;
    double eps = 0.0;
    double shift = 0.0;
    Eigen::Index rank = 0;
    std::vector<cplx> eigenvalues;
    Eigen::MatrixXcd u;                // M x n coefficient vectors
    std::shared_ptr<const Mat> basis;  // retained G0 eigenvectors (truncation)
    std::vector<std::string> warnings;

    std::optional<KernelSpec> kernel;
    std::shared_ptr<const SampleSet> samples;

    std::size_t size() const { return eigenvalues.size(); }
    Eigen::Index M() const { return u.rows(); }

    bool is_real(double tol = 1e-10) const {
        for (const auto& l : eigenvalues)
            if (std::abs(l.imag()) > tol * std::max(1.0, std::abs(l))) return false;
        return u.imag().cwiseAbs().maxCoeff() <= tol * std::max(1.0, u.real().cwiseAbs().maxCoeff()) || u.size() == 0;
    }

    Vec real_eigenvalues() const {
        Vec v(static_cast<Eigen::Index>(eigenvalues.size()));
        for (std::size_t i = 0; i < eigenvalues.size(); ++i) v(static_cast<Eigen::Index>(i)) = eigenvalues[i].real();
        return v;
    }

    void bind(const KernelSpec& k, std::shared_ptr<const SampleSet> X) {
        if (X && X->size() != M()) throw InputError("EigenSolution::bind: sample count does not match coefficients");
        kernel = k;
        samples = std::move(X);
    }
};

namespace detail {

inline bool eig_less(const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

inline std::vector<std::size_t> smallest(const std::vector<cplx>& vals, std::size_t n) {
    std::vector<std::size_t> idx(vals.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return eig_less(vals[i], vals[j]); });
    idx.resize(std::min(n, idx.size()));
    return idx;
}

inline Eigen::VectorXcd apply_real(const Mat& A, const Eigen::VectorXcd& x) {
    Vec re = A * x.real();
    Vec im = A * x.imag();
    Eigen::VectorXcd y(re.size());
    y.real() = re;
    y.imag() = im;
    return y;
}

// (1/M)|G0 u|^2 = 1, largest-magnitude entry of G0 u positive real.
inline void normalize(EigenSolution& s, const Mat& G0) {
    const double M = static_cast<double>(G0.rows());
    for (Eigen::Index j = 0; j < s.u.cols(); ++j) {
        Eigen::VectorXcd v = apply_real(G0, s.u.col(j));
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        double nv = v.norm();
        if (nv == 0.0) continue;
        cplx phase = std::conj(v(imax)) / std::abs(v(imax));
        s.u.col(j) *= phase * std::sqrt(M) / nv;
        if (std::abs(s.eigenvalues[static_cast<std::size_t>(j)].imag()) == 0.0)
            s.u.col(j) = s.u.col(j).real().cast<cplx>();
    }
}

inline void check_square(const Mat& A, const Mat& G0, std::size_t n) {
    if (A.rows() != A.cols() || G0.rows() != G0.cols() || A.rows() != G0.rows())
        throw InputError("eigensolver: matrices must be square and of equal size");
    if (n > static_cast<std::size_t>(G0.rows())) throw InputError("eigensolver: n exceeds number of samples");
}

struct Truncated {
    Mat Q;  // M x r
    Vec s;  // r
};

inline Truncated truncate_g0(const Mat& G0, double eps) {
    Mat Q = G0;
    Vec s = lapack::syevd(Q);
    const auto M = s.size();
    double smax = s(M - 1);
    if (!(smax > 0.0)) throw NumericalError("G0 has no positive eigenvalues");
    double cut = eps * smax;
    if (eps == 0.0) {
        double tiny = static_cast<double>(M) * std::numeric_limits<double>::epsilon() * smax;
        if (s(0) <= tiny)
            throw NumericalError("G0 is numerically singular at eps = 0; choose eps > 0 (e.g. 1e-8)");
    }
    Eigen::Index first = 0;
    while (first < M && !(s(first) > cut)) ++first;
    Truncated t;
    t.Q = Q.rightCols(M - first);
    t.s = s.tail(M - first);
    return t;
}

}  // namespace detail

// Smallest-real-part eigenpairs of G2 u = lambda G0 u.
inline EigenSolution solve_general(const Mat& G2, const Mat& G0, const SolveOptions& opt = {}) {
    detail::check_square(G2, G0, opt.n);
    if (opt.eps < 0.0) throw InputError("eigensolver: eps must be >= 0");
    EigenSolution sol;
    sol.mode = PencilMode::general;
    sol.regularization = opt.regularization;
    sol.eps = opt.eps;
    const auto M = G0.rows();

    if (opt.regularization == Regularization::truncation) {
        auto t = detail::truncate_g0(G0, opt.eps);
        const auto r = t.s.size();
        sol.rank = r;
        Mat A = t.Q.transpose() * (G2 * t.Q);
        A = A * t.s.cwiseInverse().asDiagonal();
        auto ge = lapack::geev(A);
        auto idx = detail::smallest(ge.values, opt.n);
        sol.u.resize(M, static_cast<Eigen::Index>(idx.size()));
        Eigen::MatrixXcd QS = (t.Q * t.s.cwiseInverse().asDiagonal()).cast<cplx>();
        for (std::size_t j = 0; j < idx.size(); ++j) {
            sol.eigenvalues.push_back(ge.values[idx[j]]);
            sol.u.col(static_cast<Eigen::Index>(j)) = QS * ge.vectors.col(static_cast<Eigen::Index>(idx[j]));
        }
        sol.basis = std::make_shared<const Mat>(std::move(t.Q));
    } else {
        sol.shift = opt.eps * G0.trace() / static_cast<double>(M);
        Mat R = G0;
        R.diagonal().array() += sol.shift;
        Eigen::LLT<Mat> llt(R);
        if (llt.info() != Eigen::Success)
            throw NumericalError("G0 + shift is not positive definite; choose eps > 0 (e.g. 1e-8)");
        const auto& L = llt.matrixL();
        Mat C = L.solve(G2);
        C = L.solve(C.transpose()).transpose();
        sol.rank = M;
        auto ge = lapack::geev(C);
        Mat Lm = llt.matrixL();
        std::vector<cplx> vals;
        std::vector<Eigen::VectorXcd> vecs;
        for (std::size_t j = 0; j < ge.values.size(); ++j) {
            Eigen::VectorXcd y = ge.vectors.col(static_cast<Eigen::Index>(j));
            Eigen::VectorXcd u(M);
            u.real() = llt.matrixU().solve(Vec(y.real()));
            u.imag() = llt.matrixU().solve(Vec(y.imag()));
            double rho = sol.shift * u.norm() / detail::apply_real(Lm, y).norm();
            if (rho > opt.dominance_threshold) continue;
            vals.push_back(ge.values[j]);
            vecs.push_back(std::move(u));
        }
        auto idx = detail::smallest(vals, opt.n);
        sol.u.resize(M, static_cast<Eigen::Index>(idx.size()));
        for (std::size_t j = 0; j < idx.size(); ++j) {
            sol.eigenvalues.push_back(vals[idx[j]]);
            sol.u.col(static_cast<Eigen::Index>(j)) = vecs[idx[j]];
        }
    }
    if (sol.eigenvalues.size() < opt.n)
        sol.warnings.push_back("only " + std::to_string(sol.eigenvalues.size()) + " eigenpairs available (requested " +
                               std::to_string(opt.n) + ")");
    detail::normalize(sol, G0);
    return sol;
}

// Smallest eigenpairs of lhs u = lambda G0 G0 u (real, symmetric pencil).
// Truncation keeps the directions with s^2 > eps s_max^2, the spectrum of G0 G0.
inline EigenSolution solve_symmetric(const Mat& lhs, const Mat& G0, const SolveOptions& opt = {}) {
    detail::check_square(lhs, G0, opt.n);
    if (opt.eps < 0.0) throw InputError("eigensolver: eps must be >= 0");
    EigenSolution sol;
    sol.mode = PencilMode::symmetric;
    sol.regularization = opt.regularization;
    sol.eps = opt.eps;
    const auto M = G0.rows();

    if (opt.regularization == Regularization::truncation) {
        auto t = detail::truncate_g0(G0, std::sqrt(opt.eps));
        const auto r = t.s.size();
        sol.rank = r;
        Mat QS = t.Q * t.s.cwiseInverse().asDiagonal();
        Mat A = QS.transpose() * (lhs * QS);
        A = 0.5 * (A + A.transpose());
        auto nn = static_cast<lapack_int>(std::min<Eigen::Index>(static_cast<Eigen::Index>(opt.n), r));
        Mat Z;
        Vec w = nn > 0 ? lapack::syevr_range(A, 1, nn, Z) : Vec();
        for (Eigen::Index j = 0; j < w.size(); ++j) sol.eigenvalues.emplace_back(w(j), 0.0);
        sol.u = (QS * Z).cast<cplx>();
        sol.basis = std::make_shared<const Mat>(std::move(t.Q));
    } else {
        Mat R = G0 * G0;
        sol.shift = opt.eps * R.trace() / static_cast<double>(M);
        R.diagonal().array() += sol.shift;
        Mat A = lhs;
        Mat B = R;
        Vec w;
        try {
            w = lapack::sygvd(A, B);
        } catch (const NumericalError&) {
            throw NumericalError("G0 G0 + shift is not positive definite; choose eps > 0 (e.g. 1e-8)");
        }
        sol.rank = M;
        std::vector<Eigen::Index> keep;
        for (Eigen::Index j = 0; j < w.size() && keep.size() < opt.n; ++j) {
            Vec u = A.col(j);
            double rho = sol.shift * u.norm() / (R * u).norm();
            if (rho <= opt.dominance_threshold) keep.push_back(j);
        }
        sol.u.resize(M, static_cast<Eigen::Index>(keep.size()));
        for (std::size_t j = 0; j < keep.size(); ++j) {
            sol.eigenvalues.emplace_back(w(keep[j]), 0.0);
            sol.u.col(static_cast<Eigen::Index>(j)) = A.col(keep[j]).cast<cplx>();
        }
    }
    if (sol.eigenvalues.size() < opt.n)
        sol.warnings.push_back("only " + std::to_string(sol.eigenvalues.size()) + " eigenpairs available (requested " +
                               std::to_string(opt.n) + ")");
    detail::normalize(sol, G0);
    return sol;
}

inline EigenSolution solve(const GramSystem& sys, const SolveOptions& opt = {}) {
    return sys.mode == PencilMode::general ? solve_general(sys.G2, sys.G0, opt) : solve_symmetric(sys.lhs, sys.G0, opt);
}

// |(LHS - lambda RHS) u| / |RHS u| on the pencil that was solved.
inline double rayleigh_residual(const EigenSolution& sol, std::size_t index, const GramSystem& sys) {
    if (index >= sol.size()) throw InputError("rayleigh_residual: index out of range");
    const Eigen::VectorXcd u = sol.u.col(static_cast<Eigen::Index>(index));
    const cplx lam = sol.eigenvalues[index];
    Eigen::VectorXcd Lu = detail::apply_real(sys.left(), u);
    Eigen::VectorXcd Ru = detail::apply_real(sys.G0, u);
    if (sys.mode == PencilMode::symmetric) Ru = detail::apply_real(sys.G0, Ru);
    if (sol.regularization == Regularization::tikhonov) Ru += sol.shift * u;
    Eigen::VectorXcd res = Lu - lam * Ru;
    if (sol.basis) {
        Eigen::MatrixXcd Qt = sol.basis->transpose().cast<cplx>();
        return (Qt * res).norm() / (Qt * Ru).norm();
    }
    return res.norm() / Ru.norm();
}

// phi(y) = sum_m u_m k(x_m, y) at the columns of Y; returns N x n.
inline Eigen::MatrixXcd eval_eigenfunctions(const EigenSolution& sol, const Mat& Y) {
    if (!sol.kernel || !sol.samples) throw InputError("eval_eigenfunction: solution is not bound to kernel and samples");
    const auto& X = *sol.samples;
    if (Y.rows() != X.dim()) throw InputError("eval_eigenfunction: dimension mismatch");
    Mat K(Y.cols(), X.size());
    std::visit(
        [&](const auto& k) {
            for (Eigen::Index i = 0; i < Y.cols(); ++i)
                for (Eigen::Index m = 0; m < X.size(); ++m) K(i, m) = k.eval(X.point(m), Y.col(i).data());
        },
        *sol.kernel);
    Eigen::MatrixXcd out(Y.cols(), sol.u.cols());
    out.real() = K * sol.u.real();
    out.imag() = K * sol.u.imag();
    return out;
}

inline cplx eval_eigenfunction(const EigenSolution& sol, std::size_t index, const Vec& y) {
    if (index >= sol.size()) throw InputError("eval_eigenfunction: index out of range");
    Eigen::MatrixXcd v = eval_eigenfunctions(sol, Mat(y));
    return v(0, static_cast<Eigen::Index>(index));
}

// Eigenfunction values at the training samples, G0 u.
inline Eigen::MatrixXcd sample_values(const EigenSolution& sol, const Mat& G0) {
    Eigen::MatrixXcd out(G0.rows(), sol.u.cols());
    out.real() = G0 * sol.u.real();
    out.imag() = G0 * sol.u.imag();
    return out;
}

}  // namespace kgedmd
