#pragma once

#include <algorithm>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "kernels.hpp"
#include "samples.hpp"

namespace kgedmd {

enum class PencilMode { general, symmetric };

struct GramSystem {
    PencilMode mode = PencilMode::general;
    Mat G0;
    Mat G2;               // general
    std::vector<Mat> G1;  // symmetric, may be released after forming lhs
    Vec W;                // symmetric
    Mat lhs;              // symmetric

    const Mat& left() const { return mode == PencilMode::general ? G2 : lhs; }
};

namespace detail {

inline unsigned worker_count(unsigned requested, Eigen::Index rows) {
    unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<Eigen::Index>(t, std::max<Eigen::Index>(rows, 1)));
}

// Runs body(row) for rows assigned round-robin to workers. Writes must be disjoint per row.
template <class F>
void parallel_rows(Eigen::Index rows, unsigned threads, F&& body) {
    unsigned T = worker_count(threads, rows);
    if (T <= 1) {
        for (Eigen::Index r = 0; r < rows; ++r) body(r);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(T);
    std::vector<std::exception_ptr> errs(T);
    for (unsigned t = 0; t < T; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (Eigen::Index r = t; r < rows; r += T) body(r);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

inline void check_kernel(const KernelSpec& k, const SampleSet& X) {
    if (kernel_dim(k) != X.dim()) throw InputError("kernel dimension does not match sample dimension");
}

}  // namespace detail

// [G0]_mr = k(x_m, x_r); each unordered pair evaluated once and mirrored.
inline Mat assemble_g0(const KernelSpec& kernel, const SampleSet& X, unsigned threads = 0) {
    detail::check_kernel(kernel, X);
    const auto M = X.size();
    Mat G(M, M);
    std::visit(
        [&](const auto& k) {
            detail::parallel_rows(M, threads, [&](Eigen::Index m) {
                for (Eigen::Index r = m; r < M; ++r) {
                    double v = k.eval(X.point(m), X.point(r));
                    G(m, r) = v;
                    G(r, m) = v;
                }
            });
        },
        kernel);
    return G;
}

// [G2]_mr = -1/2 a(x_m):D^2k(x_m,x_r) + c(x_m).grad k(x_m,x_r) + W(x_m) k(x_m,x_r).
// Requires X.cache_coefficients to have been called.
inline Mat assemble_g2(const KernelSpec& kernel, const SampleSet& X, unsigned threads = 0) {
    detail::check_kernel(kernel, X);
    const auto M = X.size();
    const int d = X.dim();
    if (X.a.size() != static_cast<std::size_t>(M) || X.c.cols() != M || X.W.size() != M)
        throw InputError("assemble_g2: coefficient cache missing");
    Mat G(M, M);
    std::visit(
        [&](const auto& k) {
            detail::parallel_rows(M, threads, [&](Eigen::Index m) {
                std::vector<double> g(d), h(d * d);
                const Mat& a = X.a[static_cast<std::size_t>(m)];
                const double* c = X.c.col(m).data();
                const double w = X.W(m);
                for (Eigen::Index r = 0; r < M; ++r) {
                    double kv = k.hess1(X.point(m), X.point(r), g.data(), h.data());
                    double ah = 0.0, cg = 0.0;
                    for (int i = 0; i < d; ++i) {
                        cg += c[i] * g[i];
                        for (int j = 0; j < d; ++j) ah += a(i, j) * h[i * d + j];
                    }
                    G(m, r) = -0.5 * ah + cg + w * kv;
                }
            });
        },
        kernel);
    return G;
}

// [G1^(l)]_mr = sigma_l(x_m)^T grad k(x_m, x_r), one matrix per column l of sigma.
inline std::vector<Mat> assemble_g1(const KernelSpec& kernel, const SampleSet& X, unsigned threads = 0) {
    detail::check_kernel(kernel, X);
    const auto M = X.size();
    const int d = X.dim();
    if (X.sigma.size() != static_cast<std::size_t>(M)) throw InputError("assemble_g1: diffusion factor cache missing");
    const auto p = X.sigma.front().cols();
    std::vector<Mat> G(static_cast<std::size_t>(p), Mat(M, M));
    std::visit(
        [&](const auto& k) {
            detail::parallel_rows(M, threads, [&](Eigen::Index m) {
                std::vector<double> g(d);
                const Mat& s = X.sigma[static_cast<std::size_t>(m)];
                for (Eigen::Index r = 0; r < M; ++r) {
                    k.grad1(X.point(m), X.point(r), g.data());
                    for (Eigen::Index l = 0; l < p; ++l) {
                        double v = 0.0;
                        for (int i = 0; i < d; ++i) v += s(i, l) * g[i];
                        G[static_cast<std::size_t>(l)](m, r) = v;
                    }
                }
            });
        },
        kernel);
    return G;
}

// 1/2 sum_l G1^T G1 + G0 diag(W) G0
inline Mat assemble_symmetric_lhs(const std::vector<Mat>& g1, const Mat& g0, const Vec& W) {
    const auto M = g0.rows();
    if (g0.cols() != M || W.size() != M) throw InputError("assemble_symmetric_lhs: dimension mismatch");
    Mat L = Mat::Zero(M, M);
    for (const auto& G : g1) {
        if (G.rows() != M || G.cols() != M) throw InputError("assemble_symmetric_lhs: dimension mismatch");
        L.selfadjointView<Eigen::Lower>().rankUpdate(G.transpose(), 0.5);
    }
    if ((W.array() != 0.0).any()) {
        Mat GW = g0 * W.asDiagonal();
        L.triangularView<Eigen::Lower>() += GW * g0;
    }
    L.triangularView<Eigen::StrictlyUpper>() = L.transpose();
    return L;
}

inline GramSystem assemble_system(const KernelSpec& kernel, const SampleSet& X, PencilMode mode,
                                  unsigned threads = 0) {
    GramSystem s;
    s.mode = mode;
    s.G0 = assemble_g0(kernel, X, threads);
    if (mode == PencilMode::general) {
        s.G2 = assemble_g2(kernel, X, threads);
    } else {
        s.W = X.W.size() ? X.W : Vec::Zero(X.size());
        {
            auto g1 = assemble_g1(kernel, X, threads);
            s.lhs = assemble_symmetric_lhs(g1, s.G0, s.W);
        }
    }
    return s;
}

}  // namespace kgedmd
