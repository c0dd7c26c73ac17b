#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "eig.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace kgedmd {

struct KMeansResult {
    std::vector<int> labels;
    Mat centers;  // k x p
    double inertia = 0.0;
};

namespace detail {

inline KMeansResult lloyd(const Mat& Y, int k, Philox& rng, int max_iter) {
    const auto M = Y.rows();
    Mat C(k, Y.cols());
    // k-means++ seeding
    C.row(0) = Y.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(M))));
    Vec d2 = (Y.rowwise() - C.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        double tot = d2.sum();
        Eigen::Index pick = 0;
        if (tot > 0.0) {
            double target = rng.uniform() * tot, acc = 0.0;
            pick = M - 1;
            for (Eigen::Index m = 0; m < M; ++m) {
                acc += d2(m);
                if (acc > target) {
                    pick = m;
                    break;
                }
            }
        } else {
            pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(M)));
        }
        C.row(c) = Y.row(pick);
        d2 = d2.cwiseMin((Y.rowwise() - C.row(c)).rowwise().squaredNorm());
    }
    std::vector<int> lab(static_cast<std::size_t>(M), -1);
    double inertia = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        bool changed = false;
        inertia = 0.0;
        for (Eigen::Index m = 0; m < M; ++m) {
            int best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                double d = (Y.row(m) - C.row(c)).squaredNorm();
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            inertia += bd;
            if (lab[static_cast<std::size_t>(m)] != best) {
                lab[static_cast<std::size_t>(m)] = best;
                changed = true;
            }
        }
        if (!changed) break;
        Mat S = Mat::Zero(k, Y.cols());
        std::vector<int> cnt(static_cast<std::size_t>(k), 0);
        for (Eigen::Index m = 0; m < M; ++m) {
            S.row(lab[static_cast<std::size_t>(m)]) += Y.row(m);
            ++cnt[static_cast<std::size_t>(lab[static_cast<std::size_t>(m)])];
        }
        for (int c = 0; c < k; ++c)
            if (cnt[static_cast<std::size_t>(c)] > 0) C.row(c) = S.row(c) / cnt[static_cast<std::size_t>(c)];
    }
    return {std::move(lab), std::move(C), inertia};
}

}  // namespace detail

// k-means++ with restarts on the rows of Y; best inertia wins.
inline KMeansResult kmeans(const Mat& Y, int k, std::uint64_t seed, int restarts = 50, int max_iter = 300) {
    if (k < 1 || k > Y.rows()) throw InputError("kmeans: need 1 <= k <= number of points");
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        Philox rng(seed, 1000 + static_cast<std::uint64_t>(r));
        auto res = detail::lloyd(Y, k, rng, max_iter);
        if (res.inertia < best.inertia) best = std::move(res);
    }
    // relabel by first appearance so equal partitions give equal labels
    std::map<int, int> remap;
    for (auto& l : best.labels) {
        auto it = remap.try_emplace(l, static_cast<int>(remap.size())).first;
        l = it->second;
    }
    return best;
}

// k-means on the first k eigenfunctions evaluated at the samples.
inline std::vector<int> cluster_metastable(const EigenSolution& sol, const Mat& G0, int k, std::uint64_t seed,
                                           int restarts = 50) {
    if (k > G0.rows()) throw InputError("cluster_metastable: k exceeds number of samples");
    if (static_cast<std::size_t>(k) > sol.size()) throw InputError("cluster_metastable: fewer than k eigenpairs");
    Eigen::MatrixXcd V = sample_values(sol, G0);
    return kmeans(V.real().leftCols(k), k, seed, restarts).labels;
}

// Fraction of points whose label is the majority label within their reference class.
inline double purity(const std::vector<int>& labels, const std::vector<int>& reference) {
    if (labels.size() != reference.size() || labels.empty()) throw InputError("purity: size mismatch");
    std::map<std::pair<int, int>, int> counts;
    std::map<int, int> best;
    for (std::size_t i = 0; i < labels.size(); ++i) ++counts[{labels[i], reference[i]}];
    for (auto& [key, c] : counts) best[key.first] = std::max(best[key.first], c);
    int tot = 0;
    for (auto& [l, c] : best) tot += c;
    return static_cast<double>(tot) / static_cast<double>(labels.size());
}

}  // namespace kgedmd
