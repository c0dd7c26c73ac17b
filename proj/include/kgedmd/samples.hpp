#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "operators.hpp"

namespace kgedmd {

enum class SampleSource { iid, trajectory };

// Points stored column-wise (d x M) so each point is contiguous.
struct SampleSet {
    Mat X;
    SampleSource source = SampleSource::iid;
    std::uint64_t seed = 0;

    // optional per-point coefficient cache
    std::vector<Mat> a;
    Mat c;
    Vec W;
    std::vector<Mat> sigma;

    SampleSet() = default;
    explicit SampleSet(Mat points, SampleSource src = SampleSource::iid, std::uint64_t s = 0)
        : X(std::move(points)), source(src), seed(s) {
        validate();
    }

    Eigen::Index size() const { return X.cols(); }
    int dim() const { return static_cast<int>(X.rows()); }
    const double* point(Eigen::Index m) const { return X.col(m).data(); }

    void validate() const {
        if (X.cols() < 1 || X.rows() < 1) throw InputError("SampleSet: need at least one point of dimension >= 1");
        if (!X.allFinite()) throw InputError("SampleSet: non-finite point");
        const auto M = static_cast<std::size_t>(X.cols());
        if (!a.empty() && a.size() != M) throw InputError("SampleSet: coefficient cache size mismatch (a)");
        if (c.size() && (c.rows() != X.rows() || c.cols() != X.cols()))
            throw InputError("SampleSet: coefficient cache size mismatch (c)");
        if (W.size() && W.size() != X.cols()) throw InputError("SampleSet: coefficient cache size mismatch (W)");
        if (!sigma.empty() && sigma.size() != M) throw InputError("SampleSet: coefficient cache size mismatch (sigma)");
    }

    // Evaluates a, c, W (and sigma when available) at every point.
    void cache_coefficients(const OperatorCoefficients& op, bool need_sigma = false) {
        if (op.dim != dim()) throw InputError("SampleSet: operator dimension does not match samples");
        const auto M = size();
        a.assign(static_cast<std::size_t>(M), Mat());
        c.resize(dim(), M);
        W.resize(M);
        sigma.clear();
        if (need_sigma && !op.sigma) throw ConfigError("operator has no diffusion factor sigma for the symmetric pencil");
        for (Eigen::Index m = 0; m < M; ++m) {
            Vec x = X.col(m);
            try {
                Mat am = op.a(x);
                Vec cm = op.c(x);
                double wm = op.W ? op.W(x) : 0.0;
                if (!am.allFinite() || !cm.allFinite() || !std::isfinite(wm))
                    throw EvaluationError("non-finite coefficient", static_cast<std::size_t>(m));
                a[static_cast<std::size_t>(m)] = std::move(am);
                c.col(m) = cm;
                W(m) = wm;
                if (need_sigma) {
                    Mat s = op.sigma(x);
                    if (!s.allFinite()) throw EvaluationError("non-finite diffusion factor", static_cast<std::size_t>(m));
                    sigma.push_back(std::move(s));
                }
            } catch (const EvaluationError& e) {
                throw EvaluationError(std::string(e.what()) + " at sample " + std::to_string(m),
                                      static_cast<std::size_t>(m));
            }
        }
    }
};

}  // namespace kgedmd
