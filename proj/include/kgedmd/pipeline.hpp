#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "cluster.hpp"
#include "config.hpp"
#include "eig.hpp"
#include "errors.hpp"
#include "gram.hpp"
#include "kernels.hpp"
#include "matrix_io.hpp"
#include "operators.hpp"
#include "sampling.hpp"
#include "systems.hpp"

namespace kgedmd {

inline constexpr const char* kVersion = "1.0.0";

struct ExperimentReport {
    ExperimentConfig config;
    std::string version = kVersion;
    PencilMode pencil = PencilMode::general;
    double energy_shift = 0.0;
    std::vector<cplx> eigenvalues;  // eigenvalues of T
    std::vector<double> residuals;
    std::vector<std::vector<std::size_t>> multiplets;
    std::vector<std::string> warnings;
    Eigen::Index rank = 0;
    std::shared_ptr<const SampleSet> samples;
    Mat intrinsic;  // swissroll (t, h)
    Mat grid;
    Eigen::MatrixXcd grid_values;
    Eigen::MatrixXcd sample_values;
    std::vector<int> labels;
    std::vector<std::pair<std::string, double>> timings;
    EigenSolution solution;

    // E0 + lambda for operators obtained from a Schrodinger problem, lambda otherwise
    std::vector<cplx> reported() const {
        std::vector<cplx> r;
        for (const auto& l : eigenvalues) r.push_back(l + energy_shift);
        return r;
    }
};

struct RunOptions {
    bool keep_gram = false;
    GramSystem* gram_out = nullptr;
};

namespace detail {

class Stopwatch {
public:
    double lap() {
        auto now = std::chrono::steady_clock::now();
        double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

inline Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

inline std::vector<std::vector<std::size_t>> group_multiplets(const std::vector<cplx>& vals, double tol = 0.02) {
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (!groups.empty() && std::abs(vals[i] - vals[groups.back().front()]) <= tol) groups.back().push_back(i);
        else groups.push_back({i});
    }
    return groups;
}

inline KernelSpec make_kernel(const ExperimentConfig& c, int d) {
    if (c.kernel == "gaussian") return GaussianKernel(c.bandwidth, d);
    return PolynomialKernel(c.degree, c.offset, d);
}

inline void require_dim(const std::vector<double>& v, int d, const char* key) {
    if (static_cast<int>(v.size()) != d)
        throw ConfigError(std::string("config: '") + key + "' needs " + std::to_string(d) + " components");
}

}  // namespace detail

inline ExperimentReport run_experiment(const ExperimentConfig& cfg, System sys, const RunOptions& opts = {}) {
    ExperimentReport rep;
    rep.config = cfg;
    detail::Stopwatch sw;
    const int d = sys.dim;
    if (cfg.M < 1) throw ConfigError("config: M must be >= 1");
    if (cfg.n < 1) throw ConfigError("config: n must be >= 1");
    if (cfg.n > cfg.M) throw ConfigError("config: n must not exceed M");

    const bool schro = sys.kind == SystemKind::schrodinger;
    if (cfg.mode == Mode::sde_of_schrodinger && !schro)
        throw ConfigError("mode sde-of-schrodinger requires a Schrodinger system (qho, hydrogen)");
    if ((cfg.mode == Mode::general || cfg.mode == Mode::symmetric) && cfg.pencil != PencilChoice::automatic)
        throw ConfigError("solver.pencil applies to the schrodinger and sde-of-schrodinger modes only");

    // generator used for trajectories and generator-type operators
    std::optional<GeneratorSpec> gen;
    std::optional<DriftDiffusionSpec> dd;
    if (!schro) {
        if (sys.generator) {
            gen = *sys.generator;
        } else if (sys.id != "swissroll") {
            dd = sys.drift_diffusion;
            gen = dd->to_generator();
        }
    } else if (cfg.mode == Mode::sde_of_schrodinger || cfg.method == SamplingMethod::trajectory) {
        dd = schrodinger_to_generator(sys.schrodinger, sys.eta, sys.grad_eta, sys.ground_energy, sys.hess_eta);
        gen = dd->to_generator();
    }

    // mode guard before any sampling or assembly
    if (cfg.mode == Mode::symmetric) {
        bool reversible = schro ? !sys.schrodinger.J : (!gen || gen->reversible);
        if (!reversible) throw ConfigError("symmetric mode requires a reversible system (J = 0)");
    }

    // sampling
    auto X = std::make_shared<SampleSet>();
    switch (cfg.method) {
        case SamplingMethod::box:
            detail::require_dim(cfg.lo, d, "sampling.lo");
            detail::require_dim(cfg.hi, d, "sampling.hi");
            *X = sample_box(detail::to_vec(cfg.lo), detail::to_vec(cfg.hi), static_cast<Eigen::Index>(cfg.M), cfg.seed);
            break;
        case SamplingMethod::ball:
            *X = sample_ball(cfg.radius, static_cast<Eigen::Index>(cfg.M), d, cfg.seed, sys.min_norm);
            break;
        case SamplingMethod::grid: {
            detail::require_dim(cfg.lo, d, "sampling.lo");
            detail::require_dim(cfg.hi, d, "sampling.hi");
            auto per = static_cast<Eigen::Index>(std::llround(std::ceil(std::pow(static_cast<double>(cfg.M), 1.0 / d) - 1e-9)));
            *X = SampleSet(tensor_grid(detail::to_vec(cfg.lo), detail::to_vec(cfg.hi), per));
            break;
        }
        case SamplingMethod::trajectory: {
            if (!gen) throw ConfigError("trajectory sampling needs a generator for system '" + sys.id + "'");
            detail::require_dim(cfg.x0, d, "sampling.x0");
            TrajectoryConfig tc;
            tc.dt = cfg.dt;
            tc.burn_in = cfg.burn_in;
            tc.stride = cfg.stride;
            tc.total_steps = cfg.burn_in + cfg.M * cfg.stride;
            tc.x0 = detail::to_vec(cfg.x0);
            tc.seed = cfg.seed;
            *X = euler_maruyama(*gen, tc);
            break;
        }
        case SamplingMethod::swissroll: {
            if (d != 3) throw ConfigError("swissroll sampling produces 3-d points");
            auto sr = swiss_roll(static_cast<Eigen::Index>(cfg.M), cfg.noise, cfg.seed);
            *X = std::move(sr.samples);
            rep.intrinsic = std::move(sr.intrinsic);
            break;
        }
    }
    if (sys.id == "swissroll") {
        KdePotential kde(X->X, cfg.kde_bandwidth, cfg.kde_floor, cfg.kde_dim);
        DriftDiffusionSpec s;
        s.dim = d;
        s.inv_beta = 1.0;
        s.potential = [kde](const Vec& x) { return kde.potential_and_gradient(x).first; };
        s.grad_potential = [kde](const Vec& x) -> Vec { return kde.potential_and_gradient(x).second; };
        dd = s;
        gen = kde.generator(1.0);
    }
    rep.timings.emplace_back("sample", sw.lap());

    // operator coefficients and pencil
    OperatorCoefficients op;
    PencilMode pencil = PencilMode::general;
    switch (cfg.mode) {
        case Mode::general:
            op = schro ? schrodinger_as_T(sys.schrodinger) : generator_as_T(*gen);
            break;
        case Mode::symmetric:
            op = schro ? schrodinger_as_T(sys.schrodinger) : generator_as_T(*gen);
            pencil = PencilMode::symmetric;
            break;
        case Mode::schrodinger:
            if (schro) {
                op = schrodinger_as_T(sys.schrodinger);
            } else {
                if (!dd) throw ConfigError("schrodinger mode needs a potential for system '" + sys.id + "'");
                op = schrodinger_as_T(generator_to_schrodinger(*dd));
            }
            if (cfg.pencil == PencilChoice::symmetric) pencil = PencilMode::symmetric;
            break;
        case Mode::sde_of_schrodinger:
            op = generator_as_T(*gen);
            rep.energy_shift = dd->energy_shift;
            if (cfg.pencil == PencilChoice::symmetric) pencil = PencilMode::symmetric;
            break;
    }
    rep.pencil = pencil;
    X->cache_coefficients(op, pencil == PencilMode::symmetric);
    rep.timings.emplace_back("coefficients", sw.lap());

    KernelSpec kernel = detail::make_kernel(cfg, d);
    GramSystem sys_g = assemble_system(kernel, *X, pencil, cfg.threads);
    rep.timings.emplace_back("assemble", sw.lap());

    SolveOptions so;
    so.eps = cfg.eps;
    so.n = cfg.n;
    so.regularization = cfg.regularization;
    rep.solution = solve(sys_g, so);
    rep.solution.bind(kernel, X);
    rep.timings.emplace_back("solve", sw.lap());

    rep.eigenvalues = rep.solution.eigenvalues;
    rep.rank = rep.solution.rank;
    rep.warnings = rep.solution.warnings;
    for (std::size_t i = 0; i < rep.solution.size(); ++i) rep.residuals.push_back(rayleigh_residual(rep.solution, i, sys_g));
    rep.multiplets = detail::group_multiplets(rep.reported());
    rep.sample_values = sample_values(rep.solution, sys_g.G0);
    if (cfg.grid_points > 0) {
        detail::require_dim(cfg.grid_lo, d, "grid.lo");
        detail::require_dim(cfg.grid_hi, d, "grid.hi");
        rep.grid = tensor_grid(detail::to_vec(cfg.grid_lo), detail::to_vec(cfg.grid_hi),
                               static_cast<Eigen::Index>(cfg.grid_points));
        rep.grid_values = eval_eigenfunctions(rep.solution, rep.grid);
    }
    if (cfg.cluster_k > 0) {
        if (static_cast<std::size_t>(cfg.cluster_k) > rep.solution.size())
            rep.warnings.push_back("clustering skipped: fewer eigenpairs than cluster.k");
        else
            rep.labels = cluster_metastable(rep.solution, sys_g.G0, cfg.cluster_k, cfg.cluster_seed, cfg.cluster_restarts);
    }
    rep.timings.emplace_back("evaluate", sw.lap());
    rep.samples = X;
    if (opts.gram_out) *opts.gram_out = std::move(sys_g);
    return rep;
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {}) {
    return run_experiment(cfg, systems::by_name(cfg.system), opts);
}

namespace detail {

inline nlohmann::json eigen_json(const std::vector<cplx>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& l : v) a.push_back({{"re", l.real()}, {"im", l.imag()}});
    return a;
}

inline std::vector<std::string> coord_names(int d) {
    std::vector<std::string> h;
    for (int i = 0; i < d; ++i) h.push_back("x" + std::to_string(i + 1));
    return h;
}

inline void append_values(Mat& out, std::vector<std::string>& header, const Eigen::MatrixXcd& V, bool with_imag) {
    const auto base = out.cols();
    const auto n = V.cols();
    out.conservativeResize(Eigen::NoChange, base + n * (with_imag ? 2 : 1));
    for (Eigen::Index j = 0; j < n; ++j) {
        out.col(base + j) = V.col(j).real();
        header.push_back("phi" + std::to_string(j));
    }
    if (with_imag)
        for (Eigen::Index j = 0; j < n; ++j) {
            out.col(base + n + j) = V.col(j).imag();
            header.push_back("phi" + std::to_string(j) + "_im");
        }
}

}  // namespace detail

inline nlohmann::json eigenvalues_json(const ExperimentReport& r) {
    nlohmann::json j;
    j["system"] = r.config.system;
    j["mode"] = to_string(r.config.mode);
    j["pencil"] = r.pencil == PencilMode::general ? "general" : "symmetric";
    j["eps"] = r.config.eps;
    j["regularization"] = to_string(r.config.regularization);
    j["rank"] = r.rank;
    j["energy_shift"] = r.energy_shift;
    j["eigenvalues"] = detail::eigen_json(r.eigenvalues);
    j["reported"] = detail::eigen_json(r.reported());
    return j;
}

inline nlohmann::json report_json(const ExperimentReport& r) {
    nlohmann::json j = eigenvalues_json(r);
    j["version"] = r.version;
    j["config"] = config_echo(r.config);
    j["M"] = r.samples ? r.samples->size() : 0;
    j["residuals"] = r.residuals;
    j["multiplets"] = r.multiplets;
    j["warnings"] = r.warnings;
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [k, v] : r.timings) t[k] = v;
    j["timings"] = t;
    j["dim"] = r.samples ? r.samples->dim() : 0;
    j["n"] = r.eigenvalues.size();
    return j;
}

inline void write_outputs(const ExperimentReport& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const int d = r.samples->dim();
    const bool cplx_out = !r.solution.is_real();
    {
        std::ofstream f(dir / "eigenvalues.json");
        f << eigenvalues_json(r).dump(2) << "\n";
    }
    {
        std::ofstream f(dir / "report.json");
        f << report_json(r).dump(2) << "\n";
    }
    {
        std::ofstream f(dir / "config_echo.ini");
        f << config_echo(r.config);
    }
    {
        auto h = detail::coord_names(d);
        Mat S = r.samples->X.transpose();
        if (r.intrinsic.size()) {
            S.conservativeResize(Eigen::NoChange, S.cols() + 2);
            S.rightCols(2) = r.intrinsic.transpose();
            h.push_back("t");
            h.push_back("h");
        }
        write_csv((dir / "samples.csv").string(), S, h);
    }
    {
        auto h = detail::coord_names(d);
        Mat S = r.samples->X.transpose();
        detail::append_values(S, h, r.sample_values, cplx_out);
        write_csv((dir / "sample_eigenfunctions.csv").string(), S, h);
    }
    if (r.grid.size()) {
        auto h = detail::coord_names(d);
        Mat G = r.grid.transpose();
        detail::append_values(G, h, r.grid_values, cplx_out);
        write_csv((dir / "eigenfunctions.csv").string(), G, h);
    }
    if (!r.labels.empty()) {
        std::ofstream f(dir / "labels.csv");
        f << "label\n";
        for (int l : r.labels) f << l << "\n";
    }
}

struct ConvergenceRow {
    std::size_t M = 0;
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> errors;
};

// Mean absolute deviation of the reported eigenvalues from the analytic reference.
inline double reference_error(const ExperimentReport& r, const std::vector<double>& ref) {
    auto rep = r.reported();
    std::size_t n = std::min(rep.size(), ref.size());
    if (n == 0) throw NumericalError("reference_error: no eigenvalues to compare");
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e += std::abs(rep[i].real() - ref[i]);
    return e / static_cast<double>(n);
}

inline std::vector<ConvergenceRow> convergence_study(const ExperimentConfig& cfg, const std::vector<std::size_t>& Ms,
                                                     std::size_t repeats) {
    System sys = systems::by_name(cfg.system);
    if (!sys.reference) throw ConfigError("convergence study: no reference eigenvalues for system '" + cfg.system + "'");
    if (repeats < 1 || Ms.empty()) throw ConfigError("convergence study: need repeats >= 1 and at least one M");
    auto ref = sys.reference(cfg.n);
    std::vector<ConvergenceRow> rows;
    for (std::size_t M : Ms) {
        ConvergenceRow row;
        row.M = M;
        for (std::size_t k = 0; k < repeats; ++k) {
            ExperimentConfig c = cfg;
            c.M = M;
            c.seed = cfg.seed + k;
            c.grid_points = 0;
            c.cluster_k = 0;
            row.errors.push_back(reference_error(run_experiment(c, sys), ref));
        }
        Eigen::Map<const Vec> e(row.errors.data(), static_cast<Eigen::Index>(row.errors.size()));
        row.mean = e.mean();
        row.stddev = row.errors.size() > 1 ? std::sqrt((e.array() - row.mean).square().sum() / (e.size() - 1)) : 0.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

// Number of increases of the mean error along the sweep.
inline int count_inversions(const std::vector<ConvergenceRow>& rows) {
    int inv = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].mean > rows[i - 1].mean) ++inv;
    return inv;
}

}  // namespace kgedmd
