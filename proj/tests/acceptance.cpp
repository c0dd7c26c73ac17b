// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails. Optional arguments select criteria by number.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kgedmd/kgedmd.hpp"
#include "oracles.hpp"

using namespace kgedmd;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string config_path(const char* name) { return std::string(KGEDMD_CONFIG_DIR) + "/" + name; }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string list(const std::vector<cplx>& v, std::size_t n) {
    std::string s = "{";
    for (std::size_t i = 0; i < std::min(n, v.size()); ++i) s += (i ? ", " : "") + fmt("%.4f", v[i].real());
    return s + "}";
}

// QHO: spectrum, ground state shape, runtime.
Outcome qho_spectrum() {
    auto cfg = load_config(config_path("qho.ini"));
    auto t0 = std::chrono::steady_clock::now();
    auto r = run_experiment(cfg);
    double secs = seconds_since(t0);
    auto E = r.reported();
    bool ok = E.size() >= 4;
    double worst = 0.0;
    for (std::size_t l = 0; l < 4 && l < E.size(); ++l)
        worst = std::max(worst, std::abs(E[l].real() - (l + 0.5)) / (l + 0.5));
    ok = ok && worst < 0.05;

    Mat grid = tensor_grid(Vec::Constant(1, -3.0), Vec::Constant(1, 3.0), 121);
    Vec phi = eval_eigenfunctions(r.solution, grid).col(0).real();
    Vec ref = (-0.5 * grid.row(0).array().square()).exp();
    double scale = phi.dot(ref) / ref.dot(ref);
    double dev = ((phi / scale - ref).array().abs() / ref.array()).maxCoeff();
    ok = ok && dev < 0.02 && secs < 1.0;
    return {ok, "E = " + list(E, 4) + ", max rel err " + fmt("%.2e", worst) + ", ground state dev " + fmt("%.2e", dev) +
                    ", runtime " + fmt("%.3f", secs) + " s"};
}

// QHO through its ground-state transform: OU generator from trajectory data.
Outcome ou_duality() {
    auto cfg = load_config(config_path("qho_sde.ini"));
    auto r = run_experiment(cfg);
    bool ok = r.eigenvalues.size() >= 4;
    double worst = 0.0;
    for (std::size_t l = 0; l < 4 && l < r.eigenvalues.size(); ++l)
        worst = std::max(worst, std::abs(r.eigenvalues[l].real() - static_cast<double>(l)));
    bool shift_ok = std::abs(r.energy_shift - 0.5) < 1e-15;
    ok = ok && worst < 0.05 && shift_ok;

    // stationary density has variance 1/2, eigenfunctions He_l(sqrt(2) x)
    const Mat& X = r.samples->X;
    Vec x = X.row(0).transpose();
    double min_corr = 1.0;
    for (int l = 1; l < 4; ++l) {
        Vec he(x.size());
        for (Eigen::Index m = 0; m < x.size(); ++m) he(m) = oracle::hermite_prob(l, std::sqrt(2.0) * x(m));
        Vec f = r.sample_values.col(l).real();
        min_corr = std::min(min_corr, std::abs(oracle::pearson(f, he)));
    }
    Vec f0 = r.sample_values.col(0).real();
    double cv = std::sqrt((f0.array() - f0.mean()).square().mean()) / std::abs(f0.mean());
    ok = ok && min_corr > 0.99 && cv < 0.01;
    return {ok, "lambda = " + list(r.eigenvalues, 4) + ", max err " + fmt("%.3f", worst) + ", E0 " +
                    fmt("%.3f", r.energy_shift) + ", min |corr| with He_l " + fmt("%.5f", min_corr) +
                    ", ground state CV " + fmt("%.2e", cv)};
}

// Quadruple well: dominant eigenvalues, gap, metastable clusters.
Outcome quadwell() {
    auto cfg = load_config(config_path("quadwell.ini"));
    auto t0 = std::chrono::steady_clock::now();
    auto r = run_experiment(cfg);
    double secs = seconds_since(t0);
    const double target[4] = {0.009, 0.400, 1.011, 1.55};
    bool vals_ok = r.eigenvalues.size() >= 5;
    for (std::size_t l = 0; l < 4 && l < r.eigenvalues.size(); ++l)
        vals_ok = vals_ok && std::abs(r.eigenvalues[l].real() - target[l]) <= 0.15;
    double ratio = r.eigenvalues.size() >= 5 ? r.eigenvalues[4].real() / r.eigenvalues[3].real() : 0.0;
    bool gap_ok = ratio > 2.0;

    const Mat& X = r.samples->X;
    std::vector<int> quadrant(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index m = 0; m < X.cols(); ++m) quadrant[static_cast<std::size_t>(m)] = (X(0, m) > 0) + 2 * (X(1, m) > 0);
    double pur = r.labels.empty() ? 0.0 : purity(r.labels, quadrant);
    bool pur_ok = pur >= 0.95;
    std::string d = "lambda = " + list(r.eigenvalues, 5) + " (targets +-0.15: " + (vals_ok ? "ok" : "miss") +
                    "), lambda4/lambda3 " + fmt("%.2f", ratio) + (gap_ok ? " ok" : " miss") + ", purity " +
                    fmt("%.4f", pur) + (pur_ok ? " ok" : " miss") + ", runtime " + fmt("%.1f", secs) + " s";
    return {vals_ok && gap_ok && pur_ok, d};
}

// Hydrogen atom in Schrodinger mode.
Outcome hydrogen() {
    auto cfg = load_config(config_path("hydrogen.ini"));
    auto t0 = std::chrono::steady_clock::now();
    auto r = run_experiment(cfg);
    double secs = seconds_since(t0);
    auto E = r.reported();
    bool ok = E.size() >= 5 && std::abs(E[0].real() + 0.5) <= 0.05;
    int near = 0;
    for (std::size_t i = 1; i < E.size(); ++i)
        if (std::abs(E[i] - cplx(-0.125, 0.0)) <= 0.05) ++near;
    ok = ok && near >= 4;
    return {ok, "E = " + list(E, 9) + ", " + std::to_string(near) + " values within 0.05 of -0.125, runtime " +
                    fmt("%.1f", secs) + " s"};
}

// Polynomial kernel pipeline against explicit monomial gEDMD.
Outcome polynomial_oracle() {
    auto cfg = config_from_string(R"(
[experiment]
system = ou
mode = general
n = 5
[kernel]
type = polynomial
degree = 4
offset = 1
[sampling]
method = box
M = 50
seed = 3
lo = -2
hi = 2
[solver]
eps = 1e-10
[grid]
points = 0
)");
    auto r = run_experiment(cfg);
    const Mat& X = r.samples->X;
    std::vector<double> xs(X.data(), X.data() + X.cols());
    auto sys = systems::ou();
    double ib = sys.drift_diffusion.inv_beta;
    auto ref = oracle::monomial_gedmd_1d(
        xs, 4, [ib](double) { return 2.0 * ib; }, [](double x) { return x; });
    bool ok = r.eigenvalues.size() == ref.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < std::min(ref.size(), r.eigenvalues.size()); ++i)
        worst = std::max(worst, std::abs(r.eigenvalues[i] - cplx(ref[i], 0.0)));
    ok = ok && worst < 1e-8;
    return {ok, "kernel " + list(r.eigenvalues, 5) + " vs monomial, max |diff| " + fmt("%.2e", worst)};
}

// Ground-state transform round trips and annihilation of exp(-F/2).
Outcome transforms() {
    auto ou = systems::ou();
    auto qw = systems::quadwell();
    Mat g1 = tensor_grid(Vec::Constant(1, -3.0), Vec::Constant(1, 3.0), 101);
    Mat g2 = sample_box(Vec::Constant(2, -2.0), Vec::Constant(2, 2.0), 1000, 5).X;
    double rt_ou = roundtrip_check(ou.drift_diffusion, g1);
    double rt_qw = roundtrip_check(qw.drift_diffusion, g2);
    double ann = 0.0;
    for (auto* sys : {&ou, &qw}) {
        const auto& dd = sys->drift_diffusion;
        auto so = drift_diffusion_as_second_order(dd);
        auto h = generator_to_schrodinger(dd);
        const Mat& grid = sys->dim == 1 ? g1 : g2;
        double beta = 1.0 / dd.inv_beta;
        for (Eigen::Index i = 0; i < grid.cols(); ++i) {
            Vec x = grid.col(i);
            ann = std::max(ann, std::abs(ground_state_residual(h, so, x, beta * dd.potential(x))));
        }
    }
    bool ok = rt_ou < 1e-8 && rt_qw < 1e-8 && ann < 1e-8;
    return {ok, "roundtrip ou " + fmt("%.2e", rt_ou) + ", quadwell " + fmt("%.2e", rt_qw) + ", annihilation " +
                    fmt("%.2e", ann)};
}

// Analytic kernel and KDE derivatives against central differences.
Outcome derivatives() {
    Philox rng(2024, 7);
    auto rand_vec = [&](int d, double lo, double hi) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v(i) = lo + (hi - lo) * rng.uniform();
        return v;
    };
    std::vector<std::pair<std::string, KernelSpec>> kernels{{"gaussian", GaussianKernel(1.0, 3)},
                                                            {"polynomial", PolynomialKernel(4, 1.0, 3)}};
    std::string d;
    bool ok = true;
    for (const auto& [name, k] : kernels) {
        double wg = 0.0, wh = 0.0;
        for (int p = 0; p < 100; ++p) {
            Vec x = rand_vec(3, -2, 2), y = rand_vec(3, -2, 2);
            auto e = fd_validate(k, x, y);
            wg = std::max(wg, e.grad / std::max(grad1(k, x, y).cwiseAbs().maxCoeff(), 1e-300));
            wh = std::max(wh, e.hess / std::max(hess1(k, x, y).cwiseAbs().maxCoeff(), 1e-300));
        }
        ok = ok && wg < 1e-5 && wh < 1e-5;
        d += name + " grad " + fmt("%.1e", wg) + " hess " + fmt("%.1e", wh) + ", ";
    }
    auto R = swiss_roll(500, 0.5, 9);
    KdePotential kde(R.samples.X, 2.0, 1e-12, 2);
    double wk = 0.0;
    const double h = 1e-5;
    for (int p = 0; p < 100; ++p) {
        Vec x = R.samples.X.col(static_cast<Eigen::Index>(rng.below(500))) + rand_vec(3, -1, 1);
        Vec g = kde.potential_and_gradient(x).second;
        Vec fd(3);
        for (int i = 0; i < 3; ++i) {
            Vec xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            fd(i) = (kde.potential_and_gradient(xp).first - kde.potential_and_gradient(xm).first) / (2 * h);
        }
        wk = std::max(wk, (fd - g).cwiseAbs().maxCoeff() / std::max(g.cwiseAbs().maxCoeff(), 1e-300));
    }
    ok = ok && wk < 1e-5;
    return {ok, d + "kde grad " + fmt("%.1e", wk)};
}

// Mean eigenvalue error over repeats along increasing M.
Outcome convergence() {
    auto cfg = load_config(config_path("qho_converge.ini"));
    auto rows = convergence_study(cfg, {250, 500, 1000, 2000}, 5);
    int inv = count_inversions(rows);
    std::string d = "mean errors";
    for (const auto& row : rows) d += " M=" + std::to_string(row.M) + ":" + fmt("%.2e", row.mean);
    d += ", inversions " + std::to_string(inv);
    return {inv <= 1, d};
}

// Swiss roll: eigenfunctions resolving the intrinsic coordinates.
Outcome swissroll() {
    auto cfg = load_config(config_path("swissroll.ini"));
    auto r = run_experiment(cfg);
    double best_t = 0.0, best_h = 0.0;
    int it = -1, ih = -1;
    for (Eigen::Index j = 0; j < std::min<Eigen::Index>(6, r.sample_values.cols()); ++j) {
        Vec f = r.sample_values.col(j).real();
        double ct = std::abs(oracle::spearman(f, r.intrinsic.row(0).transpose()));
        double ch = std::abs(oracle::spearman(f, r.intrinsic.row(1).transpose()));
        if (ct > best_t) best_t = ct, it = static_cast<int>(j);
        if (ch > best_h) best_h = ch, ih = static_cast<int>(j);
    }
    bool ok = best_t > 0.9 && best_h > 0.9 && it != ih;
    return {ok, "lambda = " + list(r.eigenvalues, 6) + ", |spearman| t " + fmt("%.3f", best_t) + " (phi_" +
                    std::to_string(it) + "), h " + fmt("%.3f", best_h) + " (phi_" + std::to_string(ih) + ")"};
}

bool bit_equal(const Mat& a, const Mat& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

// Determinism, symmetric-mode sign, Gram properties, parallel assembly.
Outcome invariants() {
    auto cfg = load_config(config_path("qho.ini"));
    bool det = eigenvalues_json(run_experiment(cfg)).dump() == eigenvalues_json(run_experiment(cfg)).dump();

    auto ou = config_from_string(R"(
[experiment]
system = ou
mode = symmetric
n = 6
[sampling]
method = trajectory
M = 400
stride = 200
[grid]
points = 0
)");
    GramSystem g;
    auto r = run_experiment(ou, {.gram_out = &g});
    double lmax = 0.0, lmin = 0.0;
    bool real = r.solution.is_real();
    for (const auto& l : r.eigenvalues) {
        lmax = std::max(lmax, l.real());
        lmin = std::min(lmin, l.real());
    }
    bool sign_ok = real && lmin >= -1e-6 * lmax;

    double asym = (g.G0 - g.G0.transpose()).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Mat> es(g.G0, Eigen::EigenvaluesOnly);
    double emin = es.eigenvalues()(0), emax = es.eigenvalues()(es.eigenvalues().size() - 1);
    bool psd = asym == 0.0 && emin >= -1e-10 * emax;

    auto X = *r.samples;
    KernelSpec k = GaussianKernel(1.0, 1);
    X.cache_coefficients(generator_as_T(systems::ou().drift_diffusion.to_generator()), true);
    auto s1 = assemble_system(k, X, PencilMode::symmetric, 1);
    auto s4 = assemble_system(k, X, PencilMode::symmetric, 4);
    auto q1 = assemble_g2(k, X, 1);
    auto q4 = assemble_g2(k, X, 4);
    bool par = bit_equal(s1.G0, s4.G0) && bit_equal(s1.lhs, s4.lhs) && bit_equal(q1, q4);

    return {det && sign_ok && psd && par,
            std::string("rerun identical ") + (det ? "yes" : "no") + ", symmetric eigenvalues real " +
                (real ? "yes" : "no") + " min " + fmt("%.2e", lmin) + ", G0 asym " + fmt("%.1e", asym) + " min eig " +
                fmt("%.2e", emin) + ", parallel bit-equal " + (par ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"qho spectrum", qho_spectrum},   {"ou duality", ou_duality},
        {"quadruple well", quadwell},      {"hydrogen", hydrogen},
        {"polynomial oracle", polynomial_oracle}, {"transform round trips", transforms},
        {"derivative suite", derivatives}, {"convergence trend", convergence},
        {"swiss roll", swissroll},         {"determinism and invariants", invariants}};
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        Outcome o;
        auto t0 = std::chrono::steady_clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("criterion %2d %-28s %s  [%s] (%.1f s)\n", id, criteria[i].first, o.pass ? "PASS" : "FAIL",
                    o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
