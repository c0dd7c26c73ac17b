#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kgedmd/kgedmd.hpp"

namespace fs = std::filesystem;
using namespace kgedmd;

static int cmd_run(const std::string& path, const std::string& out_override) {
    ExperimentConfig cfg = load_config(path);
    if (!out_override.empty()) cfg.output = out_override;
    ExperimentReport rep = run_experiment(cfg);
    write_outputs(rep, cfg.output);
    auto vals = rep.reported();
    std::printf("%s / %s (%s pencil), M = %ld, rank = %ld\n", cfg.system.c_str(), to_string(cfg.mode).c_str(),
                rep.pencil == PencilMode::general ? "general" : "symmetric", static_cast<long>(rep.samples->size()),
                static_cast<long>(rep.rank));
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (vals[i].imag() != 0.0)
            std::printf("  %2zu  %.10g %+.3gi   residual %.2e\n", i, vals[i].real(), vals[i].imag(), rep.residuals[i]);
        else
            std::printf("  %2zu  %.10g   residual %.2e\n", i, vals[i].real(), rep.residuals[i]);
    }
    for (const auto& w : rep.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::printf("outputs written to %s\n", cfg.output.c_str());
    return 0;
}

static std::vector<std::size_t> parse_counts(const std::string& s) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoul(item));
    return out;
}

static int cmd_converge(const std::string& path, const std::string& Ms, std::size_t repeats, const std::string& csv) {
    ExperimentConfig cfg = load_config(path);
    auto rows = convergence_study(cfg, parse_counts(Ms), repeats);
    std::printf("%8s %14s %14s\n", "M", "mean error", "std");
    for (const auto& r : rows) std::printf("%8zu %14.6e %14.6e\n", r.M, r.mean, r.stddev);
    std::printf("inversions: %d\n", count_inversions(rows));
    if (!csv.empty()) {
        std::ofstream f(csv);
        f << "M,mean,std\n";
        for (const auto& r : rows) f << r.M << "," << detail::fmt_double(r.mean) << "," << detail::fmt_double(r.stddev) << "\n";
    }
    return 0;
}

static int cmd_cluster(const std::string& report_path, int k, std::uint64_t seed, int restarts) {
    std::ifstream f(report_path);
    if (!f) throw InputError("cannot open " + report_path);
    nlohmann::json rep = nlohmann::json::parse(f);
    fs::path dir = fs::path(report_path).parent_path();
    const int d = rep.at("dim").get<int>();
    Mat S = read_csv((dir / "sample_eigenfunctions.csv").string());
    const auto nphi = S.cols() - d;
    if (k < 1 || k > nphi) throw InputError("cluster: k must be between 1 and the number of stored eigenfunctions");
    auto res = kmeans(S.middleCols(d, k), k, seed, restarts);
    std::ofstream out(dir / "labels.csv");
    out << "label\n";
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int l : res.labels) {
        out << l << "\n";
        ++counts[static_cast<std::size_t>(l)];
    }
    std::printf("inertia %.6g, cluster sizes:", res.inertia);
    for (int c : counts) std::printf(" %d", c);
    std::printf("\nlabels written to %s\n", (dir / "labels.csv").string().c_str());
    return 0;
}

static int cmd_validate_kernels(std::size_t pairs, std::uint64_t seed) {
    Philox rng(seed);
    struct Case {
        std::string name;
        KernelSpec k;
    };
    std::vector<Case> cases{{"gaussian s=1 d=2", GaussianKernel(1.0, 2)},
                            {"gaussian s=0.5 d=3", GaussianKernel(0.5, 3)},
                            {"polynomial q=2 c=1 d=2", PolynomialKernel(2, 1.0, 2)},
                            {"polynomial q=4 c=1 d=3", PolynomialKernel(4, 1.0, 3)}};
    bool ok = true;
    for (const auto& c : cases) {
        int d = kernel_dim(c.k);
        double worst_g = 0.0, worst_h = 0.0;
        for (std::size_t p = 0; p < pairs; ++p) {
            Vec x(d), y(d);
            for (int i = 0; i < d; ++i) {
                x(i) = -2.0 + 4.0 * rng.uniform();
                y(i) = -2.0 + 4.0 * rng.uniform();
            }
            auto e = fd_validate(c.k, x, y);
            double sg = std::max(grad1(c.k, x, y).cwiseAbs().maxCoeff(), 1e-300);
            double sh = std::max(hess1(c.k, x, y).cwiseAbs().maxCoeff(), 1e-300);
            worst_g = std::max(worst_g, e.grad / sg);
            worst_h = std::max(worst_h, e.hess / sh);
        }
        bool pass = worst_g < 1e-5 && worst_h < 1e-5;
        ok = ok && pass;
        std::printf("%-24s grad rel %.2e  hess rel %.2e  %s\n", c.name.c_str(), worst_g, worst_h, pass ? "ok" : "FAIL");
    }
    return ok ? 0 : 1;
}

int main(int argc, char** argv) {
    CLI::App app{"kernel generator EDMD: eigenpairs of Koopman generators and Schrodinger operators from data"};
    app.require_subcommand(1);

    std::string cfg_path, out_dir;
    auto* run = app.add_subcommand("run", "run an experiment described by a config file");
    run->add_option("config", cfg_path, "config file")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--output", out_dir, "output directory (overrides experiment.output)");

    std::string Ms = "250,500,1000", csv;
    std::size_t repeats = 5;
    auto* conv = app.add_subcommand("converge", "eigenvalue error against the analytic spectrum for several M");
    conv->add_option("config", cfg_path, "config file")->required()->check(CLI::ExistingFile);
    conv->add_option("--M", Ms, "comma-separated sample counts")->capture_default_str();
    conv->add_option("--repeats", repeats, "runs per sample count")->capture_default_str();
    conv->add_option("--csv", csv, "write the table to this file");

    std::string report;
    int k = 4, restarts = 50;
    std::uint64_t seed = 1;
    auto* clu = app.add_subcommand("cluster", "k-means on the dominant eigenfunctions of a finished run");
    clu->add_option("report", report, "report.json of a run")->required()->check(CLI::ExistingFile);
    clu->add_option("-k", k, "number of clusters")->capture_default_str();
    clu->add_option("--seed", seed, "k-means seed")->capture_default_str();
    clu->add_option("--restarts", restarts, "k-means restarts")->capture_default_str();

    std::size_t pairs = 100;
    auto* val = app.add_subcommand("validate-kernels", "compare analytic kernel derivatives to finite differences");
    val->add_option("--pairs", pairs, "random point pairs per kernel")->capture_default_str();
    val->add_option("--seed", seed, "seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(cfg_path, out_dir);
        if (*conv) return cmd_converge(cfg_path, Ms, repeats, csv);
        if (*clu) return cmd_cluster(report, k, seed, restarts);
        if (*val) return cmd_validate_kernels(pairs, seed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
