#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "eig.hpp"
#include "errors.hpp"

namespace kgedmd {

enum class Mode { general, symmetric, schrodinger, sde_of_schrodinger };
enum class SamplingMethod { box, ball, trajectory, swissroll, grid };
enum class PencilChoice { automatic, general, symmetric };

struct ExperimentConfig {
    // [experiment]
    std::string system = "qho";
    Mode mode = Mode::general;
    std::size_t n = 6;
    std::string output = "out";
    unsigned threads = 0;

    // [kernel]
    std::string kernel = "gaussian";
    double bandwidth = 1.0;
    int degree = 2;
    double offset = 1.0;

    // [sampling]
    SamplingMethod method = SamplingMethod::box;
    std::size_t M = 100;
    std::uint64_t seed = 1;
    std::vector<double> lo{-5.0};
    std::vector<double> hi{5.0};
    double radius = 20.0;
    double dt = 1e-3;
    std::size_t burn_in = 10000;
    std::size_t stride = 50;
    std::vector<double> x0{0.0};
    double noise = 0.0;

    // [solver]
    double eps = 1e-8;
    Regularization regularization = Regularization::truncation;
    PencilChoice pencil = PencilChoice::automatic;

    // [grid]
    std::vector<double> grid_lo{-3.0};
    std::vector<double> grid_hi{3.0};
    std::size_t grid_points = 0;

    // [kde]
    double kde_bandwidth = 2.0;
    double kde_floor = 1e-12;
    int kde_dim = 0;

    // [cluster]
    int cluster_k = 0;
    int cluster_restarts = 50;
    std::uint64_t cluster_seed = 1;
};

inline std::string to_string(Mode m) {
    switch (m) {
        case Mode::general: return "general";
        case Mode::symmetric: return "symmetric";
        case Mode::schrodinger: return "schrodinger";
        case Mode::sde_of_schrodinger: return "sde-of-schrodinger";
    }
    return "";
}

inline std::string to_string(SamplingMethod m) {
    switch (m) {
        case SamplingMethod::box: return "box";
        case SamplingMethod::ball: return "ball";
        case SamplingMethod::trajectory: return "trajectory";
        case SamplingMethod::swissroll: return "swissroll";
        case SamplingMethod::grid: return "grid";
    }
    return "";
}

inline std::string to_string(PencilChoice p) {
    switch (p) {
        case PencilChoice::automatic: return "auto";
        case PencilChoice::general: return "general";
        case PencilChoice::symmetric: return "symmetric";
    }
    return "";
}

inline std::string to_string(Regularization r) { return r == Regularization::truncation ? "truncation" : "tikhonov"; }

namespace detail {

inline std::string fmt_double(double v) {
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
    return os.str();
}

inline std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_double(v[i]);
    return s;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (item.find_first_not_of(" \t", pos) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("config: cannot parse list value for '" + key + "': " + s);
        }
    }
    if (out.empty()) throw ConfigError("config: empty list for '" + key + "'");
    return out;
}

template <class T>
T parse_value(const std::string& key, const std::string& s) {
    std::istringstream is(s);
    T v{};
    is >> v;
    if (is.fail() || !(is >> std::ws).eof()) throw ConfigError("config: cannot parse value for '" + key + "': " + s);
    return v;
}

inline const std::map<std::string, std::set<std::string>>& allowed_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"experiment", {"system", "mode", "n", "output", "threads"}},
        {"kernel", {"type", "bandwidth", "degree", "offset"}},
        {"sampling",
         {"method", "M", "seed", "lo", "hi", "radius", "dt", "burn_in", "stride", "x0", "noise"}},
        {"solver", {"eps", "regularization", "pencil"}},
        {"grid", {"lo", "hi", "points"}},
        {"kde", {"bandwidth", "floor", "dim"}},
        {"cluster", {"k", "restarts", "seed"}},
    };
    return keys;
}

}  // namespace detail

// Defaults that depend on the chosen system.
inline ExperimentConfig default_config(const std::string& system) {
    ExperimentConfig c;
    c.system = system;
    if (system == "ou") {
        c.mode = Mode::general;
        c.method = SamplingMethod::trajectory;
        c.M = 2000;
        c.x0 = {0.0};
        c.n = 4;
        c.grid_lo = {-3.0};
        c.grid_hi = {3.0};
        c.grid_points = 121;
    } else if (system == "quadwell") {
        c.mode = Mode::symmetric;
        c.method = SamplingMethod::trajectory;
        c.M = 5000;
        c.bandwidth = 0.5;
        c.stride = 200;
        c.x0 = {1.0, 1.0};
        c.n = 6;
        c.lo = {-2.0, -2.0};
        c.hi = {2.0, 2.0};
        c.grid_lo = {-2.0, -2.0};
        c.grid_hi = {2.0, 2.0};
        c.grid_points = 41;
        c.cluster_k = 4;
    } else if (system == "qho") {
        c.mode = Mode::general;
        c.method = SamplingMethod::box;
        c.M = 100;
        c.n = 4;
        c.grid_points = 121;
    } else if (system == "hydrogen") {
        c.mode = Mode::schrodinger;
        c.method = SamplingMethod::ball;
        c.M = 5000;
        c.bandwidth = 2.0;
        c.radius = 20.0;
        c.n = 9;
        c.x0 = {1.0, 0.0, 0.0};
        c.grid_lo = {-20.0, 0.0, 0.0};
        c.grid_hi = {20.0, 0.0, 0.0};
        c.grid_points = 401;
    } else if (system == "swissroll") {
        c.mode = Mode::symmetric;
        c.method = SamplingMethod::swissroll;
        c.M = 2000;
        c.bandwidth = 3.0;
        c.noise = 0.5;
        c.kde_bandwidth = 2.0;
        c.n = 6;
    }
    return c;
}

inline ExperimentConfig parse_config(const boost::property_tree::ptree& pt) {
    using detail::parse_value;
    for (const auto& [section, body] : pt) {
        auto it = detail::allowed_keys().find(section);
        if (it == detail::allowed_keys().end()) {
            if (body.empty()) throw ConfigError("config: key '" + section + "' outside of a section");
            throw ConfigError("config: unknown section [" + section + "]");
        }
        for (const auto& [key, val] : body)
            if (!it->second.count(key)) throw ConfigError("config: unknown key '" + key + "' in [" + section + "]");
    }
    auto get = [&](const std::string& path) { return pt.get_optional<std::string>(path); };

    std::string system = get("experiment.system").value_or("qho");
    ExperimentConfig c = default_config(system);
    if (system != "ou" && system != "quadwell" && system != "qho" && system != "hydrogen" && system != "swissroll")
        throw ConfigError(system == "custom" ? "system 'custom' is available through the C++ API only"
                                             : "config: unknown system '" + system + "'");

    if (auto v = get("experiment.mode")) {
        if (*v == "general") c.mode = Mode::general;
        else if (*v == "symmetric") c.mode = Mode::symmetric;
        else if (*v == "schrodinger") c.mode = Mode::schrodinger;
        else if (*v == "sde-of-schrodinger") c.mode = Mode::sde_of_schrodinger;
        else throw ConfigError("config: unknown mode '" + *v + "'");
    }
    if (auto v = get("experiment.n")) c.n = parse_value<std::size_t>("n", *v);
    if (auto v = get("experiment.output")) c.output = *v;
    if (auto v = get("experiment.threads")) c.threads = parse_value<unsigned>("threads", *v);

    if (auto v = get("kernel.type")) {
        if (*v != "gaussian" && *v != "polynomial") throw ConfigError("config: unknown kernel type '" + *v + "'");
        c.kernel = *v;
    }
    if (auto v = get("kernel.bandwidth")) c.bandwidth = parse_value<double>("bandwidth", *v);
    if (auto v = get("kernel.degree")) c.degree = parse_value<int>("degree", *v);
    if (auto v = get("kernel.offset")) c.offset = parse_value<double>("offset", *v);

    if (auto v = get("sampling.method")) {
        if (*v == "box") c.method = SamplingMethod::box;
        else if (*v == "ball") c.method = SamplingMethod::ball;
        else if (*v == "trajectory") c.method = SamplingMethod::trajectory;
        else if (*v == "swissroll") c.method = SamplingMethod::swissroll;
        else if (*v == "grid") c.method = SamplingMethod::grid;
        else throw ConfigError("config: unknown sampling method '" + *v + "'");
    }
    if (auto v = get("sampling.M")) c.M = parse_value<std::size_t>("M", *v);
    if (auto v = get("sampling.seed")) c.seed = parse_value<std::uint64_t>("seed", *v);
    if (auto v = get("sampling.lo")) c.lo = detail::parse_list("lo", *v);
    if (auto v = get("sampling.hi")) c.hi = detail::parse_list("hi", *v);
    if (auto v = get("sampling.radius")) c.radius = parse_value<double>("radius", *v);
    if (auto v = get("sampling.dt")) c.dt = parse_value<double>("dt", *v);
    if (auto v = get("sampling.burn_in")) c.burn_in = parse_value<std::size_t>("burn_in", *v);
    if (auto v = get("sampling.stride")) c.stride = parse_value<std::size_t>("stride", *v);
    if (auto v = get("sampling.x0")) c.x0 = detail::parse_list("x0", *v);
    if (auto v = get("sampling.noise")) c.noise = parse_value<double>("noise", *v);

    if (auto v = get("solver.eps")) c.eps = parse_value<double>("eps", *v);
    if (auto v = get("solver.regularization")) {
        if (*v == "truncation") c.regularization = Regularization::truncation;
        else if (*v == "tikhonov") c.regularization = Regularization::tikhonov;
        else throw ConfigError("config: unknown regularization '" + *v + "'");
    }
    if (auto v = get("solver.pencil")) {
        if (*v == "auto") c.pencil = PencilChoice::automatic;
        else if (*v == "general") c.pencil = PencilChoice::general;
        else if (*v == "symmetric") c.pencil = PencilChoice::symmetric;
        else throw ConfigError("config: unknown pencil '" + *v + "'");
    }

    if (auto v = get("grid.lo")) c.grid_lo = detail::parse_list("grid.lo", *v);
    if (auto v = get("grid.hi")) c.grid_hi = detail::parse_list("grid.hi", *v);
    if (auto v = get("grid.points")) c.grid_points = parse_value<std::size_t>("grid.points", *v);

    if (auto v = get("kde.bandwidth")) c.kde_bandwidth = parse_value<double>("kde.bandwidth", *v);
    if (auto v = get("kde.floor")) c.kde_floor = parse_value<double>("kde.floor", *v);
    if (auto v = get("kde.dim")) c.kde_dim = parse_value<int>("kde.dim", *v);

    if (auto v = get("cluster.k")) c.cluster_k = parse_value<int>("cluster.k", *v);
    if (auto v = get("cluster.restarts")) c.cluster_restarts = parse_value<int>("cluster.restarts", *v);
    if (auto v = get("cluster.seed")) c.cluster_seed = parse_value<std::uint64_t>("cluster.seed", *v);
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    boost::property_tree::ptree pt;
    try {
        boost::property_tree::ini_parser::read_ini(path, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_config(pt);
}

inline ExperimentConfig config_from_string(const std::string& text) {
    boost::property_tree::ptree pt;
    std::istringstream is(text);
    try {
        boost::property_tree::ini_parser::read_ini(is, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_config(pt);
}

// Full resolved configuration in the input format; re-running it reproduces the run.
inline std::string config_echo(const ExperimentConfig& c) {
    using detail::fmt_double;
    using detail::fmt_list;
    std::ostringstream os;
    os << "[experiment]\n"
       << "system = " << c.system << "\n"
       << "mode = " << to_string(c.mode) << "\n"
       << "n = " << c.n << "\n"
       << "output = " << c.output << "\n"
       << "threads = " << c.threads << "\n\n"
       << "[kernel]\n"
       << "type = " << c.kernel << "\n"
       << "bandwidth = " << fmt_double(c.bandwidth) << "\n"
       << "degree = " << c.degree << "\n"
       << "offset = " << fmt_double(c.offset) << "\n\n"
       << "[sampling]\n"
       << "method = " << to_string(c.method) << "\n"
       << "M = " << c.M << "\n"
       << "seed = " << c.seed << "\n"
       << "lo = " << fmt_list(c.lo) << "\n"
       << "hi = " << fmt_list(c.hi) << "\n"
       << "radius = " << fmt_double(c.radius) << "\n"
       << "dt = " << fmt_double(c.dt) << "\n"
       << "burn_in = " << c.burn_in << "\n"
       << "stride = " << c.stride << "\n"
       << "x0 = " << fmt_list(c.x0) << "\n"
       << "noise = " << fmt_double(c.noise) << "\n\n"
       << "[solver]\n"
       << "eps = " << fmt_double(c.eps) << "\n"
       << "regularization = " << to_string(c.regularization) << "\n"
       << "pencil = " << to_string(c.pencil) << "\n\n"
       << "[grid]\n"
       << "lo = " << fmt_list(c.grid_lo) << "\n"
       << "hi = " << fmt_list(c.grid_hi) << "\n"
       << "points = " << c.grid_points << "\n\n"
       << "[kde]\n"
       << "bandwidth = " << fmt_double(c.kde_bandwidth) << "\n"
       << "floor = " << fmt_double(c.kde_floor) << "\n"
       << "dim = " << c.kde_dim << "\n\n"
       << "[cluster]\n"
       << "k = " << c.cluster_k << "\n"
       << "restarts = " << c.cluster_restarts << "\n"
       << "seed = " << c.cluster_seed << "\n";
    return os.str();
}

}  // namespace kgedmd
