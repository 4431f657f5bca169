#pragma once

// Run configuration read from an INI file with one section per module:
//
//   [network]   source = sbm | het | edges | matrix, edges, matrix, partition, epsilon
//   [sbm]       sizes = 100,100   density = 0.3,0.05;0.1,0.6   weight
//   [het]       sizes, density, half_width, rho_inout, weight
//   [dynamics]  model = neuronal | sis | ecological, tau, mu_loc, gamma, B, C, Kcap, D, E, H
//   [reduction] method = homogeneous | spectral | gao | all, mode = restricted | optimal
//   [sweep]     d_min, d_max, count, low_state
//   [integrate] dt, tol, t_max
//   [refine]    schedule = 4,4;2,2   (v_in,v_out per step)
//   [perturb]   f = 0,0.25,0.5,1   ensemble = 300   threads = 1
//
// Every key is optional; missing keys keep their defaults. Unknown sections
// or keys and unparsable values are collected and reported together.

#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "netreduce/dynamics.hpp"
#include "netreduce/error.hpp"
#include "netreduce/experiments.hpp"
#include "netreduce/graph.hpp"
#include "netreduce/netgen.hpp"

namespace netreduce {

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems)
        : Error(join(problems)), problems_(std::move(problems)) {}
    const std::vector<std::string>& problems() const noexcept { return problems_; }
    const char* kind() const noexcept override { return "config"; }

private:
    static std::string join(const std::vector<std::string>& p)
    {
        std::string s = "invalid configuration:";
        for (const auto& e : p) s += "\n  " + e;
        return s;
    }
    std::vector<std::string> problems_;
};

enum class NetworkSource { sbm, het, edges, matrix };

inline const char* to_string(NetworkSource s)
{
    switch (s) {
    case NetworkSource::sbm: return "sbm";
    case NetworkSource::het: return "het";
    case NetworkSource::edges: return "edges";
    case NetworkSource::matrix: return "matrix";
    }
    return "?";
}

struct RunConfig {
    NetworkSource source = NetworkSource::sbm;
    std::string edges_path;
    std::string matrix_path;
    std::string partition_path;
    double epsilon = kDefaultEpsilon;

    SbmSpec sbm;
    HetSpec het;

    DynamicsSpec dynamics = Neuronal{};
    /// homogeneous, spectral, gao or all.
    std::string method = "spectral";
    SweepConfig sweep;

    std::vector<std::pair<double, double>> refine_schedule;

    std::vector<double> f_grid{0.0, 0.25, 0.5, 1.0};
    int ensemble = 300;
    unsigned threads = 1;

    RunConfig()
    {
        sbm.sizes = {100, 100};
        sbm.density.resize(2, 2);
        sbm.density << 0.3, 0.05, 0.1, 0.6;
        het.sizes = sbm.sizes;
        het.density = sbm.density;
    }
};

namespace detail {

inline std::string trim_copy(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_on(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim_copy(item));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline double to_real(const std::string& s)
{
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
}

inline long long to_integer(const std::string& s)
{
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
}

inline std::vector<double> to_reals(const std::string& s)
{
    std::vector<double> out;
    for (const auto& item : split_on(s, ',')) out.push_back(to_real(item));
    return out;
}

// "a,b;c,d" -> rows separated by ';'
inline Matrix to_matrix(const std::string& s)
{
    std::vector<std::vector<double>> rows;
    for (const auto& row : split_on(s, ';')) rows.push_back(to_reals(row));
    if (rows.empty()) throw std::invalid_argument(s);
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) throw std::invalid_argument(s);
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
    return m;
}

// Looks up keys in a ptree, records every problem, and remembers which keys
// were consumed so unknown ones can be reported.
class Reader {
public:
    explicit Reader(const boost::property_tree::ptree& tree) : tree_(tree) {}

    template <class T, class Parse>
    void get(const std::string& section, const std::string& key, T& target, Parse&& parse)
    {
        const std::string path = section + "." + key;
        consumed_.insert(path);
        const auto node = tree_.get_optional<std::string>(boost::property_tree::ptree::path_type(path, '.'));
        if (!node) return;
        const std::string text = trim_copy(*node);
        try {
            target = parse(text);
        } catch (const std::exception& e) {
            std::string why = e.what();
            if (dynamic_cast<const std::invalid_argument*>(&e) || dynamic_cast<const std::out_of_range*>(&e))
                why = "cannot parse '" + text + "'";
            problems.push_back(path + ": " + why);
        }
    }

    void real(const std::string& s, const std::string& k, double& t) { get(s, k, t, to_real); }

    void unknown_keys()
    {
        static const std::set<std::string> sections{"network", "sbm",       "het",    "dynamics", "reduction",
                                                    "sweep",   "integrate", "refine", "perturb"};
        for (const auto& [sec, sub] : tree_) {
            if (!sections.count(sec)) {
                problems.push_back(sec + ": unknown section");
                continue;
            }
            for (const auto& [key, value] : sub)
                if (!consumed_.count(sec + "." + key)) problems.push_back(sec + "." + key + ": unknown key");
        }
    }

    std::vector<std::string> problems;

private:
    const boost::property_tree::ptree& tree_;
    std::set<std::string> consumed_;
};

inline std::vector<Index> to_sizes(const std::string& s)
{
    std::vector<Index> out;
    for (const auto& item : split_on(s, ',')) out.push_back(static_cast<Index>(to_integer(item)));
    return out;
}

}  // namespace detail

/// Parses an INI document into a RunConfig layered over the defaults.
inline RunConfig parse_config(std::istream& is, const std::string& source = "<config>")
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError({source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")"});
    }

    RunConfig c;
    detail::Reader r(tree);

    r.get("network", "source", c.source, [](const std::string& s) {
        if (s == "sbm") return NetworkSource::sbm;
        if (s == "het") return NetworkSource::het;
        if (s == "edges") return NetworkSource::edges;
        if (s == "matrix") return NetworkSource::matrix;
        throw InvalidArgument("must be sbm, het, edges or matrix");
    });
    auto text = [](const std::string& s) { return s; };
    r.get("network", "edges", c.edges_path, text);
    r.get("network", "matrix", c.matrix_path, text);
    r.get("network", "partition", c.partition_path, text);
    r.real("network", "epsilon", c.epsilon);

    r.get("sbm", "sizes", c.sbm.sizes, detail::to_sizes);
    r.get("sbm", "density", c.sbm.density, detail::to_matrix);
    r.real("sbm", "weight", c.sbm.weight);

    r.get("het", "sizes", c.het.sizes, detail::to_sizes);
    r.get("het", "density", c.het.density, detail::to_matrix);
    r.real("het", "half_width", c.het.half_width);
    r.real("het", "rho_inout", c.het.rho_inout);
    r.real("het", "weight", c.het.weight);

    std::string model = "neuronal";
    r.get("dynamics", "model", model, text);
    Neuronal neuronal;
    Sis sis;
    Ecological eco;
    r.real("dynamics", "tau", neuronal.tau);
    r.real("dynamics", "mu_loc", neuronal.mu_loc);
    r.real("dynamics", "gamma", sis.gamma);
    r.real("dynamics", "B", eco.B);
    r.real("dynamics", "C", eco.C);
    r.real("dynamics", "Kcap", eco.Kcap);
    r.real("dynamics", "D", eco.D);
    r.real("dynamics", "E", eco.E);
    r.real("dynamics", "H", eco.H);
    if (model == "neuronal")
        c.dynamics = neuronal;
    else if (model == "sis")
        c.dynamics = sis;
    else if (model == "ecological")
        c.dynamics = eco;
    else
        r.problems.push_back("dynamics.model: must be neuronal, sis or ecological");

    r.get("reduction", "method", c.method, [](const std::string& s) {
        if (s != "homogeneous" && s != "spectral" && s != "gao" && s != "all")
            throw InvalidArgument("must be homogeneous, spectral, gao or all");
        return s;
    });
    r.get("reduction", "mode", c.sweep.mode, [](const std::string& s) {
        if (s == "restricted") return SpectralMode::restricted;
        if (s == "optimal") return SpectralMode::optimal;
        throw InvalidArgument("must be restricted or optimal");
    });

    r.real("sweep", "d_min", c.sweep.d_min);
    r.real("sweep", "d_max", c.sweep.d_max);
    r.get("sweep", "count", c.sweep.count, [](const std::string& s) { return static_cast<int>(detail::to_integer(s)); });
    r.get("sweep", "low_state", c.sweep.low_state,
          [](const std::string& s) { return std::optional<double>(detail::to_real(s)); });

    r.real("integrate", "dt", c.sweep.integrator.dt);
    r.real("integrate", "tol", c.sweep.integrator.tol);
    r.real("integrate", "t_max", c.sweep.integrator.t_max);

    r.get("refine", "schedule", c.refine_schedule, [](const std::string& s) {
        std::vector<std::pair<double, double>> out;
        for (const auto& step : detail::split_on(s, ';')) {
            const auto v = detail::to_reals(step);
            if (v.size() != 2) throw InvalidArgument("each step needs v_in,v_out");
            out.emplace_back(v[0], v[1]);
        }
        return out;
    });

    r.get("perturb", "f", c.f_grid, detail::to_reals);
    r.get("perturb", "ensemble", c.ensemble, [](const std::string& s) { return static_cast<int>(detail::to_integer(s)); });
    r.get("perturb", "threads", c.threads, [](const std::string& s) {
        const long long v = detail::to_integer(s);
        if (v < 1) throw InvalidArgument("must be >= 1");
        return static_cast<unsigned>(v);
    });

    r.unknown_keys();

    // Semantic checks, each reported against the key it concerns.
    auto check = [&](const std::string& key, auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            r.problems.push_back(key + ": " + e.what());
        }
    };
    if (!(c.epsilon > 0.0)) r.problems.push_back("network.epsilon: must be > 0");
    if (c.source == NetworkSource::edges && c.edges_path.empty())
        r.problems.push_back("network.edges: required when source = edges");
    if (c.source == NetworkSource::matrix && c.matrix_path.empty())
        r.problems.push_back("network.matrix: required when source = matrix");
    if (c.source == NetworkSource::sbm) check("sbm", [&] { validate(c.sbm); });
    if (c.source == NetworkSource::het) check("het", [&] { validate(c.het); });
    check("dynamics", [&] { validate(c.dynamics); });
    check("sweep", [&] { validate(c.sweep); });
    for (const auto& [vi, vo] : c.refine_schedule)
        if (!(vi > 0.0) || !(vo > 0.0)) r.problems.push_back("refine.schedule: thresholds must be > 0");
    for (double f : c.f_grid)
        if (!(f >= 0.0 && f <= 1.0)) r.problems.push_back("perturb.f: values must lie in [0, 1]");
    if (c.ensemble < 1) r.problems.push_back("perturb.ensemble: must be >= 1");

    if (!r.problems.empty()) throw ConfigError(std::move(r.problems));
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError({path.string() + ": cannot open"});
    RunConfig c = parse_config(is, path.string());
    // Relative data paths are taken relative to the config file.
    const auto base = path.parent_path();
    for (std::string* p : {&c.edges_path, &c.matrix_path, &c.partition_path})
        if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).string();
    return c;
}

namespace detail {

inline std::string join_reals(const std::vector<double>& v, const char* sep = ",")
{
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? sep : "") << v[i];
    return os.str();
}

inline std::string format_matrix(const Matrix& m)
{
    std::ostringstream os;
    os.precision(17);
    for (Index i = 0; i < m.rows(); ++i) {
        if (i) os << ';';
        for (Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << m(i, j);
    }
    return os.str();
}

inline std::string format_sizes(const std::vector<Index>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

}  // namespace detail

/// Writes the effective configuration in the same INI format.
inline void write_config(std::ostream& os, const RunConfig& c)
{
    os.precision(17);
    os << "[network]\nsource = " << to_string(c.source) << '\n';
    if (!c.edges_path.empty()) os << "edges = " << c.edges_path << '\n';
    if (!c.matrix_path.empty()) os << "matrix = " << c.matrix_path << '\n';
    if (!c.partition_path.empty()) os << "partition = " << c.partition_path << '\n';
    os << "epsilon = " << c.epsilon << "\n\n";

    os << "[sbm]\nsizes = " << detail::format_sizes(c.sbm.sizes) << "\ndensity = " << detail::format_matrix(c.sbm.density)
       << "\nweight = " << c.sbm.weight << "\n\n";
    os << "[het]\nsizes = " << detail::format_sizes(c.het.sizes) << "\ndensity = " << detail::format_matrix(c.het.density)
       << "\nhalf_width = " << c.het.half_width << "\nrho_inout = " << c.het.rho_inout << "\nweight = " << c.het.weight
       << "\n\n";

    os << "[dynamics]\nmodel = " << dynamics_name(c.dynamics) << '\n';
    if (const auto* n = std::get_if<Neuronal>(&c.dynamics))
        os << "tau = " << n->tau << "\nmu_loc = " << n->mu_loc << '\n';
    else if (const auto* s = std::get_if<Sis>(&c.dynamics))
        os << "gamma = " << s->gamma << '\n';
    else {
        const auto& e = std::get<Ecological>(c.dynamics);
        os << "B = " << e.B << "\nC = " << e.C << "\nKcap = " << e.Kcap << "\nD = " << e.D << "\nE = " << e.E
           << "\nH = " << e.H << '\n';
    }
    os << '\n';

    os << "[reduction]\nmethod = " << c.method
       << "\nmode = " << (c.sweep.mode == SpectralMode::restricted ? "restricted" : "optimal") << "\n\n";
    os << "[sweep]\nd_min = " << c.sweep.d_min << "\nd_max = " << c.sweep.d_max << "\ncount = " << c.sweep.count << '\n';
    if (c.sweep.low_state) os << "low_state = " << *c.sweep.low_state << '\n';
    os << '\n';
    os << "[integrate]\ndt = " << c.sweep.integrator.dt << "\ntol = " << c.sweep.integrator.tol
       << "\nt_max = " << c.sweep.integrator.t_max << "\n\n";

    os << "[refine]\nschedule = ";
    for (std::size_t k = 0; k < c.refine_schedule.size(); ++k)
        os << (k ? ";" : "") << c.refine_schedule[k].first << ',' << c.refine_schedule[k].second;
    os << "\n\n";
    os << "[perturb]\nf = " << detail::join_reals(c.f_grid) << "\nensemble = " << c.ensemble
       << "\nthreads = " << c.threads << '\n';
}

}  // namespace netreduce
