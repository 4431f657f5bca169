// netreduce: command-line front end.
//
//   netreduce generate --config run.ini --seed 1 --out net/
//   netreduce reduce   --config run.ini --out red/ [--method all] [--mode optimal]
//   netreduce sweep    --config run.ini --out sweep/ [--method all]
//   netreduce refine   --config run.ini --out refine/
//   netreduce perturb  --config run.ini --seed 1 --out perturb/
//   netreduce rmse     a.csv [b.csv] [--column X_reduced] [--out dir]

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netreduce/config.hpp"
#include "netreduce/netreduce.hpp"

namespace fs = std::filesystem;
using namespace netreduce;
using json = nlohmann::ordered_json;

namespace {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string method;
    std::string mode;
    // rmse
    std::vector<std::string> diagrams;
    std::string column = "X_reduced";
};

void log(const std::string& msg) { std::cerr << "netreduce: " << msg << '\n'; }

std::uint64_t require_seed(const Options& o, const char* what)
{
    if (!o.seed) throw ConfigError({std::string("--seed: required for ") + what});
    return *o.seed;
}

RunConfig effective_config(const Options& o)
{
    RunConfig c;
    if (!o.config_path.empty()) c = load_config(o.config_path);
    std::vector<std::string> problems;
    if (!o.method.empty()) {
        if (o.method != "homogeneous" && o.method != "spectral" && o.method != "gao" && o.method != "all")
            problems.push_back("--method: must be homogeneous, spectral, gao or all");
        c.method = o.method;
    }
    if (!o.mode.empty()) {
        if (o.mode == "restricted")
            c.sweep.mode = SpectralMode::restricted;
        else if (o.mode == "optimal")
            c.sweep.mode = SpectralMode::optimal;
        else
            problems.push_back("--mode: must be restricted or optimal");
    }
    if (!problems.empty()) throw ConfigError(problems);
    return c;
}

std::vector<SweepMethod> methods_of(const std::string& m)
{
    if (m == "homogeneous") return {SweepMethod::homogeneous};
    if (m == "spectral") return {SweepMethod::spectral};
    if (m == "gao") return {SweepMethod::gao};
    return {SweepMethod::homogeneous, SweepMethod::spectral, SweepMethod::gao};
}

struct Loaded {
    WeightedDigraph graph;
    Partition partition;
};

// Raw network (before positify) and its partition.
Loaded load_network(const RunConfig& c, const Options& o)
{
    switch (c.source) {
    case NetworkSource::sbm: {
        Rng rng(require_seed(o, "generated networks"));
        auto g = sbm_generate(c.sbm, rng);
        return {std::move(g.graph), std::move(g.partition)};
    }
    case NetworkSource::het: {
        Rng rng(require_seed(o, "generated networks"));
        auto g = het_generate(c.het, rng);
        if (g.clip_rate() > 0.01)
            log("warning: " + std::to_string(100.0 * g.clip_rate()) + "% of edge probabilities were clipped to 1");
        return {std::move(g.graph), std::move(g.partition)};
    }
    case NetworkSource::edges:
    case NetworkSource::matrix: break;
    }
    WeightedDigraph w =
        c.source == NetworkSource::edges ? io::load_edge_list(c.edges_path) : io::load_dense_graph(c.matrix_path);
    Partition p = c.partition_path.empty() ? Partition::single_group(w.n_nodes()) : io::load_partition(c.partition_path);
    if (p.n_nodes() != w.n_nodes())
        throw ConfigError({"network.partition: partition has " + std::to_string(p.n_nodes()) + " nodes, network has " +
                           std::to_string(w.n_nodes())});
    return {std::move(w), std::move(p)};
}

WeightedDigraph positified(const WeightedDigraph& w, double epsilon)
{
    Index filled = 0;
    WeightedDigraph out = positify(w, epsilon, &filled);
    if (filled > 0) {
        std::ostringstream os;
        os << "positify: filled " << filled << " zero entries with epsilon = " << epsilon;
        log(os.str());
    }
    return out;
}

void write_json(const fs::path& path, const json& j)
{
    io::save(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

json record_json(const PerturbationRecord& r)
{
    return json{{"f", r.f},
                {"method", to_string(r.method)},
                {"mean_rel_rmse", r.mean_rel_rmse},
                {"std_rel_rmse", r.std_rel_rmse},
                {"n_members", r.n_members},
                {"n_failed", r.n_failed}};
}

// ---- subcommands ----------------------------------------------------------

void cmd_generate(const RunConfig& c, const Options& o, const fs::path& out)
{
    if (c.source != NetworkSource::sbm && c.source != NetworkSource::het)
        throw ConfigError({"network.source: generate needs sbm or het"});
    const Loaded net = load_network(c, o);
    io::save(out / "edges.csv", [&](std::ostream& os) { io::write_edge_list(os, net.graph); });
    io::save(out / "partition.csv", [&](std::ostream& os) { io::write_partition(os, net.partition); });
}

void cmd_reduce(const RunConfig& c, const Options& o, const fs::path& out)
{
    const Loaded net = load_network(c, o);
    const WeightedDigraph w = positified(net.graph, c.epsilon);
    for (SweepMethod m : methods_of(c.method)) {
        const fs::path dir = out / to_string(m);
        if (m == SweepMethod::gao) {
            const GaoReduction g = gao_reduce(w);
            json j;
            j["method"] = "gao";
            j["beta_eff"] = g.beta_eff;
            j["out_weights"] = std::vector<double>(g.out_weights.data(), g.out_weights.data() + g.out_weights.size());
            write_json(dir / "summary.json", j);
            continue;
        }
        const Reduction r = compute_reduction(w, net.partition, m, c.sweep.mode);
        for (const auto& warning : r.vectors.warnings) log("warning: " + warning);
        io::write_reduction(dir, r);
    }
}

void cmd_sweep(const RunConfig& c, const Options& o, const fs::path& out)
{
    const Loaded net = load_network(c, o);
    const WeightedDigraph w = positified(net.graph, c.epsilon);
    const FullSweep full = compute_full_sweep(w, c.dynamics, c.sweep);
    json summary = json::array();
    for (SweepMethod m : methods_of(c.method)) {
        SweepConfig cfg = c.sweep;
        cfg.method = m;
        const BifurcationDiagram d = bifurcation_sweep(w, net.partition, c.dynamics, cfg, &full);
        io::save(out / ("diagram_" + std::string(to_string(m)) + ".csv"),
                 [&](std::ostream& os) { io::write_diagram(os, d); });
        const RmseResult r = diagram_rmse(d);
        summary.push_back({{"method", to_string(m)}, {"rmse", r.rmse}, {"used", r.used}, {"excluded", r.excluded}});
    }
    write_json(out / "rmse.json", summary);
}

void cmd_refine(const RunConfig& c, const Options& o, const fs::path& out)
{
    if (c.refine_schedule.empty()) throw ConfigError({"refine.schedule: at least one step is required"});
    const Loaded net = load_network(c, o);
    const auto steps = refine_schedule(net.graph, net.partition, c.refine_schedule);
    json summary = json::array();
    for (std::size_t k = 0; k < steps.size(); ++k) {
        io::save(out / ("partition_step" + std::to_string(k + 1) + ".csv"),
                 [&](std::ostream& os) { io::write_partition(os, steps[k]); });
        summary.push_back({{"step", k + 1},
                           {"v_in", c.refine_schedule[k].first},
                           {"v_out", c.refine_schedule[k].second},
                           {"n_groups", steps[k].n_groups()}});
    }
    write_json(out / "refine.json", summary);
}

void cmd_perturb(const RunConfig& c, const Options& o, const fs::path& out)
{
    const std::uint64_t seed = require_seed(o, "perturbation ensembles");
    const Loaded net = load_network(c, o);
    const WeightedDigraph w = positified(net.graph, c.epsilon);
    const PerturbationReport rep =
        perturbation_experiment(w, net.partition, c.dynamics, c.f_grid, c.ensemble, c.sweep, seed, c.threads);
    json j;
    j["base_rmse"] = rep.base_rmse;
    j["records"] = json::array();
    for (const auto& r : rep.records) j["records"].push_back(record_json(r));
    write_json(out / "perturbation.json", j);
}

std::vector<CurvePoint> curve(const BifurcationDiagram& d, const std::string& column)
{
    if (column == "X_exact") return d.exact_curve();
    if (column == "X_reduced") return d.reduced_curve();
    throw ConfigError({"--column: must be X_exact or X_reduced"});
}

json cmd_rmse(const Options& o)
{
    if (o.diagrams.empty() || o.diagrams.size() > 2) throw ConfigError({"rmse: give one or two diagram files"});
    const BifurcationDiagram a = io::load_diagram(o.diagrams[0]);
    RmseResult r;
    if (o.diagrams.size() == 1) {
        r = diagram_rmse(a);
    } else {
        const BifurcationDiagram b = io::load_diagram(o.diagrams[1]);
        r = diagram_rmse(curve(a, o.column), curve(b, o.column));
    }
    return json{{"rmse", r.rmse}, {"used", r.used}, {"excluded", r.excluded}};
}

json error_record(const std::string& command, const char* kind, const std::string& message,
                  const std::vector<std::string>& problems)
{
    json j{{"status", "failed"}, {"command", command}, {"error", kind}, {"message", message}};
    if (!problems.empty()) j["problems"] = problems;
    return j;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dimension reduction of dynamics on weighted directed networks"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub, bool out_required) {
        sub->add_option("--config", o.config_path, "INI configuration file")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "random seed (required for randomized steps)");
        auto* out = sub->add_option("--out", o.out_dir, "output directory");
        if (out_required) out->required();
    };
    auto add_method = [&](CLI::App* sub) {
        sub->add_option("--method", o.method, "homogeneous | spectral | gao | all");
        sub->add_option("--mode", o.mode, "restricted | optimal");
    };

    auto* generate = app.add_subcommand("generate", "generate a network and its partition");
    add_common(generate, true);
    auto* reduce = app.add_subcommand("reduce", "compute reduction vectors and reduced matrices");
    add_common(reduce, true);
    add_method(reduce);
    auto* sweep = app.add_subcommand("sweep", "exact and reduced bifurcation diagrams");
    add_common(sweep, true);
    add_method(sweep);
    auto* refine = app.add_subcommand("refine", "refine the partition along a schedule");
    add_common(refine, true);
    auto* perturb = app.add_subcommand("perturb", "partition perturbation ensemble");
    add_common(perturb, true);
    add_method(perturb);
    auto* rmse = app.add_subcommand("rmse", "RMSE between diagrams");
    rmse->add_option("diagrams", o.diagrams, "one diagram (exact vs reduced) or two (same column)")->required();
    rmse->add_option("--column", o.column, "column compared between two diagrams");
    rmse->add_option("--out", o.out_dir, "also write rmse.json here");

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();
    const fs::path out = o.out_dir;

    auto fail = [&](const json& record, int code) {
        std::cerr << record.dump() << '\n';
        if (!o.out_dir.empty()) {
            try {
                fs::create_directories(out);
                std::ofstream(out / "_FAILED") << record.dump(2) << '\n';
            } catch (...) {
            }
        }
        return code;
    };

    try {
        if (command == "rmse") {
            const json j = cmd_rmse(o);
            std::cout << j.dump(2) << '\n';
            if (!o.out_dir.empty()) write_json(out / "rmse.json", j);
            return 0;
        }
        const RunConfig c = effective_config(o);
        fs::create_directories(out);
        fs::remove(out / "_FAILED");
        io::save(out / "config.ini", [&](std::ostream& os) {
            write_config(os, c);
            if (o.seed) os << "\n# seed = " << *o.seed << '\n';
        });
        if (command == "generate")
            cmd_generate(c, o, out);
        else if (command == "reduce")
            cmd_reduce(c, o, out);
        else if (command == "sweep")
            cmd_sweep(c, o, out);
        else if (command == "refine")
            cmd_refine(c, o, out);
        else if (command == "perturb")
            cmd_perturb(c, o, out);
        return 0;
    } catch (const ConfigError& e) {
        return fail(error_record(command, e.kind(), "invalid configuration", e.problems()), 2);
    } catch (const Error& e) {
        return fail(error_record(command, e.kind(), e.what(), {}), 1);
    } catch (const std::exception& e) {
        return fail(error_record(command, "internal", e.what(), {}), 1);
    }
}
