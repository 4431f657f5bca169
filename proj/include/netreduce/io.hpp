#pragma once

// CSV and JSON serialization of networks, partitions, diagrams and
// reductions. Node ids are 0-based in every file. Reals are written with 17
// significant digits so a write/read round trip is exact.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "netreduce/error.hpp"
#include "netreduce/experiments.hpp"
#include "netreduce/graph.hpp"
#include "netreduce/reduction.hpp"

namespace netreduce::io {

inline constexpr int kPrecision = 17;

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline std::string where(const std::string& source, long line)
{
    return source + ":" + std::to_string(line) + ": ";
}

inline double parse_real(std::string_view s, const std::string& ctx)
{
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end)
        throw IoError(ctx + "not a real number: '" + std::string(s) + "'");
    return v;
}

inline long long parse_int(std::string_view s, const std::string& ctx)
{
    long long v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || ptr != end)
        throw IoError(ctx + "not an integer: '" + std::string(s) + "'");
    return v;
}

inline bool parse_bool(std::string_view s, const std::string& ctx)
{
    if (s == "1" || s == "true") return true;
    if (s == "0" || s == "false") return false;
    throw IoError(ctx + "not a boolean: '" + std::string(s) + "'");
}

inline void expect_header(std::istream& is, std::string_view expected, const std::string& source)
{
    std::string line;
    if (!std::getline(is, line)) throw IoError(source + ": empty file, expected header '" + std::string(expected) + "'");
    if (trim(line) != expected)
        throw IoError(where(source, 1) + "expected header '" + std::string(expected) + "', got '" +
                      std::string(trim(line)) + "'");
}

inline void set_precision(std::ostream& os) { os << std::setprecision(kPrecision); }

inline std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string() + " for reading");
    return is;
}

inline std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    return os;
}

}  // namespace detail

// ---- edge lists -----------------------------------------------------------

/// One `src,dst,weight` row per nonzero entry; entry (i, j) is the edge j -> i.
inline void write_edge_list(std::ostream& os, const WeightedDigraph& w)
{
    detail::set_precision(os);
    os << "src,dst,weight\n";
    const Matrix& m = w.weights();
    for (Index j = 0; j < m.cols(); ++j)
        for (Index i = 0; i < m.rows(); ++i)
            if (m(i, j) != 0.0) os << j << ',' << i << ',' << m(i, j) << '\n';
}

/// Reads an edge list. With n_nodes = 0 the node count is one more than the
/// largest id seen. Repeated edges are rejected.
inline WeightedDigraph read_edge_list(std::istream& is, Index n_nodes = 0, const std::string& source = "<edges>")
{
    detail::expect_header(is, "src,dst,weight", source);
    struct Edge {
        long long src, dst;
        double w;
    };
    std::vector<Edge> edges;
    std::string line;
    long lineno = 1;
    long long max_id = -1;
    while (std::getline(is, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const std::string ctx = detail::where(source, lineno);
        const auto f = detail::split(line);
        if (f.size() != 3) throw IoError(ctx + "expected 3 fields");
        Edge e{detail::parse_int(f[0], ctx), detail::parse_int(f[1], ctx), detail::parse_real(f[2], ctx)};
        if (e.src < 0 || e.dst < 0) throw IoError(ctx + "negative node id");
        if (!std::isfinite(e.w)) throw IoError(ctx + "non-finite weight");
        max_id = std::max({max_id, e.src, e.dst});
        edges.push_back(e);
    }
    const Index n = n_nodes > 0 ? n_nodes : static_cast<Index>(max_id + 1);
    if (n < 1) throw IoError(source + ": no edges and no node count given");
    if (max_id >= n) throw IoError(source + ": node id " + std::to_string(max_id) + " out of range");
    Matrix m = Matrix::Zero(n, n);
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> seen =
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
    for (const auto& e : edges) {
        if (seen(e.dst, e.src))
            throw IoError(source + ": repeated edge " + std::to_string(e.src) + "->" + std::to_string(e.dst));
        seen(e.dst, e.src) = true;
        m(e.dst, e.src) = e.w;
    }
    return WeightedDigraph(std::move(m));
}

// ---- dense matrices -------------------------------------------------------

inline void write_matrix(std::ostream& os, const Matrix& m)
{
    detail::set_precision(os);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) os << ',';
            os << m(i, j);
        }
        os << '\n';
    }
}

/// Headerless CSV of equal-length rows.
inline Matrix read_matrix(std::istream& is, const std::string& source = "<matrix>")
{
    std::vector<std::vector<double>> rows;
    std::string line;
    long lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const std::string ctx = detail::where(source, lineno);
        std::vector<double> row;
        for (auto f : detail::split(line)) row.push_back(detail::parse_real(f, ctx));
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError(ctx + "row has " + std::to_string(row.size()) + " entries, expected " +
                          std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError(source + ": empty matrix");
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

inline WeightedDigraph read_dense_graph(std::istream& is, const std::string& source = "<matrix>")
{
    Matrix m = read_matrix(is, source);
    if (m.rows() != m.cols()) throw IoError(source + ": adjacency matrix is not square");
    return WeightedDigraph(std::move(m));
}

// ---- partitions -----------------------------------------------------------

inline void write_partition(std::ostream& os, const Partition& p)
{
    os << "node,group\n";
    for (Index i = 0; i < p.n_nodes(); ++i) os << i << ',' << p.group_of(i) << '\n';
}

/// Every node 0..N-1 must appear exactly once. Group labels may be any
/// non-negative integers; they are relabeled 0..n-1 in increasing order.
inline Partition read_partition(std::istream& is, const std::string& source = "<partition>")
{
    detail::expect_header(is, "node,group", source);
    std::map<long long, long long> node_group;
    std::string line;
    long lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const std::string ctx = detail::where(source, lineno);
        const auto f = detail::split(line);
        if (f.size() != 2) throw IoError(ctx + "expected 2 fields");
        const long long node = detail::parse_int(f[0], ctx);
        const long long group = detail::parse_int(f[1], ctx);
        if (node < 0 || group < 0) throw IoError(ctx + "negative id");
        if (!node_group.emplace(node, group).second)
            throw IoError(ctx + "node " + std::to_string(node) + " listed twice");
    }
    if (node_group.empty()) throw IoError(source + ": empty partition");
    const auto n = static_cast<long long>(node_group.size());
    if (node_group.rbegin()->first != n - 1) throw IoError(source + ": node ids must be 0..N-1 without gaps");
    std::map<long long, int> relabel;
    for (const auto& [node, group] : node_group) relabel.emplace(group, 0);
    int next = 0;
    for (auto& [group, label] : relabel) label = next++;
    std::vector<int> assignment;
    assignment.reserve(static_cast<std::size_t>(n));
    for (const auto& [node, group] : node_group) assignment.push_back(relabel[group]);
    return Partition(std::move(assignment));
}

// ---- diagrams -------------------------------------------------------------

inline constexpr std::string_view kDiagramHeader =
    "d,mean_K,X_exact,X_reduced,branch,converged_exact,converged_reduced";

inline void write_diagram(std::ostream& os, const BifurcationDiagram& d)
{
    detail::set_precision(os);
    os << kDiagramHeader << '\n';
    for (const auto& r : d.rows)
        os << r.d << ',' << r.mean_K << ',' << r.X_exact << ',' << r.X_reduced << ',' << to_string(r.branch)
           << ',' << (r.converged_exact ? 1 : 0) << ',' << (r.converged_reduced ? 1 : 0) << '\n';
}

inline BifurcationDiagram read_diagram(std::istream& is, const std::string& source = "<diagram>")
{
    detail::expect_header(is, kDiagramHeader, source);
    BifurcationDiagram d;
    std::string line;
    long lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const std::string ctx = detail::where(source, lineno);
        const auto f = detail::split(line);
        if (f.size() != 7) throw IoError(ctx + "expected 7 fields");
        DiagramRow r;
        r.d = detail::parse_real(f[0], ctx);
        r.mean_K = detail::parse_real(f[1], ctx);
        r.X_exact = detail::parse_real(f[2], ctx);
        r.X_reduced = detail::parse_real(f[3], ctx);
        if (f[4] == "forward")
            r.branch = Branch::forward;
        else if (f[4] == "backward")
            r.branch = Branch::backward;
        else
            throw IoError(ctx + "branch must be forward or backward");
        r.converged_exact = detail::parse_bool(f[5], ctx);
        r.converged_reduced = detail::parse_bool(f[6], ctx);
        d.rows.push_back(r);
    }
    return d;
}

// ---- reductions -----------------------------------------------------------

inline void write_vectors(std::ostream& os, const ReductionVectors& v)
{
    detail::set_precision(os);
    os << "group,node,weight\n";
    for (int nu = 0; nu < v.n_groups(); ++nu) {
        const auto& mem = v.members[static_cast<std::size_t>(nu)];
        const auto& part = v.partials[static_cast<std::size_t>(nu)];
        for (std::size_t i = 0; i < mem.size(); ++i) os << nu << ',' << mem[i] << ',' << part(static_cast<Index>(i)) << '\n';
    }
}

inline nlohmann::ordered_json reduction_summary(const Reduction& r)
{
    nlohmann::ordered_json j;
    j["method"] = to_string(r.vectors.method);
    j["n_nodes"] = r.vectors.n_nodes;
    j["n_groups"] = r.vectors.n_groups();
    j["sizes"] = r.system.sizes;
    j["per_group_error"] = r.vectors.per_group_error;
    j["warnings"] = r.vectors.warnings;
    return j;
}

/// Writes W_reduced.csv, mu.csv, vectors.csv and summary.json into `dir`.
inline void write_reduction(const std::filesystem::path& dir, const Reduction& r)
{
    std::filesystem::create_directories(dir);
    {
        auto os = detail::open_out(dir / "W_reduced.csv");
        write_matrix(os, r.system.w_reduced);
    }
    {
        auto os = detail::open_out(dir / "mu.csv");
        write_matrix(os, r.system.mu);
    }
    {
        auto os = detail::open_out(dir / "vectors.csv");
        write_vectors(os, r.vectors);
    }
    auto os = detail::open_out(dir / "summary.json");
    os << reduction_summary(r).dump(2) << '\n';
}

// ---- path helpers ---------------------------------------------------------

inline WeightedDigraph load_edge_list(const std::filesystem::path& path, Index n_nodes = 0)
{
    auto is = detail::open_in(path);
    return read_edge_list(is, n_nodes, path.string());
}

inline WeightedDigraph load_dense_graph(const std::filesystem::path& path)
{
    auto is = detail::open_in(path);
    return read_dense_graph(is, path.string());
}

inline Partition load_partition(const std::filesystem::path& path)
{
    auto is = detail::open_in(path);
    return read_partition(is, path.string());
}

inline BifurcationDiagram load_diagram(const std::filesystem::path& path)
{
    auto is = detail::open_in(path);
    return read_diagram(is, path.string());
}

template <class Writer>
void save(const std::filesystem::path& path, Writer&& writer)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto os = detail::open_out(path);
    writer(os);
    if (!os) throw IoError("write to " + path.string() + " failed");
}

}  // namespace netreduce::io
