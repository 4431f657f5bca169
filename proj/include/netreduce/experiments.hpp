#pragma once

// Evaluation protocols: bifurcation sweeps over a global weight scale d,
// RMSE between exact and reduced diagrams, degree-based partition
// refinement, and random partition perturbation ensembles.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "netreduce/dynamics.hpp"
#include "netreduce/graph.hpp"
#include "netreduce/integrate.hpp"
#include "netreduce/netgen.hpp"
#include "netreduce/reduction.hpp"

namespace netreduce {

enum class Branch { forward, backward };
enum class SweepMethod { homogeneous, spectral, gao };

inline const char* to_string(Branch b) { return b == Branch::forward ? "forward" : "backward"; }

inline const char* to_string(SweepMethod m)
{
    switch (m) {
    case SweepMethod::homogeneous: return "homogeneous";
    case SweepMethod::spectral: return "spectral";
    case SweepMethod::gao: return "gao";
    }
    return "?";
}

struct SweepConfig {
    double d_min = 0.0;
    double d_max = 1.0;
    int count = 30;
    SweepMethod method = SweepMethod::spectral;
    SpectralMode mode = SpectralMode::restricted;
    IntegratorSettings integrator;
    /// Overrides the per-dynamics low initial value of the forward branch.
    std::optional<double> low_state;
};

inline void validate(const SweepConfig& c)
{
    if (!(c.d_min >= 0.0)) throw InvalidArgument("sweep d_min must be >= 0");
    if (!(c.d_max > c.d_min)) throw InvalidArgument("sweep d_max must exceed d_min");
    if (c.count < 2) throw InvalidArgument("sweep count must be >= 2");
    validate(c.integrator);
}

inline std::vector<double> d_grid(const SweepConfig& c)
{
    std::vector<double> out(static_cast<std::size_t>(c.count));
    const double step = (c.d_max - c.d_min) / static_cast<double>(c.count - 1);
    for (int k = 0; k < c.count; ++k) out[static_cast<std::size_t>(k)] = c.d_min + step * k;
    out.back() = c.d_max;
    return out;
}

/// Starting value of every node on the forward branch. Zero is absorbing for
/// SIS, so that model starts from a small infected fraction.
inline double low_initial_value(const DynamicsSpec& spec)
{
    return std::holds_alternative<Sis>(spec) ? 0.01 : 0.0;
}

struct DiagramRow {
    double d = 0.0;
    double mean_K = 0.0;
    double X_exact = 0.0;
    double X_reduced = 0.0;
    Branch branch = Branch::forward;
    bool converged_exact = false;
    bool converged_reduced = false;
};

struct CurvePoint {
    double d;
    Branch branch;
    double value;
    bool converged;
};

struct BifurcationDiagram {
    std::vector<DiagramRow> rows;

    std::vector<CurvePoint> exact_curve() const
    {
        std::vector<CurvePoint> out;
        for (const auto& r : rows) out.push_back({r.d, r.branch, r.X_exact, r.converged_exact});
        return out;
    }
    std::vector<CurvePoint> reduced_curve() const
    {
        std::vector<CurvePoint> out;
        for (const auto& r : rows) out.push_back({r.d, r.branch, r.X_reduced, r.converged_reduced});
        return out;
    }
};

struct AggregateObservables {
    double mean_X;
    double mean_K;
};

/// <X> = (1/N) sum m_nu X_nu and <K> = (1/N) sum m_nu sum_rho Wred_{nu rho}.
inline AggregateObservables aggregate_reduced(const ReducedSystem& r, const Vector& x)
{
    if (x.size() != r.n_groups()) throw InvalidArgument("aggregate: dimension mismatch");
    double sx = 0.0;
    double sk = 0.0;
    double total = 0.0;
    for (int nu = 0; nu < r.n_groups(); ++nu) {
        const double m = static_cast<double>(r.sizes[static_cast<std::size_t>(nu)]);
        sx += m * x(nu);
        sk += m * r.w_reduced.row(nu).sum();
        total += m;
    }
    return {sx / total, sk / total};
}

/// Equilibria of the full system along both branches of the d grid.
struct FullSweep {
    struct Point {
        double d;
        Branch branch;
        Vector state;
        bool converged;
    };
    std::vector<Point> points;
};

namespace detail {

template <class Rhs, class Clip>
std::pair<Vector, bool> settle(Rhs&& rhs, Clip&& clip, Vector x0, const IntegratorSettings& s)
{
    const Index dim = x0.size();
    try {
        EquilibriumResult res = integrate_to_equilibrium(rhs, clip, std::move(x0), s);
        return {std::move(res.state), res.converged};
    } catch (const DivergenceError&) {
        return {Vector::Constant(dim, std::numeric_limits<double>::quiet_NaN()), false};
    }
}

// Runs a forward (ascending d) then backward (descending d) continuation.
// Each equilibrium seeds the next point; forward seeds are floored at the
// low state. `step(k, x0)` solves at grid[k] and returns (equilibrium, converged).
template <class Step>
std::vector<FullSweep::Point> continuation(const std::vector<double>& grid, const Vector& low, Step&& step)
{
    std::vector<FullSweep::Point> out;
    Vector prev = low;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        Vector x0 = prev.allFinite() ? prev.cwiseMax(low) : low;
        auto [x, ok] = step(k, std::move(x0));
        out.push_back({grid[k], Branch::forward, x, ok});
        prev = std::move(x);
    }
    for (std::size_t k = grid.size(); k-- > 0;) {
        Vector x0 = prev.allFinite() ? prev : low;
        auto [x, ok] = step(k, std::move(x0));
        out.push_back({grid[k], Branch::backward, x, ok});
        prev = std::move(x);
    }
    return out;
}

}  // namespace detail

inline FullSweep compute_full_sweep(const WeightedDigraph& w, const DynamicsSpec& spec, const SweepConfig& cfg)
{
    validate(cfg);
    validate(spec);
    const double low_value = cfg.low_state.value_or(low_initial_value(spec));
    const Vector low = Vector::Constant(w.n_nodes(), low_value);
    auto clip = [&](Vector& x) { clip_state(spec, x); };
    const std::vector<double> grid = d_grid(cfg);
    FullSweep fs;
    fs.points = detail::continuation(grid, low, [&](std::size_t k, Vector x0) {
        const WeightedDigraph wd = scale_weights(w, grid[k]);
        return detail::settle([&](const Vector& x) { return full_rhs(spec, wd, x); }, clip,
                              std::move(x0), cfg.integrator);
    });
    return fs;
}

/// Reduction of d * W. Homogeneous vectors do not depend on d, so Wred and
/// mu are those of W times d; spectral vectors are recomputed for d.
inline Reduction compute_reduction(const WeightedDigraph& w, const Partition& p, SweepMethod method,
                                   SpectralMode mode, double d = 1.0)
{
    if (!(d >= 0.0) || !std::isfinite(d)) throw InvalidArgument("reduction scale d must be finite and >= 0");
    if (method == SweepMethod::spectral) {
        SpectralOptions opts;
        opts.scale = d;
        return spectral_reduce(w, p, mode, opts);
    }
    if (method == SweepMethod::homogeneous) {
        Reduction r = homogeneous_reduce(w, p);
        r.system.w_reduced *= d;
        r.system.mu *= d;
        r.system.lambda *= d;
        return r;
    }
    throw InvalidArgument("compute_reduction: the degree-based method has no group reduction");
}

/// Bifurcation diagram of `cfg.method` against the exact dynamics. The
/// reduction is recomputed at every d. The full sweep does not depend on the
/// partition or the method and may be shared.
inline BifurcationDiagram bifurcation_sweep(const WeightedDigraph& w, const Partition& p,
                                            const DynamicsSpec& spec, const SweepConfig& cfg,
                                            const FullSweep* full = nullptr)
{
    validate(cfg);
    check_sizes(w, p);
    FullSweep local;
    if (!full) {
        local = compute_full_sweep(w, spec, cfg);
        full = &local;
    }
    if (full->points.size() != 2 * static_cast<std::size_t>(cfg.count))
        throw InvalidArgument("full sweep does not match the sweep grid");

    const double low_value = cfg.low_state.value_or(low_initial_value(spec));
    auto clip = [&](Vector& x) { clip_state(spec, x); };
    BifurcationDiagram diagram;

    if (cfg.method == SweepMethod::gao) {
        const GaoReduction gao = gao_reduce(w);
        const Vector low = Vector::Constant(1, low_value);
        const std::vector<double> grid = d_grid(cfg);
        const auto reduced = detail::continuation(grid, low, [&](std::size_t k, Vector x0) {
            const double beta = grid[k] * gao.beta_eff;
            return detail::settle(
                [&](const Vector& x) { return Vector::Constant(1, gao_rhs(spec, beta, x(0))); }, clip,
                std::move(x0), cfg.integrator);
        });
        for (std::size_t k = 0; k < reduced.size(); ++k) {
            const auto& fp = full->points[k];
            diagram.rows.push_back({fp.d, fp.d * gao.beta_eff, gao.out_weights.dot(fp.state),
                                    reduced[k].state(0), fp.branch, fp.converged, reduced[k].converged});
        }
        return diagram;
    }

    const std::vector<double> grid = d_grid(cfg);
    std::vector<Reduction> reductions;
    reductions.reserve(grid.size());
    for (double d : grid) reductions.push_back(compute_reduction(w, p, cfg.method, cfg.mode, d));
    const Vector low = Vector::Constant(reductions.front().system.n_groups(), low_value);
    const auto reduced = detail::continuation(grid, low, [&](std::size_t k, Vector x0) {
        const ReducedSystem& sys = reductions[k].system;
        return detail::settle([&](const Vector& x) { return reduced_rhs(spec, sys, x); }, clip,
                              std::move(x0), cfg.integrator);
    });
    const std::size_t count = grid.size();
    for (std::size_t k = 0; k < reduced.size(); ++k) {
        const auto& fp = full->points[k];
        const Reduction& red_k = reductions[k < count ? k : 2 * count - 1 - k];
        const Vector projected = project_observables(red_k.vectors, fp.state);
        const AggregateObservables exact = aggregate_reduced(red_k.system, projected);
        const AggregateObservables red = aggregate_reduced(red_k.system, reduced[k].state);
        diagram.rows.push_back({fp.d, exact.mean_K, exact.mean_X, red.mean_X, fp.branch, fp.converged,
                                reduced[k].converged});
    }
    return diagram;
}

struct RmseResult {
    double rmse = std::numeric_limits<double>::quiet_NaN();
    long used = 0;
    long excluded = 0;
};

/// RMSE over both branches; points where either curve did not converge are
/// excluded pairwise.
inline RmseResult diagram_rmse(const std::vector<CurvePoint>& a, const std::vector<CurvePoint>& b)
{
    if (a.size() != b.size()) throw InvalidArgument("diagram_rmse: curves have different lengths");
    RmseResult r;
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k].branch != b[k].branch ||
            std::abs(a[k].d - b[k].d) > 1e-12 * std::max(1.0, std::abs(a[k].d)))
            throw InvalidArgument("diagram_rmse: curves do not share the d grid");
        if (!a[k].converged || !b[k].converged || !std::isfinite(a[k].value) || !std::isfinite(b[k].value)) {
            ++r.excluded;
            continue;
        }
        const double e = a[k].value - b[k].value;
        acc += e * e;
        ++r.used;
    }
    if (r.used > 0) r.rmse = std::sqrt(acc / static_cast<double>(r.used));
    return r;
}

inline RmseResult diagram_rmse(const BifurcationDiagram& d)
{
    return diagram_rmse(d.exact_curve(), d.reduced_curve());
}

/// Splits every group so that, within a subgroup, each group-to-group
/// weighted in-degree spans at most v_in and each out-degree at most v_out.
/// Degrees are segmented greedily after sorting, which gives the fewest
/// categories for a width cap.
inline Partition refine_partition(const WeightedDigraph& w, const Partition& p, double v_in, double v_out)
{
    check_sizes(w, p);
    if (!(v_in > 0.0) || !(v_out > 0.0)) throw InvalidArgument("refinement thresholds must be > 0");
    const Index n_nodes = w.n_nodes();
    const int n = p.n_groups();
    const Matrix& wm = w.weights();

    // in_deg(i, rho) = sum_{j in G_rho} w_ij ; out_deg(i, rho) = sum_{j in G_rho} w_ji
    Matrix in_deg = Matrix::Zero(n_nodes, n);
    Matrix out_deg = Matrix::Zero(n_nodes, n);
    for (Index i = 0; i < n_nodes; ++i)
        for (Index j = 0; j < n_nodes; ++j) {
            in_deg(i, p.group_of(j)) += wm(i, j);
            out_deg(i, p.group_of(j)) += wm(j, i);
        }

    std::vector<std::vector<int>> labels(static_cast<std::size_t>(n_nodes),
                                         std::vector<int>(2 * static_cast<std::size_t>(n), 0));
    auto segment = [&](const std::vector<Index>& mem, const Matrix& deg, int col, double v, int slot) {
        std::vector<Index> order = mem;
        std::stable_sort(order.begin(), order.end(),
                         [&](Index a, Index b) { return deg(a, col) < deg(b, col); });
        int category = 0;
        double start = deg(order.front(), col);
        for (Index i : order) {
            if (deg(i, col) - start > v) {
                ++category;
                start = deg(i, col);
            }
            labels[static_cast<std::size_t>(i)][static_cast<std::size_t>(slot)] = category;
        }
    };

    std::vector<int> assignment(static_cast<std::size_t>(n_nodes));
    int next_label = 0;
    for (int nu = 0; nu < n; ++nu) {
        const auto mem = p.members(nu);
        for (int rho = 0; rho < n; ++rho) {
            segment(mem, in_deg, rho, v_in, rho);
            segment(mem, out_deg, rho, v_out, n + rho);
        }
        std::map<std::vector<int>, int> sub;
        for (Index i : mem) sub.emplace(labels[static_cast<std::size_t>(i)], 0);
        for (auto& [key, label] : sub) label = next_label++;
        for (Index i : mem) assignment[static_cast<std::size_t>(i)] = sub.at(labels[static_cast<std::size_t>(i)]);
    }
    return Partition(std::move(assignment));
}

/// Applies the schedule step by step; each step refines the previous output.
inline std::vector<Partition> refine_schedule(const WeightedDigraph& w, const Partition& p,
                                              const std::vector<std::pair<double, double>>& schedule)
{
    std::vector<Partition> out;
    Partition cur = p;
    for (const auto& [vi, vo] : schedule) {
        cur = refine_partition(w, cur, vi, vo);
        out.push_back(cur);
    }
    return out;
}

/// floor(f N) membership swaps between random nodes of different groups.
inline Partition perturb_partition(const Partition& p, double f, Rng& rng, long* swaps_applied = nullptr)
{
    if (p.n_groups() < 2) throw InvalidArgument("perturb_partition needs at least two groups");
    if (!(f >= 0.0 && f <= 1.0)) throw InvalidArgument("perturbation fraction must lie in [0, 1]");
    std::vector<int> a = p.assignment();
    const Index n = p.n_nodes();
    const long swaps = static_cast<long>(std::floor(f * static_cast<double>(n)));
    std::uniform_int_distribution<Index> pick(0, n - 1);
    for (long s = 0; s < swaps; ++s) {
        const Index i = pick(rng);
        Index j = pick(rng);
        while (a[static_cast<std::size_t>(j)] == a[static_cast<std::size_t>(i)]) j = pick(rng);
        std::swap(a[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(j)]);
    }
    if (swaps_applied) *swaps_applied = swaps;
    return Partition(std::move(a));
}

struct PerturbationRecord {
    double f = 0.0;
    SweepMethod method = SweepMethod::spectral;
    double mean_rel_rmse = 0.0;
    double std_rel_rmse = 0.0;
    long n_members = 0;
    long n_failed = 0;
    std::vector<double> rel_rmse;  // successful members, in seed order
};

struct PerturbationReport {
    double base_rmse = 0.0;  // spectral RMSE of the unperturbed partition
    std::vector<PerturbationRecord> records;
};

/// Runs `task(k)` for k in [0, count) on up to `threads` workers. Each task
/// writes only its own output slot, so results do not depend on scheduling.
template <class Task>
void parallel_for(std::size_t count, unsigned threads, Task&& task)
{
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (threads <= 1) {
        for (std::size_t k = 0; k < count; ++k) task(k);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t k = t; k < count; k += threads) task(k);
        });
    for (auto& th : pool) th.join();
}

inline Rng member_rng(std::uint64_t seed, std::size_t f_index, std::size_t member)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(f_index), static_cast<std::uint32_t>(member)};
    return Rng(seq);
}

inline PerturbationReport perturbation_experiment(const WeightedDigraph& w, const Partition& p0,
                                                  const DynamicsSpec& spec, const std::vector<double>& f_grid,
                                                  int ensemble_size, const SweepConfig& cfg,
                                                  std::uint64_t seed, unsigned threads = 1)
{
    if (ensemble_size < 1) throw InvalidArgument("ensemble size must be >= 1");
    const FullSweep full = compute_full_sweep(w, spec, cfg);
    SweepConfig spectral_cfg = cfg;
    spectral_cfg.method = SweepMethod::spectral;
    SweepConfig homogeneous_cfg = cfg;
    homogeneous_cfg.method = SweepMethod::homogeneous;

    PerturbationReport report;
    report.base_rmse = diagram_rmse(bifurcation_sweep(w, p0, spec, spectral_cfg, &full)).rmse;
    if (!(report.base_rmse > 0.0) || !std::isfinite(report.base_rmse))
        throw InvalidArgument("unperturbed spectral RMSE is zero or undefined; relative RMSE is meaningless");

    for (std::size_t fi = 0; fi < f_grid.size(); ++fi) {
        const double f = f_grid[fi];
        const std::size_t members = f == 0.0 ? 1 : static_cast<std::size_t>(ensemble_size);
        // [member][method] -> RMSE or NaN on failure
        std::vector<std::array<double, 2>> results(members);
        parallel_for(members, threads, [&](std::size_t k) {
            Rng rng = member_rng(seed, fi, k);
            const Partition pf = perturb_partition(p0, f, rng);
            const SweepConfig* cfgs[2] = {&homogeneous_cfg, &spectral_cfg};
            for (int m = 0; m < 2; ++m) {
                try {
                    results[k][static_cast<std::size_t>(m)] =
                        diagram_rmse(bifurcation_sweep(w, pf, spec, *cfgs[m], &full)).rmse;
                } catch (const Error&) {
                    results[k][static_cast<std::size_t>(m)] = std::numeric_limits<double>::quiet_NaN();
                }
            }
        });
        for (int m = 0; m < 2; ++m) {
            PerturbationRecord rec;
            rec.f = f;
            rec.method = m == 0 ? SweepMethod::homogeneous : SweepMethod::spectral;
            rec.n_members = static_cast<long>(members);
            for (const auto& r : results) {
                const double v = r[static_cast<std::size_t>(m)];
                if (std::isfinite(v))
                    rec.rel_rmse.push_back(v / report.base_rmse);
                else
                    ++rec.n_failed;
            }
            if (!rec.rel_rmse.empty()) {
                double s = 0.0;
                for (double v : rec.rel_rmse) s += v;
                rec.mean_rel_rmse = s / static_cast<double>(rec.rel_rmse.size());
                double ss = 0.0;
                for (double v : rec.rel_rmse) ss += (v - rec.mean_rel_rmse) * (v - rec.mean_rel_rmse);
                rec.std_rel_rmse = std::sqrt(ss / static_cast<double>(rec.rel_rmse.size()));
            } else {
                rec.mean_rel_rmse = std::numeric_limits<double>::quiet_NaN();
                rec.std_rel_rmse = std::numeric_limits<double>::quiet_NaN();
            }
            report.records.push_back(std::move(rec));
        }
    }
    return report;
}

}  // namespace netreduce
