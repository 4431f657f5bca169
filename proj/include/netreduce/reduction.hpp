#pragma once

// Homogeneous, spectral and degree-based (one observable) reductions.
//
// A reduction assigns to every group nu a sum-1 weight vector a_nu supported
// on the group, and builds the reduced adjacency matrix
//     Wred_{nu rho} = sum_{i in G_nu} a_{nu i} k_i^rho,
// the in-degree correction mu_{nu rho} and, as a diagnostic, lambda_{nu rho}.

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netreduce/graph.hpp"
#include "netreduce/numerics.hpp"

namespace netreduce {

enum class ReductionMethod { homogeneous, spectral_restricted, spectral_optimal };
enum class SpectralMode { restricted, optimal };

inline const char* to_string(ReductionMethod m)
{
    switch (m) {
    case ReductionMethod::homogeneous: return "homogeneous";
    case ReductionMethod::spectral_restricted: return "spectral-restricted";
    case ReductionMethod::spectral_optimal: return "spectral-optimal";
    }
    return "?";
}

struct ReductionVectors {
    ReductionMethod method = ReductionMethod::homogeneous;
    Index n_nodes = 0;
    /// Partial vectors a_hat_nu, indexed like `members[nu]`.
    std::vector<Vector> partials;
    /// Node indices (in the caller's numbering) of each group, increasing.
    std::vector<std::vector<Index>> members;
    /// E(a_hat_nu) for spectral methods, zero for the homogeneous one.
    std::vector<double> per_group_error;
    /// Dominant eigenvalues lambda'_{nu rho} of the decoupled matrices
    /// (spectral methods only; empty for singleton groups).
    std::vector<std::vector<double>> decoupled_lambdas;
    std::vector<std::string> warnings;

    int n_groups() const noexcept { return static_cast<int>(partials.size()); }

    /// The full reduction vector a_nu, zero outside the group.
    Vector embed(int nu) const
    {
        Vector a = Vector::Zero(n_nodes);
        const auto& mem = members[static_cast<std::size_t>(nu)];
        const auto& part = partials[static_cast<std::size_t>(nu)];
        for (std::size_t i = 0; i < mem.size(); ++i) a(mem[i]) = part(static_cast<Index>(i));
        return a;
    }
};

struct ReducedSystem {
    Matrix w_reduced;
    Matrix mu;
    Matrix lambda;
    std::vector<Index> sizes;
    Index n_nodes = 0;

    int n_groups() const noexcept { return static_cast<int>(w_reduced.rows()); }
};

struct Reduction {
    ReductionVectors vectors;
    ReducedSystem system;
};

struct GaoReduction {
    double beta_eff = 0.0;
    Vector out_weights;
};

/// X_nu = sum_i a_{nu i} x_i.
inline Vector project_observables(const ReductionVectors& v, const Vector& x)
{
    if (x.size() != v.n_nodes)
        throw InvalidArgument("state has " + std::to_string(x.size()) + " entries, expected " +
                              std::to_string(v.n_nodes));
    Vector out(v.n_groups());
    for (int nu = 0; nu < v.n_groups(); ++nu) {
        const auto& mem = v.members[static_cast<std::size_t>(nu)];
        const auto& part = v.partials[static_cast<std::size_t>(nu)];
        double s = 0.0;
        for (std::size_t i = 0; i < mem.size(); ++i) s += part(static_cast<Index>(i)) * x(mem[i]);
        out(nu) = s;
    }
    return out;
}

inline double reduction_error(const Vector& a_hat, std::span<const Matrix> matrices,
                              std::span<const double> lambdas)
{
    return quadratic_error(matrices, lambdas, a_hat);
}

/// Decoupled compatibility matrices of group nu: W'_{nu nu} = W_{nu nu}^T and
/// W'_{nu rho} = W_{rho nu}^T W_{nu rho}^T for rho != nu, all m_nu x m_nu.
inline std::vector<Matrix> build_decoupled_matrices(const BlockView& b, int nu)
{
    if (nu < 0 || nu >= b.n_groups) throw InvalidArgument("group index out of range");
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(b.n_groups));
    for (int rho = 0; rho < b.n_groups; ++rho) {
        if (!(b.block(nu, rho).array() > 0.0).all() || !(b.block(rho, nu).array() > 0.0).all())
            throw InvalidArgument("decoupled matrices need strictly positive blocks (apply positify)");
        if (rho == nu)
            out.emplace_back(b.block(nu, nu).transpose());
        else
            out.emplace_back(b.block(rho, nu).transpose() * b.block(nu, rho).transpose());
    }
    return out;
}

namespace detail {

// Fills Wred, mu and lambda from canonical blocks and partial vectors.
inline ReducedSystem assemble_system(const BlockView& b, const std::vector<Vector>& partials,
                                     Index n_nodes)
{
    const int n = b.n_groups;
    ReducedSystem sys;
    sys.w_reduced.resize(n, n);
    sys.mu.resize(n, n);
    sys.lambda.resize(n, n);
    sys.sizes = b.sizes;
    sys.n_nodes = n_nodes;
    for (int nu = 0; nu < n; ++nu) {
        const Vector& a = partials[static_cast<std::size_t>(nu)];
        for (int rho = 0; rho < n; ++rho) {
            const Vector& k = b.degrees(nu, rho);
            sys.w_reduced(nu, rho) = a.dot(k);
            sys.mu(nu, rho) = rayleigh_mu(k, a);
            const Vector& a_rho = partials[static_cast<std::size_t>(rho)];
            sys.lambda(nu, rho) =
                a_rho.dot(b.block(nu, rho).transpose() * a) / a_rho.squaredNorm();
        }
    }
    return sys;
}

inline std::vector<std::vector<Index>> original_members(const Canonical& c)
{
    const Partition& p = c.partition;
    const auto offsets = p.offsets();
    std::vector<std::vector<Index>> out(static_cast<std::size_t>(p.n_groups()));
    // The stable sort keeps members of a group in increasing order.
    for (int g = 0; g < p.n_groups(); ++g) {
        auto& mem = out[static_cast<std::size_t>(g)];
        for (Index i = 0; i < p.size(g); ++i) mem.push_back(c.original_node(offsets[static_cast<std::size_t>(g)] + i));
    }
    return out;
}

// Keeps the vectors whose distance to the span of the ones kept before is
// above rel_tol times their norm.
inline std::vector<Vector> independent_subset(const std::vector<Vector>& candidates, double rel_tol)
{
    std::vector<Vector> kept;
    std::vector<Vector> ortho;
    for (const auto& c : candidates) {
        Vector r = c;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : ortho) r -= q.dot(r) * q;
        const double rn = r.norm();
        if (rn > rel_tol * c.norm()) {
            kept.push_back(c);
            ortho.push_back(r / rn);
        }
    }
    return kept;
}

}  // namespace detail

inline constexpr double kBasisDedupTolerance = 1e-10;

inline Reduction homogeneous_reduce(const WeightedDigraph& w, const Partition& p)
{
    const Canonical c = canonicalize(w, p);
    const BlockView b = block_decompose(c.graph, c.partition);

    Reduction r;
    r.vectors.method = ReductionMethod::homogeneous;
    r.vectors.n_nodes = w.n_nodes();
    r.vectors.members = detail::original_members(c);
    for (int nu = 0; nu < b.n_groups; ++nu) {
        const Index m = b.sizes[static_cast<std::size_t>(nu)];
        r.vectors.partials.emplace_back(Vector::Constant(m, 1.0 / static_cast<double>(m)));
        r.vectors.per_group_error.push_back(0.0);
    }
    r.system = detail::assemble_system(b, r.vectors.partials, w.n_nodes());
    // No correction term for this method.
    r.system.mu = r.system.w_reduced;
    return r;
}

struct SpectralOptions {
    PowerIterationOptions power;
    double dedup_tol = kBasisDedupTolerance;
    /// Reduce d * W for d = scale >= 0 while working on W. The decoupled
    /// matrices of d * W are d W'_{nu nu} and d^2 W'_{nu rho}, so the vectors
    /// depend on d; d = 0 gives the limit d -> 0+.
    double scale = 1.0;
};

inline Reduction spectral_reduce(const WeightedDigraph& w, const Partition& p, SpectralMode mode,
                                 const SpectralOptions& opts = {})
{
    if (!w.strictly_positive())
        throw InvalidArgument("spectral reduction needs a strictly positive matrix (apply positify)");
    if (!(opts.scale >= 0.0) || !std::isfinite(opts.scale))
        throw InvalidArgument("spectral reduction scale must be a finite value >= 0");
    const Canonical c = canonicalize(w, p);
    const BlockView b = block_decompose(c.graph, c.partition);
    const int n = b.n_groups;
    const double d = opts.scale;

    Reduction r;
    r.vectors.method = mode == SpectralMode::restricted ? ReductionMethod::spectral_restricted
                                                        : ReductionMethod::spectral_optimal;
    r.vectors.n_nodes = w.n_nodes();
    r.vectors.members = detail::original_members(c);
    r.vectors.decoupled_lambdas.resize(static_cast<std::size_t>(n));

    for (int nu = 0; nu < n; ++nu) {
        const Index m = b.sizes[static_cast<std::size_t>(nu)];
        if (m == 1) {
            r.vectors.partials.emplace_back(Vector::Ones(1));
            r.vectors.per_group_error.push_back(0.0);
            continue;
        }
        std::vector<Matrix> mats = build_decoupled_matrices(b, nu);
        std::vector<double> lambdas;
        std::vector<Vector> eigvecs;
        for (const auto& mat : mats) {
            EigenPair ep = dominant_eigenpair(mat, opts.power);
            lambdas.push_back(ep.value);
            eigvecs.push_back(std::move(ep.vector));
        }

        std::vector<Vector> basis;
        if (mode == SpectralMode::restricted) {
            basis = detail::independent_subset(eigvecs, opts.dedup_tol);
        } else {
            for (Index i = 0; i < m; ++i) basis.emplace_back(Vector::Unit(m, i));
        }

        // The objective of d * W divided by d^2: off-diagonal terms carry an
        // extra factor d. At d = 1 this is the unscaled problem.
        std::vector<double> scaled_lambdas = lambdas;
        if (d != 1.0)
            for (int rho = 0; rho < n; ++rho)
                if (rho != nu) {
                    mats[static_cast<std::size_t>(rho)] *= d;
                    scaled_lambdas[static_cast<std::size_t>(rho)] *= d;
                }
        const LsqSolution sol = constrained_lsq(mats, scaled_lambdas, basis);

        if ((sol.vector.array() < 0.0).any())
            r.vectors.warnings.push_back("group " + std::to_string(nu) +
                                         ": reduction vector has negative components");
        r.vectors.partials.push_back(sol.vector);
        r.vectors.per_group_error.push_back(d * d * sol.error);
        for (int rho = 0; rho < n; ++rho)
            lambdas[static_cast<std::size_t>(rho)] *= rho == nu ? d : d * d;
        r.vectors.decoupled_lambdas[static_cast<std::size_t>(nu)] = std::move(lambdas);
    }
    r.system = detail::assemble_system(b, r.vectors.partials, w.n_nodes());
    r.system.w_reduced *= d;
    r.system.mu *= d;
    r.system.lambda *= d;
    return r;
}

inline GaoReduction gao_reduce(const WeightedDigraph& w)
{
    if ((w.weights().array() < 0.0).any())
        throw InvalidArgument("degree-based reduction needs non-negative weights");
    const Vector s_out = w.out_degrees();
    const Vector s_in = w.in_degrees();
    const double total = s_out.sum();
    if (!(total > 0.0)) throw InvalidArgument("degree-based reduction of an all-zero matrix");
    return {s_out.dot(s_in) / total, s_out / total};
}

}  // namespace netreduce
