#pragma once

// Synthetic directed networks with block structure: the directed stochastic
// block model and a variant with hidden in/out-degrees per group pair
// (Chung-Lu style) that produces within-group degree heterogeneity.

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "netreduce/error.hpp"
#include "netreduce/graph.hpp"

namespace netreduce {

using Rng = std::mt19937_64;

struct SbmSpec {
    std::vector<Index> sizes;
    Matrix density;  // density(nu, rho): probability of an edge from G_rho to G_nu
    double weight = 1.0;
};

struct HetSpec {
    std::vector<Index> sizes;
    Matrix density;
    /// Hidden degrees are uniform on mean * [1 - half_width, 1 + half_width].
    double half_width = 0.5;
    /// Correlation of the hidden in- and out-degree of a node within its own group.
    double rho_inout = 0.8;
    double weight = 1.0;
};

struct GeneratedNetwork {
    WeightedDigraph graph;
    Partition partition;
};

/// Hidden degrees, one row per node and one column per group:
/// in(i, rho) = kappa_rho^{i,in}, out(i, rho) = kappa_rho^{i,out}.
struct HiddenDegrees {
    Matrix in;
    Matrix out;
};

struct HetNetwork {
    WeightedDigraph graph;
    Partition partition;
    HiddenDegrees hidden;
    long clipped = 0;  // pairs whose probability exceeded 1
    long pairs = 0;

    double clip_rate() const { return pairs ? static_cast<double>(clipped) / static_cast<double>(pairs) : 0.0; }
};

namespace detail {

inline void validate_blocks(const std::vector<Index>& sizes, const Matrix& density)
{
    if (sizes.empty()) throw InvalidArgument("at least one group size is required");
    for (Index m : sizes)
        if (m < 1) throw InvalidArgument("group sizes must be positive");
    const auto n = static_cast<Index>(sizes.size());
    if (density.rows() != n || density.cols() != n)
        throw InvalidArgument("density matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    if (!((density.array() >= 0.0).all() && (density.array() <= 1.0).all()))
        throw InvalidArgument("densities must lie in [0, 1]");
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace detail

inline void validate(const SbmSpec& s)
{
    detail::validate_blocks(s.sizes, s.density);
    if (!(s.weight > 0.0)) throw InvalidArgument("edge weight must be > 0");
}

inline void validate(const HetSpec& s)
{
    detail::validate_blocks(s.sizes, s.density);
    if (!(s.weight > 0.0)) throw InvalidArgument("edge weight must be > 0");
    if (!(s.half_width >= 0.0 && s.half_width <= 1.0))
        throw InvalidArgument("hidden-degree half_width must lie in [0, 1]");
    if (!(s.rho_inout >= -1.0 && s.rho_inout <= 1.0))
        throw InvalidArgument("rho_inout must lie in [-1, 1]");
}

inline GeneratedNetwork sbm_generate(const SbmSpec& spec, Rng& rng)
{
    validate(spec);
    Partition p = Partition::from_sizes(spec.sizes);
    const Index n = p.n_nodes();
    Matrix w = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            if (i == j) continue;
            if (detail::uniform01(rng) < spec.density(p.group_of(i), p.group_of(j))) w(i, j) = spec.weight;
        }
    return {WeightedDigraph(std::move(w)), std::move(p)};
}

inline HiddenDegrees sample_hidden_degrees(const HetSpec& spec, Rng& rng)
{
    validate(spec);
    const Partition p = Partition::from_sizes(spec.sizes);
    const Index n = p.n_nodes();
    const int groups = p.n_groups();
    HiddenDegrees h{Matrix::Zero(n, groups), Matrix::Zero(n, groups)};

    // Gaussian copula: correlation r between the normals gives Pearson
    // correlation (6/pi) asin(r/2) between the resulting uniforms.
    const double r = 2.0 * std::sin(std::numbers::pi * spec.rho_inout / 6.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto spread = [&](double mean, double u) { return mean * (1.0 + spec.half_width * (2.0 * u - 1.0)); };

    for (Index i = 0; i < n; ++i) {
        const int nu = p.group_of(i);
        for (int rho = 0; rho < groups; ++rho) {
            const double m_rho = static_cast<double>(spec.sizes[static_cast<std::size_t>(rho)]);
            const double mean_in = m_rho * spec.density(nu, rho);
            const double mean_out = m_rho * spec.density(rho, nu);
            if (rho == nu) {
                const double z1 = normal(rng);
                const double z2 = r * z1 + std::sqrt(std::max(0.0, 1.0 - r * r)) * normal(rng);
                h.in(i, rho) = spread(mean_in, detail::normal_cdf(z1));
                h.out(i, rho) = spread(mean_out, detail::normal_cdf(z2));
            } else {
                h.in(i, rho) = spread(mean_in, detail::uniform01(rng));
                h.out(i, rho) = spread(mean_out, detail::uniform01(rng));
            }
        }
    }
    return h;
}

/// Probability of the edge j -> i, before clamping to [0, 1].
inline double het_edge_probability(const HetSpec& spec, const Partition& p, const HiddenDegrees& h,
                                   Index i, Index j)
{
    const int nu = p.group_of(i);
    const int rho = p.group_of(j);
    const double density = spec.density(nu, rho);
    if (density == 0.0) return 0.0;
    const double m_nu = static_cast<double>(spec.sizes[static_cast<std::size_t>(nu)]);
    const double m_rho = static_cast<double>(spec.sizes[static_cast<std::size_t>(rho)]);
    return h.in(i, rho) * h.out(j, nu) / (m_nu * m_rho * density);
}

inline HetNetwork het_generate_from_hidden(const HetSpec& spec, const HiddenDegrees& hidden, Rng& rng)
{
    validate(spec);
    Partition p = Partition::from_sizes(spec.sizes);
    const Index n = p.n_nodes();
    if (hidden.in.rows() != n || hidden.out.rows() != n || hidden.in.cols() != p.n_groups() ||
        hidden.out.cols() != p.n_groups())
        throw InvalidArgument("hidden degrees do not match the spec");
    for (int nu = 0; nu < p.n_groups(); ++nu)
        for (int rho = 0; rho < p.n_groups(); ++rho)
            if (spec.density(nu, rho) == 0.0) {
                for (Index i : p.members(nu))
                    if (hidden.in(i, rho) != 0.0)
                        throw InvalidArgument("zero-density block with nonzero hidden degrees");
            }

    HetNetwork out{WeightedDigraph(Matrix::Zero(n, n)), p, hidden, 0, 0};
    Matrix w = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            if (i == j) continue;
            double prob = het_edge_probability(spec, p, hidden, i, j);
            ++out.pairs;
            if (prob > 1.0) {
                ++out.clipped;
                prob = 1.0;
            }
            if (detail::uniform01(rng) < prob) w(i, j) = spec.weight;
        }
    out.graph = WeightedDigraph(std::move(w));
    return out;
}

inline HetNetwork het_generate(const HetSpec& spec, Rng& rng)
{
    const HiddenDegrees h = sample_hidden_degrees(spec, rng);
    return het_generate_from_hidden(spec, h, rng);
}

}  // namespace netreduce
