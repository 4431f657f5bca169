#pragma once

// Weighted directed networks, node partitions and their block decomposition.
//
// Convention: entry (i, j) of the weight matrix is the strength of the edge
// j -> i, so row i holds the incoming weights of node i and the row sums are
// weighted in-degrees.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "netreduce/error.hpp"

namespace netreduce {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultEpsilon = 1e-6;

class WeightedDigraph {
public:
    WeightedDigraph() = default;

    explicit WeightedDigraph(Matrix weights) : weights_(std::move(weights))
    {
        if (weights_.rows() != weights_.cols())
            throw InvalidArgument("weight matrix must be square");
        if (weights_.rows() < 1)
            throw InvalidArgument("network must have at least one node");
        if (!weights_.allFinite())
            throw InvalidArgument("weight matrix has non-finite entries");
    }

    Index n_nodes() const noexcept { return weights_.rows(); }
    const Matrix& weights() const noexcept { return weights_; }
    double operator()(Index i, Index j) const { return weights_(i, j); }

    Vector in_degrees() const { return weights_.rowwise().sum(); }
    Vector out_degrees() const { return weights_.colwise().sum().transpose(); }

    bool strictly_positive() const { return (weights_.array() > 0.0).all(); }

    friend bool operator==(const WeightedDigraph& a, const WeightedDigraph& b)
    {
        return a.weights_.rows() == b.weights_.rows() && a.weights_ == b.weights_;
    }

private:
    Matrix weights_;
};

/// Node -> group assignment. Group labels are 0..n_groups-1 and every group
/// is non-empty.
class Partition {
public:
    Partition() = default;

    explicit Partition(std::vector<int> assignment) : assignment_(std::move(assignment))
    {
        if (assignment_.empty()) throw InvalidArgument("partition is empty");
        int max_label = -1;
        for (int g : assignment_) {
            if (g < 0) throw InvalidArgument("negative group label in partition");
            max_label = std::max(max_label, g);
        }
        n_groups_ = max_label + 1;
        sizes_.assign(static_cast<std::size_t>(n_groups_), 0);
        for (int g : assignment_) ++sizes_[static_cast<std::size_t>(g)];
        for (int g = 0; g < n_groups_; ++g) {
            if (sizes_[static_cast<std::size_t>(g)] == 0)
                throw InvalidArgument("group " + std::to_string(g) + " is empty");
        }
    }

    /// Every node in one group.
    static Partition single_group(Index n_nodes)
    {
        return Partition(std::vector<int>(static_cast<std::size_t>(n_nodes), 0));
    }

    /// Consecutive groups of the given sizes.
    static Partition from_sizes(const std::vector<Index>& sizes)
    {
        std::vector<int> assignment;
        for (std::size_t g = 0; g < sizes.size(); ++g)
            assignment.insert(assignment.end(), static_cast<std::size_t>(sizes[g]),
                              static_cast<int>(g));
        return Partition(std::move(assignment));
    }

    Index n_nodes() const noexcept { return static_cast<Index>(assignment_.size()); }
    int n_groups() const noexcept { return n_groups_; }
    int group_of(Index node) const { return assignment_[static_cast<std::size_t>(node)]; }
    const std::vector<int>& assignment() const noexcept { return assignment_; }
    Index size(int group) const { return sizes_[static_cast<std::size_t>(group)]; }
    const std::vector<Index>& sizes() const noexcept { return sizes_; }

    /// Node indices of a group in increasing order.
    std::vector<Index> members(int group) const
    {
        std::vector<Index> out;
        out.reserve(static_cast<std::size_t>(size(group)));
        for (std::size_t i = 0; i < assignment_.size(); ++i)
            if (assignment_[i] == group) out.push_back(static_cast<Index>(i));
        return out;
    }

    /// True when the indices of every group are consecutive and the groups
    /// appear in label order.
    bool is_canonical() const
    {
        return std::is_sorted(assignment_.begin(), assignment_.end());
    }

    /// Global index of the first node of each group, p_nu(0). Only meaningful
    /// for canonical partitions.
    std::vector<Index> offsets() const
    {
        std::vector<Index> out(sizes_.size(), 0);
        for (std::size_t g = 1; g < sizes_.size(); ++g) out[g] = out[g - 1] + sizes_[g - 1];
        return out;
    }

    friend bool operator==(const Partition& a, const Partition& b)
    {
        return a.assignment_ == b.assignment_;
    }

private:
    std::vector<int> assignment_;
    int n_groups_ = 0;
    std::vector<Index> sizes_;
};

/// Group-to-group submatrices W_{nu rho} and diagonal in-degree blocks
/// [K_{nu rho}]_ii = k^rho of the i-th node of group nu.
struct BlockView {
    int n_groups = 0;
    std::vector<Index> sizes;
    std::vector<Matrix> blocks;         // row-major over (nu, rho)
    std::vector<Vector> degree_blocks;  // diagonals of K_{nu rho}

    const Matrix& block(int nu, int rho) const
    {
        return blocks[static_cast<std::size_t>(nu * n_groups + rho)];
    }
    const Vector& degrees(int nu, int rho) const
    {
        return degree_blocks[static_cast<std::size_t>(nu * n_groups + rho)];
    }
};

inline void check_sizes(const WeightedDigraph& w, const Partition& p)
{
    if (w.n_nodes() != p.n_nodes())
        throw InvalidArgument("partition covers " + std::to_string(p.n_nodes()) +
                              " nodes but the network has " + std::to_string(w.n_nodes()));
}

inline BlockView block_decompose(const WeightedDigraph& w, const Partition& p)
{
    check_sizes(w, p);
    if (!p.is_canonical())
        throw InvalidArgument("block_decompose needs a canonical partition; call canonicalize first");

    BlockView view;
    view.n_groups = p.n_groups();
    view.sizes = p.sizes();
    const auto offsets = p.offsets();
    const auto n = static_cast<std::size_t>(p.n_groups());
    view.blocks.reserve(n * n);
    view.degree_blocks.reserve(n * n);
    for (std::size_t nu = 0; nu < n; ++nu) {
        for (std::size_t rho = 0; rho < n; ++rho) {
            Matrix b = w.weights().block(offsets[nu], offsets[rho], view.sizes[nu], view.sizes[rho]);
            view.degree_blocks.emplace_back(b.rowwise().sum());
            view.blocks.push_back(std::move(b));
        }
    }
    return view;
}

/// Result of sorting nodes by group. `permutation[new_index] = old_index`.
struct Canonical {
    std::vector<Index> permutation;
    WeightedDigraph graph;
    Partition partition;

    /// Maps a node index of the canonical graph back to the input graph.
    Index original_node(Index canonical_node) const
    {
        return permutation[static_cast<std::size_t>(canonical_node)];
    }
};

inline Canonical canonicalize(const WeightedDigraph& w, const Partition& p)
{
    check_sizes(w, p);
    const Index n = w.n_nodes();
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::stable_sort(perm.begin(), perm.end(),
                     [&](Index a, Index b) { return p.group_of(a) < p.group_of(b); });

    Matrix permuted(n, n);
    std::vector<int> assignment(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const Index oi = perm[static_cast<std::size_t>(i)];
        assignment[static_cast<std::size_t>(i)] = p.group_of(oi);
        for (Index j = 0; j < n; ++j) permuted(i, j) = w(oi, perm[static_cast<std::size_t>(j)]);
    }
    return {std::move(perm), WeightedDigraph(std::move(permuted)), Partition(std::move(assignment))};
}

/// Replaces missing (zero) interactions by a weak positive weight.
inline WeightedDigraph positify(const WeightedDigraph& w, double epsilon = kDefaultEpsilon,
                                Index* filled = nullptr)
{
    if (!(epsilon > 0.0)) throw InvalidArgument("positify epsilon must be > 0");
    if ((w.weights().array() < 0.0).any())
        throw InvalidArgument("negative weights are not supported");
    Matrix out = w.weights();
    Index count = 0;
    for (Index j = 0; j < out.cols(); ++j)
        for (Index i = 0; i < out.rows(); ++i)
            if (out(i, j) == 0.0) {
                out(i, j) = epsilon;
                ++count;
            }
    if (filled) *filled = count;
    return WeightedDigraph(std::move(out));
}

inline WeightedDigraph scale_weights(const WeightedDigraph& w, double d)
{
    return WeightedDigraph(w.weights() * d);
}

}  // namespace netreduce
