#pragma once

// Random instance generators for property tests.

#include <random>
#include <vector>

#include "netreduce/graph.hpp"
#include "netreduce/netgen.hpp"

namespace netreduce::testing {

inline Matrix random_positive(Rng& rng, Index rows, Index cols, double lo = 0.1, double hi = 1.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = u(rng);
    return m;
}

inline Matrix random_nonnegative(Rng& rng, Index n, double density)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix m = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (u(rng) < density) m(i, j) = 0.5 + u(rng);
    return m;
}

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// Random partition with every group non-empty, labels shuffled over nodes.
inline Partition random_partition(Rng& rng, Index n_nodes, int n_groups)
{
    std::vector<int> a(static_cast<std::size_t>(n_nodes));
    for (Index i = 0; i < n_nodes; ++i) a[static_cast<std::size_t>(i)] = static_cast<int>(i % n_groups);
    std::shuffle(a.begin(), a.end(), rng);
    return Partition(std::move(a));
}

/// Canonical partition with random group sizes, each at least min_size.
inline Partition random_canonical(Rng& rng, int n_groups, int min_size, int max_size)
{
    std::vector<Index> sizes;
    for (int g = 0; g < n_groups; ++g) sizes.push_back(uniform_int(rng, min_size, max_size));
    return Partition::from_sizes(sizes);
}

/// Matrix whose block (nu, rho) is the constant c(nu, rho).
inline Matrix constant_blocks(const std::vector<Index>& sizes, const Matrix& c)
{
    Index n = 0;
    for (Index s : sizes) n += s;
    Matrix m(n, n);
    Index r0 = 0;
    for (std::size_t nu = 0; nu < sizes.size(); ++nu) {
        Index c0 = 0;
        for (std::size_t rho = 0; rho < sizes.size(); ++rho) {
            m.block(r0, c0, sizes[nu], sizes[rho]).setConstant(c(static_cast<Index>(nu), static_cast<Index>(rho)));
            c0 += sizes[rho];
        }
        r0 += sizes[nu];
    }
    return m;
}

/// Sum-1 vector with entries uniform in (0, 1] before normalization.
inline Vector random_simplex(Rng& rng, Index n)
{
    std::uniform_real_distribution<double> u(0.01, 1.0);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = u(rng);
    return v / v.sum();
}

}  // namespace netreduce::testing
