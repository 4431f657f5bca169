#include <gtest/gtest.h>

#include <limits>

#include "netreduce/graph.hpp"
#include "support.hpp"

using namespace netreduce;
using netreduce::testing::random_partition;
using netreduce::testing::random_nonnegative;

namespace {

// W[i][j] = 4 i + j on four nodes (0-based).
Matrix index_matrix()
{
    Matrix w(4, 4);
    for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j) w(i, j) = static_cast<double>(4 * i + j);
    return w;
}

Matrix reassemble(const BlockView& b)
{
    Index n = 0;
    for (Index s : b.sizes) n += s;
    Matrix out(n, n);
    Index r0 = 0;
    for (int nu = 0; nu < b.n_groups; ++nu) {
        Index c0 = 0;
        for (int rho = 0; rho < b.n_groups; ++rho) {
            out.block(r0, c0, b.sizes[nu], b.sizes[rho]) = b.block(nu, rho);
            c0 += b.sizes[rho];
        }
        r0 += b.sizes[nu];
    }
    return out;
}

}  // namespace

TEST(WeightedDigraph, RejectsInvalidMatrices)
{
    EXPECT_THROW(WeightedDigraph(Matrix(2, 3)), InvalidArgument);
    EXPECT_THROW(WeightedDigraph(Matrix(0, 0)), InvalidArgument);
    Matrix m = Matrix::Ones(2, 2);
    m(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(WeightedDigraph{m}, InvalidArgument);
}

TEST(WeightedDigraph, DegreesFollowIncomingConvention)
{
    Matrix m = Matrix::Zero(3, 3);
    m(1, 0) = 2.0;  // edge 0 -> 1
    const WeightedDigraph w(m);
    EXPECT_EQ(w.in_degrees()(1), 2.0);
    EXPECT_EQ(w.out_degrees()(0), 2.0);
    EXPECT_EQ(w.in_degrees()(0), 0.0);
}

TEST(Partition, ValidatesLabels)
{
    EXPECT_THROW(Partition(std::vector<int>{}), InvalidArgument);
    EXPECT_THROW(Partition(std::vector<int>{0, 2}), InvalidArgument);
    EXPECT_THROW(Partition(std::vector<int>{0, -1}), InvalidArgument);
    const Partition p({1, 0, 1});
    EXPECT_EQ(p.n_groups(), 2);
    EXPECT_EQ(p.size(1), 2);
    EXPECT_FALSE(p.is_canonical());
    EXPECT_EQ(p.members(1), (std::vector<Index>{0, 2}));
}

TEST(Partition, FromSizesIsCanonical)
{
    const Partition p = Partition::from_sizes({2, 3, 1});
    EXPECT_TRUE(p.is_canonical());
    EXPECT_EQ(p.offsets(), (std::vector<Index>{0, 2, 5}));
    EXPECT_EQ(p.n_nodes(), 6);
}

TEST(BlockDecompose, UniformMatrix)
{
    const WeightedDigraph w(Matrix::Ones(4, 4));
    const BlockView b = block_decompose(w, Partition::from_sizes({2, 2}));
    for (int nu = 0; nu < 2; ++nu)
        for (int rho = 0; rho < 2; ++rho) {
            EXPECT_EQ(b.block(nu, rho), Matrix::Ones(2, 2));
            EXPECT_EQ(b.degrees(nu, rho), Vector::Constant(2, 2.0));
        }
}

TEST(BlockDecompose, SingleGroupIsIdentity)
{
    const WeightedDigraph w(index_matrix());
    const BlockView b = block_decompose(w, Partition::single_group(4));
    EXPECT_EQ(b.block(0, 0), w.weights());
    EXPECT_EQ(b.degrees(0, 0), w.in_degrees());
}

TEST(BlockDecompose, IndexMatrixBlocks)
{
    const WeightedDigraph w(index_matrix());
    const Partition p = Partition::from_sizes({2, 2});
    const BlockView b = block_decompose(w, p);
    Matrix expected(2, 2);
    expected << 8, 9, 12, 13;
    EXPECT_EQ(b.block(1, 0), expected);
    EXPECT_EQ(b.degrees(1, 0), (Vector(2) << 17, 25).finished());

    // Slicing oracle over every (nu, rho, i, j).
    const auto off = p.offsets();
    for (int nu = 0; nu < 2; ++nu)
        for (int rho = 0; rho < 2; ++rho)
            for (Index i = 0; i < 2; ++i) {
                double row = 0.0;
                for (Index j = 0; j < 2; ++j) {
                    const double v = static_cast<double>(4 * (off[nu] + i) + off[rho] + j);
                    EXPECT_EQ(b.block(nu, rho)(i, j), v);
                    row += v;
                }
                EXPECT_EQ(b.degrees(nu, rho)(i), row);
            }
}

TEST(BlockDecompose, Errors)
{
    const WeightedDigraph w(index_matrix());
    EXPECT_THROW(block_decompose(w, Partition({0, 1, 0, 1})), InvalidArgument);
    EXPECT_THROW(block_decompose(w, Partition::from_sizes({2, 3})), InvalidArgument);
}

TEST(Canonicalize, AlreadyCanonical)
{
    const WeightedDigraph w(index_matrix());
    const Canonical c = canonicalize(w, Partition::from_sizes({1, 3}));
    EXPECT_EQ(c.permutation, (std::vector<Index>{0, 1, 2, 3}));
    EXPECT_EQ(c.graph, w);
}

TEST(Canonicalize, Interleaved)
{
    const WeightedDigraph w(index_matrix());
    const Canonical c = canonicalize(w, Partition({0, 1, 0, 1}));
    EXPECT_EQ(c.permutation, (std::vector<Index>{0, 2, 1, 3}));
    EXPECT_TRUE(c.partition.is_canonical());
    EXPECT_EQ(c.graph(1, 2), w(2, 1));
}

TEST(Canonicalize, ReversedMembershipReassembles)
{
    const WeightedDigraph w(index_matrix());
    const Canonical c = canonicalize(w, Partition({1, 1, 0, 0}));
    EXPECT_EQ(c.permutation, (std::vector<Index>{2, 3, 0, 1}));
    Matrix conj(4, 4);
    for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j) conj(i, j) = w(c.original_node(i), c.original_node(j));
    EXPECT_EQ(reassemble(block_decompose(c.graph, c.partition)), conj);
}

TEST(Positify, Examples)
{
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    Index filled = 0;
    const WeightedDigraph p = positify(WeightedDigraph(m), 1e-6, &filled);
    EXPECT_EQ(filled, 2);
    EXPECT_EQ(p(0, 0), 1e-6);
    EXPECT_EQ(p(0, 1), 1.0);

    const WeightedDigraph pos(Matrix::Constant(3, 3, 0.5));
    EXPECT_EQ(positify(pos, 1e-3), pos);
}

TEST(Positify, RejectsNegativeAndBadEpsilon)
{
    Matrix m = Matrix::Ones(2, 2);
    m(1, 0) = -1.0;
    EXPECT_THROW(positify(WeightedDigraph(m)), InvalidArgument);
    EXPECT_THROW(positify(WeightedDigraph(Matrix::Ones(2, 2)), 0.0), InvalidArgument);
}

TEST(ScaleWeights, Examples)
{
    const WeightedDigraph ones(Matrix::Ones(3, 3));
    EXPECT_EQ(scale_weights(ones, 0.0).weights(), Matrix::Zero(3, 3));
    EXPECT_EQ(scale_weights(ones, 2.0).in_degrees(), Vector::Constant(3, 6.0));
    EXPECT_EQ(scale_weights(ones, 1.0), ones);
}

TEST(GraphProperties, ReassemblyAndDegreeConsistency)
{
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = netreduce::testing::uniform_int(rng, 1, 12);
        const int groups = netreduce::testing::uniform_int(rng, 1, static_cast<int>(n));
        const WeightedDigraph w(random_nonnegative(rng, n, 0.4));
        const Partition p = random_partition(rng, n, groups);
        const Canonical c = canonicalize(w, p);
        const BlockView b = block_decompose(c.graph, c.partition);
        ASSERT_EQ(reassemble(b), c.graph.weights());

        const Vector k = c.graph.in_degrees();
        const auto off = c.partition.offsets();
        for (int nu = 0; nu < b.n_groups; ++nu)
            for (Index i = 0; i < b.sizes[nu]; ++i) {
                double s = 0.0;
                for (int rho = 0; rho < b.n_groups; ++rho) s += b.degrees(nu, rho)(i);
                ASSERT_NEAR(s, k(off[nu] + i), 1e-12 * (1.0 + k(off[nu] + i)));
            }
    }
}

TEST(GraphProperties, PositifyIdempotent)
{
    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const WeightedDigraph w(random_nonnegative(rng, 6, 0.3));
        const WeightedDigraph once = positify(w, 1e-4);
        EXPECT_TRUE(once.strictly_positive());
        EXPECT_EQ(positify(once, 1e-4), once);
    }
}

TEST(GraphProperties, ScaleIsLinearBlockwise)
{
    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = netreduce::testing::uniform_int(rng, 2, 10);
        const WeightedDigraph w(random_nonnegative(rng, n, 0.5));
        const Partition p = Partition::from_sizes({1, n - 1});
        const double d = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
        const BlockView a = block_decompose(scale_weights(w, d), p);
        const BlockView b = block_decompose(w, p);
        for (std::size_t k = 0; k < a.blocks.size(); ++k) {
            EXPECT_TRUE(a.blocks[k].isApprox(d * b.blocks[k], 1e-14) || d == 0.0);
            EXPECT_TRUE(a.degree_blocks[k].isApprox(d * b.degree_blocks[k], 1e-14) || d == 0.0);
        }
    }
}
