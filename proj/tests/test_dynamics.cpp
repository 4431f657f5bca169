#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "netreduce/dynamics.hpp"
#include "netreduce/integrate.hpp"
#include "support.hpp"

using namespace netreduce;
using netreduce::testing::constant_blocks;
using netreduce::testing::random_positive;

TEST(EvalTerms, NeuronalMidpoint)
{
    const Neuronal n{0.3, 10.0};
    const Terms t = eval_f_g_g1(n, 2.0, 10.0);
    EXPECT_DOUBLE_EQ(t.g, 0.5);
    EXPECT_EQ(t.g1, 0.0);
    EXPECT_EQ(t.f, -2.0);
}

TEST(EvalTerms, Sis)
{
    const Sis s{1.7};
    const Terms t = eval_f_g_g1(s, 0.0, 1.0);
    EXPECT_DOUBLE_EQ(t.g, 1.7);
    EXPECT_EQ(t.f, 0.0);
    EXPECT_DOUBLE_EQ(eval_f_g_g1(s, 0.3, 0.5).g1, -1.7 * 0.5);
}

TEST(EvalTerms, EcologicalCapacityRoot)
{
    const Ecological e;
    EXPECT_NEAR(eval_f_g_g1(e, e.Kcap, 0.0).f, e.B, 1e-15);
    EXPECT_NEAR(eval_f_g_g1(e, e.C, 0.0).f, e.B, 1e-15);
}

TEST(EvalTerms, EcologicalDenominatorUnderflow)
{
    Ecological e;
    e.D = 1e-310;
    EXPECT_THROW(eval_f_g_g1(e, 0.0, 0.0), InvalidArgument);
}

TEST(Validate, RejectsBadParameters)
{
    EXPECT_THROW(validate(DynamicsSpec{Neuronal{0.0, 1.0}}), InvalidArgument);
    EXPECT_THROW(validate(DynamicsSpec{Sis{-1.0}}), InvalidArgument);
    Ecological e;
    e.C = 0.0;
    EXPECT_THROW(validate(DynamicsSpec{e}), InvalidArgument);
    e = Ecological{};
    e.E = -0.1;
    EXPECT_THROW(validate(DynamicsSpec{e}), InvalidArgument);
    EXPECT_NO_THROW(validate(DynamicsSpec{Ecological{}}));
}

TEST(EvalTerms, G1MatchesFiniteDifference)
{
    Rng rng(1);
    const double h = 1e-5;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const DynamicsSpec specs[] = {Neuronal{0.3, 10.0}, Sis{1.3}, Ecological{}};
    for (const auto& spec : specs) {
        for (int k = 0; k < 100; ++k) {
            double x = 0.0;
            double y = 0.0;
            if (std::holds_alternative<Ecological>(spec)) {
                x = 0.01 + 10.0 * u(rng);
                y = 10.0 * u(rng);
            } else if (std::holds_alternative<Sis>(spec)) {
                x = u(rng);
                y = 0.01 + u(rng);
            } else {
                x = 30.0 * u(rng);
                y = 30.0 * u(rng);
            }
            const double fd = (eval_f_g_g1(spec, x + h, y).g - eval_f_g_g1(spec, x - h, y).g) / (2.0 * h);
            const double g1 = eval_f_g_g1(spec, x, y).g1;
            if (g1 == 0.0)
                ASSERT_LT(std::abs(fd), 1e-12);
            else
                ASSERT_LT(std::abs(fd - g1) / std::abs(g1), 1e-6) << dynamics_name(spec) << " x=" << x << " y=" << y;
        }
    }
}

TEST(FullRhs, ZeroMatrixNeuronalDecays)
{
    const WeightedDigraph w(Matrix::Zero(3, 3));
    const Vector x = (Vector(3) << 1, -2, 3).finished();
    EXPECT_EQ(full_rhs(Neuronal{}, w, x), -x);
}

TEST(FullRhs, SisDiseaseFreePoint)
{
    Rng rng(2);
    const WeightedDigraph w(random_positive(rng, 5, 5));
    EXPECT_EQ(full_rhs(Sis{}, w, Vector::Zero(5)), Vector::Zero(5));
}

TEST(FullRhs, SisHandArithmetic)
{
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    const Vector dx = full_rhs(Sis{1.0}, WeightedDigraph(m), Vector::Constant(2, 0.5));
    EXPECT_DOUBLE_EQ(dx(0), -0.25);
    EXPECT_DOUBLE_EQ(dx(1), -0.5);
}

TEST(FullRhs, MatchesGenericSumForEveryModel)
{
    Rng rng(3);
    const Matrix m = random_positive(rng, 6, 6);
    const WeightedDigraph w(m);
    const Vector x = random_positive(rng, 6, 1, 0.0, 1.0);
    const DynamicsSpec specs[] = {Neuronal{0.5, 0.3}, Sis{0.8}, Ecological{}};
    for (const auto& spec : specs) {
        const Vector fast = full_rhs(spec, w, x);
        for (Index i = 0; i < 6; ++i) {
            double s = eval_f_g_g1(spec, x(i), 0.0).f;
            for (Index j = 0; j < 6; ++j) s += m(i, j) * eval_f_g_g1(spec, x(i), x(j)).g;
            EXPECT_NEAR(fast(i), s, 1e-13) << dynamics_name(spec);
        }
    }
}

TEST(FullRhs, Errors)
{
    const WeightedDigraph w(Matrix::Ones(2, 2));
    EXPECT_THROW(full_rhs(Sis{}, w, Vector::Zero(3)), InvalidArgument);
    EXPECT_THROW(full_rhs(Sis{}, w, Vector::Constant(2, std::nan(""))), InvalidArgument);
}

TEST(FullRhs, SisKeepsUnitBoxInvariant)
{
    Rng rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const WeightedDigraph w(random_positive(rng, 5, 5, 0.0, 2.0));
        Vector x(5);
        for (Index i = 0; i < 5; ++i) x(i) = u(rng);
        x(0) = 0.0;
        x(1) = 1.0;
        const Vector dx = full_rhs(Sis{1.0}, w, x);
        ASSERT_GE(dx(0), 0.0);
        ASSERT_LE(dx(1), 0.0);
    }
}

TEST(ReducedRhs, CorrectionVanishesWhenMuEqualsWred)
{
    ReducedSystem r;
    r.w_reduced = (Matrix(2, 2) << 1, 2, 3, 4).finished();
    r.mu = r.w_reduced;
    r.lambda = r.w_reduced;
    r.sizes = {1, 1};
    r.n_nodes = 2;
    const Vector x = (Vector(2) << 0.2, 0.7).finished();
    const Vector dx = reduced_rhs(Sis{}, r, x);
    for (int nu = 0; nu < 2; ++nu) {
        double s = -x(nu);
        for (int rho = 0; rho < 2; ++rho) s += r.w_reduced(nu, rho) * (1.0 - x(nu)) * x(rho);
        EXPECT_NEAR(dx(nu), s, 1e-15);
    }
}

TEST(ReducedRhs, NeuronalIgnoresMu)
{
    ReducedSystem r;
    r.w_reduced = Matrix::Constant(1, 1, 2.0);
    r.mu = Matrix::Constant(1, 1, 100.0);
    r.sizes = {3};
    const Vector x = Vector::Constant(1, 4.0);
    ReducedSystem plain = r;
    plain.mu = plain.w_reduced;
    EXPECT_EQ(reduced_rhs(Neuronal{}, r, x), reduced_rhs(Neuronal{}, plain, x));
}

TEST(ReducedRhs, SisHandArithmetic)
{
    ReducedSystem r;
    r.w_reduced = Matrix::Constant(1, 1, 2.0);
    r.mu = Matrix::Constant(1, 1, 2.0);
    r.sizes = {1};
    EXPECT_DOUBLE_EQ(reduced_rhs(Sis{1.0}, r, Vector::Constant(1, 0.25))(0), 0.125);
    EXPECT_THROW(reduced_rhs(Sis{1.0}, r, Vector::Zero(2)), InvalidArgument);
}

TEST(ReducedRhs, ExactClosureOnConstantBlocks)
{
    // On constant-block networks the projected full derivative equals the
    // reduced derivative at the projected state, for states constant on groups.
    const std::vector<Index> sizes{3, 4};
    const Matrix c = (Matrix(2, 2) << 0.3, 0.05, 0.1, 0.6).finished();
    const WeightedDigraph w(constant_blocks(sizes, c));
    const Partition p = Partition::from_sizes(sizes);
    const Reduction red = spectral_reduce(w, p, SpectralMode::restricted);
    const DynamicsSpec specs[] = {Neuronal{0.3, 1.0}, Sis{1.0}, Ecological{}};
    for (const auto& spec : specs) {
        Vector x(7);
        x << 0.2, 0.2, 0.2, 0.6, 0.6, 0.6, 0.6;
        const Vector lhs = project_observables(red.vectors, full_rhs(spec, w, x));
        const Vector rhs = reduced_rhs(spec, red.system, project_observables(red.vectors, x));
        EXPECT_TRUE(lhs.isApprox(rhs, 1e-10)) << dynamics_name(spec);
    }
}

TEST(ReducedRhs, SisClosureAlongTrajectory)
{
    // The SIS coupling is bilinear, so on constant blocks the closure holds
    // for any state, not only for states that are constant on groups.
    const std::vector<Index> sizes{4, 6};
    const Matrix c = (Matrix(2, 2) << 0.3, 0.05, 0.1, 0.6).finished();
    const WeightedDigraph w(constant_blocks(sizes, c));
    const Reduction red = spectral_reduce(w, Partition::from_sizes(sizes), SpectralMode::restricted);
    const DynamicsSpec spec = Sis{3.0};
    Rng rng(5);
    const Vector x0 = random_positive(rng, 10, 1, 0.05, 0.9);
    double worst = 0.0;
    TrajectoryObserver obs{[&](double, const Vector& x) {
                               const Vector lhs = project_observables(red.vectors, full_rhs(spec, w, x));
                               const Vector rhs =
                                   reduced_rhs(spec, red.system, project_observables(red.vectors, x));
                               worst = std::max(worst, (lhs - rhs).lpNorm<Eigen::Infinity>());
                           },
                           10};
    IntegratorSettings s;
    s.t_max = 20.0;
    integrate_to_equilibrium([&](const Vector& x) { return full_rhs(spec, w, x); }, x0, s, &obs);
    EXPECT_LT(worst, 1e-12);
}

TEST(ReducedRhs, SynchronizedTrajectoriesAgree)
{
    const std::vector<Index> sizes{4, 6};
    const Matrix c = (Matrix(2, 2) << 0.3, 0.05, 0.1, 0.6).finished();
    const WeightedDigraph w(constant_blocks(sizes, c));
    const Reduction red = spectral_reduce(w, Partition::from_sizes(sizes), SpectralMode::restricted);
    const DynamicsSpec specs[] = {Neuronal{0.3, 1.0}, Sis{2.0}, Ecological{}};
    for (const auto& spec : specs) {
        Vector x0(10);
        x0.head(4).setConstant(0.3);
        x0.tail(6).setConstant(0.8);
        IntegratorSettings s;
        s.t_max = 50.0;
        auto clip = [&](Vector& x) { clip_state(spec, x); };
        const auto full = integrate_to_equilibrium([&](const Vector& x) { return full_rhs(spec, w, x); }, clip, x0, s);
        const auto reduced = integrate_to_equilibrium(
            [&](const Vector& x) { return reduced_rhs(spec, red.system, x); }, clip,
            project_observables(red.vectors, x0), s);
        EXPECT_TRUE(project_observables(red.vectors, full.state).isApprox(reduced.state, 1e-9)) << dynamics_name(spec);
    }
}

TEST(GaoRhs, Formula)
{
    EXPECT_DOUBLE_EQ(gao_rhs(Sis{1.0}, 2.0, 0.25), -0.25 + 2.0 * 0.75 * 0.25);
}

TEST(ClipState, Domains)
{
    Vector x = (Vector(3) << -0.5, 0.5, 1.5).finished();
    Vector a = x;
    clip_state(Sis{}, a);
    EXPECT_EQ(a, (Vector(3) << 0.0, 0.5, 1.0).finished());
    Vector b = x;
    clip_state(Ecological{}, b);
    EXPECT_EQ(b, (Vector(3) << 0.0, 0.5, 1.5).finished());
    Vector n = x;
    clip_state(Neuronal{}, n);
    EXPECT_EQ(n, x);
}
