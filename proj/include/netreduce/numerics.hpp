#pragma once

// Numerical kernels of the spectral reduction: Perron eigenpairs of positive
// matrices and the sum-constrained least-squares problem
//
//     minimize  E(a) = sum_j || M_j a - lambda_j a ||^2   s.t.  sum_i a_i = 1,
//
// restricted to a = sum_s x_s u_s for a basis of sum-1 vectors u_s. The
// Lagrange conditions give the bordered system
//
//     [ C   -1 ] [ x ]   [ 0 ]
//     [ 1^T  0 ] [ K ] = [ 1 ],   c_st = sum_j <(M_j - lambda_j) u_s, (M_j - lambda_j) u_t>,
//
// and the multiplier K equals the attained error.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netreduce/error.hpp"
#include "netreduce/graph.hpp"

namespace netreduce {

struct EigenPair {
    double value = 0.0;
    Vector vector;  // components sum to 1
    double residual = 0.0;  // ||M v - value v||_2
    int iterations = 0;
    std::vector<double> residual_history;
};

struct PowerIterationOptions {
    /// Convergence when ||M v - lambda v||_2 < tol * max(1, lambda).
    double tol = 1e-12;
    int max_iter = 100000;
    /// Power steps before switching to Noda iteration. Nearly reducible
    /// matrices (|lambda_2 / lambda_1| close to 1) stall plain power
    /// iteration.
    int power_budget = 2000;
};

inline EigenPair dominant_eigenpair(const Matrix& m, PowerIterationOptions opts = {})
{
    if (m.rows() != m.cols() || m.rows() == 0)
        throw InvalidArgument("dominant_eigenpair needs a non-empty square matrix");
    if (!(opts.tol > 0.0)) throw InvalidArgument("tolerance must be positive");
    if (!(m.array() > 0.0).all())
        throw InvalidArgument("dominant_eigenpair needs a strictly positive matrix");

    const Index dim = m.rows();
    EigenPair out;
    Vector v = Vector::Constant(dim, 1.0 / static_cast<double>(dim));
    Vector y(dim);
    auto check = [&](int it) {
        y.noalias() = m * v;
        const double lambda = y.sum();
        const double residual = (y - lambda * v).norm();
        out.residual_history.push_back(residual);
        if (residual < opts.tol * std::max(1.0, lambda)) {
            out.value = lambda;
            out.vector = v;
            out.residual = residual;
            out.iterations = it;
            return true;
        }
        return false;
    };

    int it = 0;
    const int power_steps = std::min(opts.max_iter, opts.power_budget);
    for (; it <= power_steps; ++it) {
        if (check(it)) return out;
        v = y / y.sum();
    }

    // Noda iteration: shift by the Collatz-Wielandt upper bound
    // max_i (Mv)_i / v_i >= lambda_1 and solve (shift I - M) z = v. For
    // shift > lambda_1 the inverse is a positive matrix, so iterates stay
    // positive, and the shift decreases to lambda_1 superlinearly.
    for (; it <= opts.max_iter; ++it) {
        y.noalias() = m * v;
        double shift = (y.array() / v.array()).maxCoeff();
        shift += 4.0 * std::numeric_limits<double>::epsilon() * shift;
        Matrix a = -m;
        a.diagonal().array() += shift;
        Vector z = a.partialPivLu().solve(v);
        if (!z.allFinite() || z.sum() <= 0.0) break;
        v = z / z.sum();
        if (check(it)) return out;
    }
    throw ConvergenceError("dominant eigenpair did not converge in " +
                               std::to_string(opts.max_iter) + " iterations (residual " +
                               std::to_string(out.residual_history.back()) + ")",
                           out.residual_history.back());
}

/// Sum over j of || M_j a - lambda_j a ||^2.
inline double quadratic_error(std::span<const Matrix> matrices, std::span<const double> lambdas,
                              const Vector& a)
{
    if (matrices.size() != lambdas.size())
        throw InvalidArgument("one eigenvalue is needed per matrix");
    double e = 0.0;
    for (std::size_t j = 0; j < matrices.size(); ++j) {
        if (matrices[j].cols() != a.size()) throw InvalidArgument("vector/matrix size mismatch");
        e += (matrices[j] * a - lambdas[j] * a).squaredNorm();
    }
    return e;
}

struct LsqSolution {
    Vector coefficients;  // x, sums to 1
    Vector vector;        // a(x) = sum_s x_s u_s
    double multiplier = 0.0;  // K
    double error = 0.0;       // E(a(x)) evaluated directly
    Index basis_dim = 0;
    bool singular = false;  // bordered system was solved in the least-squares sense
};

namespace detail {

// Gaussian elimination with partial pivoting. Returns false when a pivot
// falls below pivot_tol, leaving x unspecified.
inline bool solve_partial_pivot(Matrix a, Vector b, Vector& x, double pivot_tol)
{
    const Index n = a.rows();
    for (Index k = 0; k < n; ++k) {
        Index piv = k;
        for (Index i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (std::abs(a(piv, k)) < pivot_tol) return false;
        if (piv != k) {
            a.row(k).swap(a.row(piv));
            std::swap(b(k), b(piv));
        }
        for (Index i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0) continue;
            a.row(i).tail(n - k) -= f * a.row(k).tail(n - k);
            b(i) -= f * b(k);
        }
    }
    x.resize(n);
    for (Index i = n - 1; i >= 0; --i) {
        double s = b(i);
        for (Index j = i + 1; j < n; ++j) s -= a(i, j) * x(j);
        x(i) = s / a(i, i);
    }
    return true;
}

}  // namespace detail

inline constexpr double kPivotTolerance = 1e-13;

inline LsqSolution constrained_lsq(std::span<const Matrix> matrices, std::span<const double> lambdas,
                                   std::span<const Vector> basis)
{
    if (matrices.empty()) throw InvalidArgument("constrained_lsq needs at least one matrix");
    if (matrices.size() != lambdas.size())
        throw InvalidArgument("one eigenvalue is needed per matrix");
    const Index dim = matrices[0].rows();
    for (const auto& mj : matrices)
        if (mj.rows() != dim || mj.cols() != dim)
            throw InvalidArgument("all matrices must be square with the same dimension");
    const auto r = static_cast<Index>(basis.size());
    if (r == 0 || r > dim) throw InvalidArgument("basis size must be in [1, dimension]");

    Matrix u(dim, r);
    for (Index s = 0; s < r; ++s) {
        const Vector& us = basis[static_cast<std::size_t>(s)];
        if (us.size() != dim) throw InvalidArgument("basis vector has the wrong dimension");
        if (std::abs(us.sum() - 1.0) > 1e-10) throw InvalidArgument("basis vectors must sum to 1");
        u.col(s) = us;
    }

    Matrix c = Matrix::Zero(r, r);
    for (std::size_t j = 0; j < matrices.size(); ++j) {
        const Matrix rj = matrices[j] * u - lambdas[j] * u;
        c.noalias() += rj.transpose() * rj;
    }

    // C is rescaled to unit magnitude so the pivot tolerance is meaningful;
    // x is unchanged and K scales back.
    const double scale = std::max(c.cwiseAbs().maxCoeff(), 1e-300);
    Matrix bordered = Matrix::Zero(r + 1, r + 1);
    bordered.topLeftCorner(r, r) = c / scale;
    bordered.col(r).head(r).setConstant(-1.0);
    bordered.row(r).head(r).setConstant(1.0);
    Vector rhs = Vector::Zero(r + 1);
    rhs(r) = 1.0;

    LsqSolution sol;
    Vector y;
    if (!detail::solve_partial_pivot(bordered, rhs, y, kPivotTolerance)) {
        y = bordered.completeOrthogonalDecomposition().solve(rhs);
        if ((bordered * y - rhs).norm() > 1e-8)
            throw SingularSystem("bordered least-squares system is singular and inconsistent "
                                 "(degenerate basis)");
        sol.singular = true;
    }
    sol.coefficients = y.head(r);
    sol.multiplier = y(r) * scale;
    sol.vector = u * sol.coefficients;
    sol.error = quadratic_error(matrices, lambdas, sol.vector);
    sol.basis_dim = r;
    return sol;
}

/// The scalar mu minimizing || K a - mu a ||^2 for diagonal K:
/// mu = a^T K a / ||a||^2.
inline double rayleigh_mu(const Vector& degree_diag, const Vector& a_hat)
{
    if (degree_diag.size() != a_hat.size())
        throw InvalidArgument("rayleigh_mu: size mismatch");
    const double norm2 = a_hat.squaredNorm();
    if (norm2 == 0.0) throw InvalidArgument("rayleigh_mu: zero vector");
    return (a_hat.array().square() * degree_diag.array()).sum() / norm2;
}

}  // namespace netreduce
