#pragma once

// Node dynamics  dx_i/dt = f(x_i) + sum_j w_ij g(x_i, x_j)  for the neuronal
// (Hopfield), mean-field SIS and mutualistic ecological models, and the
// right-hand side of the corrected reduced system
//
//   dX_nu/dt = f(X_nu) + sum_rho Wred_{nu rho} g(X_nu, X_rho)
//            + sum_rho (mu_{nu rho} - Wred_{nu rho}) g1(X_nu, X_rho) X_nu.

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>

#include "netreduce/error.hpp"
#include "netreduce/graph.hpp"
#include "netreduce/reduction.hpp"

namespace netreduce {

struct Neuronal {
    double tau = 0.3;
    double mu_loc = 10.0;
};

struct Sis {
    double gamma = 1.0;
};

struct Ecological {
    double B = 0.1;
    double C = 1.0;
    double Kcap = 5.0;
    double D = 6.0;
    double E = 0.9;
    double H = 0.1;
};

using DynamicsSpec = std::variant<Neuronal, Sis, Ecological>;

inline const char* dynamics_name(const DynamicsSpec& spec)
{
    struct {
        const char* operator()(const Neuronal&) const { return "neuronal"; }
        const char* operator()(const Sis&) const { return "sis"; }
        const char* operator()(const Ecological&) const { return "ecological"; }
    } v;
    return std::visit(v, spec);
}

inline void validate(const DynamicsSpec& spec)
{
    if (const auto* n = std::get_if<Neuronal>(&spec)) {
        if (!(n->tau > 0.0)) throw InvalidArgument("neuronal tau must be > 0");
    } else if (const auto* s = std::get_if<Sis>(&spec)) {
        if (!(s->gamma >= 0.0)) throw InvalidArgument("sis gamma must be >= 0");
    } else {
        const auto& e = std::get<Ecological>(spec);
        if (!(e.C > 0.0)) throw InvalidArgument("ecological C must be > 0");
        if (!(e.Kcap > 0.0)) throw InvalidArgument("ecological Kcap must be > 0");
        if (!(e.D > 0.0)) throw InvalidArgument("ecological D must be > 0");
        if (!(e.E >= 0.0) || !(e.H >= 0.0)) throw InvalidArgument("ecological E and H must be >= 0");
    }
}

/// f(x), g(x, y) and g1(x, y) = dg/dx.
struct Terms {
    double f;
    double g;
    double g1;
};

inline Terms eval_f_g_g1(const DynamicsSpec& spec, double x, double y)
{
    if (const auto* n = std::get_if<Neuronal>(&spec)) {
        return {-x, 1.0 / (1.0 + std::exp(-n->tau * (y - n->mu_loc))), 0.0};
    }
    if (const auto* s = std::get_if<Sis>(&spec)) {
        return {-x, s->gamma * (1.0 - x) * y, -s->gamma * y};
    }
    const auto& e = std::get<Ecological>(spec);
    const double den = e.D + e.E * x + e.H * y;
    if (!(den > 1e-300)) throw InvalidArgument("ecological coupling denominator underflow");
    return {e.B + x * (1.0 - x / e.Kcap) * (x / e.C - 1.0), x * y / den,
            y * (e.D + e.H * y) / (den * den)};
}

/// Projects a state onto the admissible domain: SIS probabilities into
/// [0, 1], ecological abundances to >= 0.
inline void clip_state(const DynamicsSpec& spec, Vector& x)
{
    if (std::holds_alternative<Sis>(spec))
        x = x.cwiseMax(0.0).cwiseMin(1.0);
    else if (std::holds_alternative<Ecological>(spec))
        x = x.cwiseMax(0.0);
}

inline Vector full_rhs(const DynamicsSpec& spec, const WeightedDigraph& w, const Vector& x)
{
    const Matrix& wm = w.weights();
    if (x.size() != wm.rows()) throw InvalidArgument("state length does not match the network");
    if (!x.allFinite()) throw InvalidArgument("non-finite state");

    if (const auto* n = std::get_if<Neuronal>(&spec)) {
        const Vector gy = (1.0 + (-n->tau * (x.array() - n->mu_loc)).exp()).inverse().matrix();
        return -x + wm * gy;
    }
    if (const auto* s = std::get_if<Sis>(&spec)) {
        const Vector wx = wm * x;
        return (-x.array() + s->gamma * (1.0 - x.array()) * wx.array()).matrix();
    }
    const auto& e = std::get<Ecological>(spec);
    const Index n = x.size();
    Vector out(n);
    for (Index i = 0; i < n; ++i) {
        const double xi = x(i);
        const double base = e.D + e.E * xi;
        double coupling = 0.0;
        for (Index j = 0; j < n; ++j) coupling += wm(i, j) * x(j) / (base + e.H * x(j));
        out(i) = e.B + xi * (1.0 - xi / e.Kcap) * (xi / e.C - 1.0) + xi * coupling;
    }
    return out;
}

inline Vector reduced_rhs(const DynamicsSpec& spec, const ReducedSystem& r, const Vector& x)
{
    const int n = r.n_groups();
    if (x.size() != n) throw InvalidArgument("reduced state length does not match the system");
    Vector out(n);
    for (int nu = 0; nu < n; ++nu) {
        double acc = eval_f_g_g1(spec, x(nu), x(nu)).f;
        for (int rho = 0; rho < n; ++rho) {
            const Terms t = eval_f_g_g1(spec, x(nu), x(rho));
            acc += r.w_reduced(nu, rho) * t.g + (r.mu(nu, rho) - r.w_reduced(nu, rho)) * t.g1 * x(nu);
        }
        out(nu) = acc;
    }
    return out;
}

/// dx/dt = f(x) + beta g(x, x) for the one-observable degree-based reduction.
inline double gao_rhs(const DynamicsSpec& spec, double beta_eff, double x)
{
    const Terms t = eval_f_g_g1(spec, x, x);
    return t.f + beta_eff * t.g;
}

}  // namespace netreduce
