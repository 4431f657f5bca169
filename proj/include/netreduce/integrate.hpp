#pragma once

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <utility>

#include "netreduce/error.hpp"
#include "netreduce/graph.hpp"

namespace netreduce {

struct IntegratorSettings {
    double dt = 0.01;
    double tol = 1e-8;     // on ||dx/dt||_inf
    double t_max = 2000.0;
};

struct EquilibriumResult {
    Vector state;
    bool converged = false;
    double residual = 0.0;  // ||dx/dt||_inf at termination
    double elapsed_time = 0.0;
    long steps = 0;
};

inline void validate(const IntegratorSettings& s)
{
    if (!(s.dt > 0.0)) throw InvalidArgument("integrator dt must be > 0");
    if (!(s.tol > 0.0)) throw InvalidArgument("integrator tol must be > 0");
    if (!(s.t_max > s.dt)) throw InvalidArgument("integrator t_max must exceed dt");
}

/// Called with (t, x) every `stride` steps, including step 0.
struct TrajectoryObserver {
    std::function<void(double, const Vector&)> callback;
    long stride = 1;
};

/// Classic fixed-step RK4 until ||rhs(x)||_inf < tol or t reaches t_max.
/// `clip` projects the state onto the admissible domain after every step.
template <class Rhs, class Clip>
EquilibriumResult integrate_to_equilibrium(Rhs&& rhs, Clip&& clip, Vector x0,
                                           const IntegratorSettings& s,
                                           const TrajectoryObserver* observer = nullptr)
{
    validate(s);
    EquilibriumResult res;
    Vector x = std::move(x0);
    if (!x.allFinite()) throw DivergenceError("non-finite initial state", 0);

    const double dt = s.dt;
    const long max_steps = static_cast<long>(std::floor(s.t_max / dt + 1e-9));
    Vector k1 = rhs(x);
    long step = 0;
    for (;;) {
        if (observer && observer->callback && step % observer->stride == 0)
            observer->callback(static_cast<double>(step) * dt, x);
        res.residual = k1.template lpNorm<Eigen::Infinity>();
        if (res.residual < s.tol) {
            res.converged = true;
            break;
        }
        if (step >= max_steps) break;

        const Vector k2 = rhs(x + 0.5 * dt * k1);
        const Vector k3 = rhs(x + 0.5 * dt * k2);
        const Vector k4 = rhs(x + dt * k3);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        clip(x);
        ++step;
        if (!x.allFinite())
            throw DivergenceError("integration diverged at step " + std::to_string(step), step);
        k1 = rhs(x);
        if (!k1.allFinite())
            throw DivergenceError("non-finite derivative at step " + std::to_string(step), step);
    }
    res.state = std::move(x);
    res.steps = step;
    res.elapsed_time = static_cast<double>(step) * dt;
    return res;
}

template <class Rhs>
EquilibriumResult integrate_to_equilibrium(Rhs&& rhs, Vector x0, const IntegratorSettings& s,
                                           const TrajectoryObserver* observer = nullptr)
{
    return integrate_to_equilibrium(std::forward<Rhs>(rhs), [](Vector&) {}, std::move(x0), s,
                                    observer);
}

/// Observer writing `t,x_1,...` CSV rows (header written on construction).
inline TrajectoryObserver csv_trajectory(std::ostream& os, Index dim, long stride)
{
    os << 't';
    for (Index i = 1; i <= dim; ++i) os << ",x_" << i;
    os << '\n';
    os.precision(17);
    return {[&os](double t, const Vector& x) {
                os << t;
                for (Index i = 0; i < x.size(); ++i) os << ',' << x(i);
                os << '\n';
            },
            stride};
}

}  // namespace netreduce
