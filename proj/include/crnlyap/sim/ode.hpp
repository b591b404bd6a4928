#ifndef CRNLYAP_SIM_ODE_HPP
#define CRNLYAP_SIM_ODE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "crnlyap/error.hpp"
#include "crnlyap/network.hpp"

namespace crnlyap::sim {

struct Trajectory {
    std::vector<double> times;
    std::vector<StateVec> states;
    /// Scaled error estimate of each accepted step (entry 0 belongs to the initial state).
    std::vector<double> step_errors;
};

struct OdeOptions {
    /// Step-size floor relative to max(1, |t|) before declaring stiffness.
    double min_step_rel = 1e-14;
    /// Absolute error floor, as a fraction of ode_tol.
    double abs_floor = 1e-3;
    std::size_t max_steps = 10'000'000;
    double safety = 0.9;
    double initial_step_frac = 1e-4;
};

namespace detail {

// Dormand-Prince 5(4).
inline constexpr std::array<double, 7> dp_c{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// b - b*, the embedded error weights.
inline constexpr std::array<double, 7> dp_e{71.0 / 57600,      0.0,         -71.0 / 16695, 71.0 / 1920,
                                            -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

}  // namespace detail

/// Adaptive Dormand-Prince integration of dx/dt = vector_field(net, x).
/// Every accepted step is recorded.
inline Trajectory integrate_ode(const Network& net, std::span<const double> x0, double t_end, double ode_tol,
                                const OdeOptions& opt = {}) {
    crnlyap::detail::check_dim(net, x0.size(), "integrate_ode");
    if (!all_nonnegative(x0)) throw DomainError("integrate_ode: initial state must be nonnegative");
    if (!(t_end >= 0.0)) throw DomainError("integrate_ode: t_end must be nonnegative");
    if (!(ode_tol > 0.0)) throw DomainError("integrate_ode: ode_tol must be positive");

    const std::size_t n = x0.size();
    Trajectory traj;
    StateVec y(x0.begin(), x0.end());
    double t = 0.0;
    traj.times.push_back(t);
    traj.states.push_back(y);
    traj.step_errors.push_back(0.0);
    if (t_end == 0.0) return traj;

    std::array<StateVec, 7> k;
    k[0] = vector_field(net, y);
    StateVec stage(n), ynew(n);
    double h = opt.initial_step_frac * t_end;

    for (std::size_t steps = 0; t < t_end; ++steps) {
        if (steps >= opt.max_steps) throw SimulationError("integrate_ode: step limit exceeded", t);
        if (t + h > t_end) h = t_end - t;
        if (h < opt.min_step_rel * std::max(1.0, std::abs(t)))
            throw SimulationError("integrate_ode: step size underflow (stiff system?) at t=" + std::to_string(t), t);

        for (std::size_t s = 1; s < 7; ++s) {
            for (std::size_t j = 0; j < n; ++j) {
                double acc = 0.0;
                for (std::size_t q = 0; q < s; ++q) acc += detail::dp_a[s][q] * k[q][j];
                stage[j] = y[j] + h * acc;
            }
            if (s == 6) ynew = stage;
            // Stage states may dip below zero in transients; mass action monomials
            // stay well defined, so evaluate them as is.
            k[s] = vector_field(net, stage);
        }

        double err = 0.0;
        bool negative = false;
        for (std::size_t j = 0; j < n; ++j) {
            double e = 0.0;
            for (std::size_t s = 0; s < 7; ++s) e += detail::dp_e[s] * k[s][j];
            e *= h;
            const double sc = ode_tol * (std::max(std::abs(y[j]), std::abs(ynew[j])) + opt.abs_floor);
            err = std::max(err, std::abs(e) / sc);
            if (ynew[j] < -sc) negative = true;
        }

        if (err <= 1.0 && !negative) {
            t = (t_end - t <= h) ? t_end : t + h;
            for (std::size_t j = 0; j < n; ++j) y[j] = std::max(ynew[j], 0.0);
            k[0] = vector_field(net, y);
            traj.times.push_back(t);
            traj.states.push_back(y);
            traj.step_errors.push_back(err);
            const double grow = err > 0.0 ? opt.safety * std::pow(err, -0.2) : 5.0;
            h *= std::clamp(grow, 0.2, 5.0);
        } else if (negative) {
            h *= 0.25;
        } else {
            h *= std::clamp(opt.safety * std::pow(err, -0.2), 0.1, 0.9);
        }
    }
    return traj;
}

}  // namespace crnlyap::sim

#endif  // CRNLYAP_SIM_ODE_HPP
