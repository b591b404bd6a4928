#ifndef CRNLYAP_SIM_MONITOR_HPP
#define CRNLYAP_SIM_MONITOR_HPP

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "crnlyap/lyapunov.hpp"
#include "crnlyap/pde.hpp"
#include "crnlyap/sim/ode.hpp"

namespace crnlyap::sim {

struct MonitorSample {
    double t = 0.0;
    double f = 0.0;
    double fdot = 0.0;
};

struct MonitorResult {
    std::vector<MonitorSample> samples;
    /// Index into the trajectory of the first monitored state.
    std::size_t first_index = 0;
    bool truncated = false;
    std::vector<std::string> warnings;

    /// Largest increase f[k+1] - f[k] (0 when f never increases).
    double max_increase() const {
        double m = 0.0;
        for (std::size_t k = 1; k < samples.size(); ++k) m = std::max(m, samples[k].f - samples[k - 1].f);
        return m;
    }

    double max_fdot() const {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& s : samples) m = std::max(m, s.fdot);
        return m;
    }
};

/// f and its time derivative along a trajectory. Leading states on the
/// boundary are skipped; monitoring stops at the first later state with a
/// zero entry.
inline MonitorResult monitor_lyapunov(const Network& net, const Trajectory& traj, const LyapunovFn& fn) {
    MonitorResult out;
    const auto grad = gradient_oracle(fn);
    std::size_t k = 0;
    while (k < traj.states.size() && !all_positive(traj.states[k])) ++k;
    out.first_index = k;
    if (k > 0) out.warnings.push_back("skipped " + std::to_string(k) + " leading state(s) with a zero entry");
    for (; k < traj.states.size(); ++k) {
        const auto& x = traj.states[k];
        if (!all_positive(x)) {
            out.truncated = true;
            out.warnings.push_back("state at t=" + fmt_num(traj.times[k]) + " has a zero entry; monitoring truncated");
            break;
        }
        out.samples.push_back({traj.times[k], lyapunov_value(fn, x), dissipation(net, grad, x)});
    }
    return out;
}

}  // namespace crnlyap::sim

#endif  // CRNLYAP_SIM_MONITOR_HPP
