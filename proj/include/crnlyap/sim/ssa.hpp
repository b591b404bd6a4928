#ifndef CRNLYAP_SIM_SSA_HPP
#define CRNLYAP_SIM_SSA_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "crnlyap/equilibrium.hpp"
#include "crnlyap/error.hpp"
#include "crnlyap/network.hpp"
#include "crnlyap/random.hpp"

namespace crnlyap::sim {

/// Time-weighted occupancy of an SSA run.
struct OccupancyHistogram {
    /// State -> fraction of simulated time spent there. Sums to 1.
    std::map<CountVec, double> occupancy;
    double total_time = 0.0;
    /// Volume scale (Avogadro constant times volume).
    double omega = 1.0;
    std::uint64_t events = 0;
    /// The chain reached a state with zero total intensity.
    bool absorbed = false;
    CountVec absorbing_state;
    double absorption_time = 0.0;
};

/// lambda_i(N) = k_i / Omega^{|v.i|-1} prod_j N_j (N_j - 1) ... (N_j - v_ji + 1).
/// Zero whenever some N_j < v_ji.
inline std::vector<double> intensity(const Network& net, std::span<const long long> n, double omega) {
    crnlyap::detail::check_dim(net, n.size(), "intensity");
    if (!(omega > 0.0)) throw DomainError("intensity: omega must be positive");
    std::vector<double> lam(net.num_reactions(), 0.0);
    for (std::size_t i = 0; i < lam.size(); ++i) {
        const auto& r = net.reaction(i);
        double a = r.rate_const / std::pow(omega, r.reactant.order() - 1);
        for (std::size_t j = 0; j < n.size() && a != 0.0; ++j) {
            if (n[j] < 0) throw DomainError("intensity: counts must be nonnegative");
            for (int c = 0; c < r.reactant[j]; ++c) a *= static_cast<double>(n[j] - c);
            if (n[j] < r.reactant[j]) a = 0.0;
        }
        lam[i] = a;
    }
    return lam;
}

/// Direct-method SSA. Deterministic given the seed.
inline OccupancyHistogram ssa_run(const Network& net, std::span<const long long> n0, double omega, double t_end,
                                  std::uint64_t seed) {
    crnlyap::detail::check_dim(net, n0.size(), "ssa_run");
    if (!(t_end > 0.0)) throw DomainError("ssa_run: t_end must be positive");
    for (auto v : n0)
        if (v < 0) throw DomainError("ssa_run: initial counts must be nonnegative");

    std::vector<std::vector<int>> deltas;
    for (const auto& r : net.reactions()) deltas.push_back(r.delta());

    OccupancyHistogram h;
    h.omega = omega;
    h.total_time = t_end;
    CounterRng rng(seed);
    CountVec n(n0.begin(), n0.end());
    double t = 0.0;
    std::map<CountVec, double> time_in;
    while (true) {
        const auto lam = intensity(net, n, omega);
        double a0 = 0.0;
        for (double v : lam) a0 += v;
        if (!std::isfinite(a0)) throw SimulationError("ssa_run: intensity overflow", t);
        if (a0 == 0.0) {
            h.absorbed = true;
            h.absorbing_state = n;
            h.absorption_time = t;
            time_in[n] += t_end - t;
            break;
        }
        const double tau = rng.exponential(a0);
        if (t + tau >= t_end) {
            time_in[n] += t_end - t;
            break;
        }
        time_in[n] += tau;
        t += tau;
        const double target = rng.uniform() * a0;
        std::size_t pick = 0;
        double acc = lam[0];
        while (acc <= target && pick + 1 < lam.size()) acc += lam[++pick];
        while (lam[pick] == 0.0) --pick;  // guards against target landing on a zero-width tail
        for (std::size_t j = 0; j < n.size(); ++j) n[j] += deltas[pick][j];
        ++h.events;
    }
    for (const auto& [state, dt] : time_in) h.occupancy[state] = dt / t_end;
    return h;
}

/// Time-weighted average of independent runs.
inline OccupancyHistogram merge_histograms(const std::vector<OccupancyHistogram>& runs) {
    if (runs.empty()) throw DomainError("merge_histograms: no runs");
    OccupancyHistogram out;
    out.omega = runs.front().omega;
    for (const auto& r : runs) out.total_time += r.total_time;
    for (const auto& r : runs) {
        out.events += r.events;
        out.absorbed = out.absorbed || r.absorbed;
        for (const auto& [s, f] : r.occupancy) out.occupancy[s] += f * r.total_time / out.total_time;
    }
    return out;
}

/// Product-Poisson law prod (Omega x*_j)^{N_j} / N_j! conditioned on the lattice
/// class of n0 (moves by +-reaction vectors in the nonnegative orthant).
/// Infinite classes are truncated where weights fall below 1e-12 times the mode
/// (with a further e^-20 margin).
inline std::map<CountVec, double> exact_stationary_cb(const Network& net, std::span<const double> x_star,
                                                      std::span<const long long> n0, double omega,
                                                      std::size_t max_states = 5'000'000) {
    if (!is_complex_balanced(net, x_star).balanced)
        throw PreconditionError("exact_stationary_cb: x_star is not a complex-balanced equilibrium");
    if (!(omega > 0.0)) throw DomainError("exact_stationary_cb: omega must be positive");
    const auto n = n0.size();
    std::vector<double> log_c(n);
    for (std::size_t j = 0; j < n; ++j) log_c[j] = std::log(omega * x_star[j]);
    auto log_weight = [&](const CountVec& s) {
        double w = 0.0;
        for (std::size_t j = 0; j < n; ++j) w += static_cast<double>(s[j]) * log_c[j] - std::lgamma(static_cast<double>(s[j]) + 1.0);
        return w;
    };

    std::vector<std::vector<int>> moves;
    for (const auto& r : net.reactions()) {
        auto d = r.delta();
        moves.push_back(d);
        for (auto& v : d) v = -v;
        moves.push_back(d);
    }

    const double cut = std::log(1e12) + 20.0;
    std::map<CountVec, double> logw;
    std::deque<CountVec> queue;
    CountVec start(n0.begin(), n0.end());
    double best = log_weight(start);
    logw[start] = best;
    queue.push_back(start);
    while (!queue.empty()) {
        CountVec s = std::move(queue.front());
        queue.pop_front();
        const double ws = logw[s];
        if (ws < best - cut) continue;
        for (const auto& m : moves) {
            CountVec t = s;
            bool ok = true;
            for (std::size_t j = 0; j < n; ++j) {
                t[j] += m[j];
                ok = ok && t[j] >= 0;
            }
            if (!ok || logw.count(t)) continue;
            const double wt = log_weight(t);
            logw[t] = wt;
            best = std::max(best, wt);
            queue.push_back(std::move(t));
            if (logw.size() > max_states) throw SimulationError("exact_stationary_cb: class too large to enumerate", 0.0);
        }
    }

    std::map<CountVec, double> pi;
    double z = 0.0;
    for (const auto& [s, w] : logw)
        if (w >= best - cut) z += std::exp(w - best);
    for (const auto& [s, w] : logw)
        if (w >= best - cut) pi[s] = std::exp(w - best) / z;
    return pi;
}

struct PotentialPoint {
    CountVec n;
    /// n / Omega.
    StateVec x;
    double occupancy = 0.0;
    /// -(1/Omega) ln occupancy.
    double potential = 0.0;
};

/// -(1/Omega) ln occupancy(N) on every visited state.
inline std::vector<PotentialPoint> empirical_potential(const OccupancyHistogram& h) {
    if (h.occupancy.empty()) throw DomainError("empirical_potential: empty histogram");
    std::vector<PotentialPoint> out;
    for (const auto& [s, f] : h.occupancy) {
        if (!(f > 0.0)) continue;
        PotentialPoint p;
        p.n = s;
        p.x.resize(s.size());
        for (std::size_t j = 0; j < s.size(); ++j) p.x[j] = static_cast<double>(s[j]) / h.omega;
        p.occupancy = f;
        p.potential = -std::log(f) / h.omega;
        out.push_back(std::move(p));
    }
    return out;
}

struct PotentialComparison {
    /// States used (occupancy above the floor and strictly positive x).
    std::size_t support = 0;
    /// sup |(phi - min phi) - (f - min f)| over the support.
    double sup_distance = 0.0;
};

/// Compares the empirical potential with a candidate f after subtracting each
/// side's minimum over the common support.
inline PotentialComparison compare_potential(const std::vector<PotentialPoint>& pot,
                                             const std::function<double(std::span<const double>)>& f,
                                             double min_occupancy = 1e-3) {
    std::vector<double> phi, fv;
    for (const auto& p : pot) {
        if (!(p.occupancy > min_occupancy) || !all_positive(p.x)) continue;
        phi.push_back(p.potential);
        fv.push_back(f(p.x));
    }
    PotentialComparison out;
    out.support = phi.size();
    if (phi.empty()) return out;
    const double pmin = *std::min_element(phi.begin(), phi.end());
    const double fmin = *std::min_element(fv.begin(), fv.end());
    for (std::size_t i = 0; i < phi.size(); ++i)
        out.sup_distance = std::max(out.sup_distance, std::abs((phi[i] - pmin) - (fv[i] - fmin)));
    return out;
}

/// Total-variation distance between two distributions on count vectors.
inline double tv_distance(const std::map<CountVec, double>& p, const std::map<CountVec, double>& q) {
    double s = 0.0;
    for (const auto& [k, v] : p) {
        auto it = q.find(k);
        s += std::abs(v - (it == q.end() ? 0.0 : it->second));
    }
    for (const auto& [k, v] : q)
        if (!p.count(k)) s += std::abs(v);
    return 0.5 * s;
}

}  // namespace crnlyap::sim

#endif  // CRNLYAP_SIM_SSA_HPP
