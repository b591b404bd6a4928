#ifndef CRNLYAP_EQUILIBRIUM_HPP
#define CRNLYAP_EQUILIBRIUM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "crnlyap/error.hpp"
#include "crnlyap/network.hpp"
#include "crnlyap/sim/ode.hpp"
#include "crnlyap/structure.hpp"

namespace crnlyap {

struct ComplexBalance {
    bool balanced = false;
    std::vector<Complex> complexes;
    std::vector<double> outflow;
    std::vector<double> inflow;
    /// outflow - inflow per complex.
    std::vector<double> imbalance;
};

/// Complex-balance test at a positive state: for every complex z the total rate of
/// reactions leaving z matches the total rate of reactions producing z.
inline ComplexBalance is_complex_balanced(const Network& net, std::span<const double> x_star, double rel_tol = 1e-9) {
    detail::check_dim(net, x_star.size(), "is_complex_balanced");
    if (!all_positive(x_star)) throw PreconditionError("is_complex_balanced: state must be strictly positive");
    const auto table = complex_table(net);
    const auto rates = reaction_rates(net, x_star);
    ComplexBalance cb;
    cb.complexes = table.complexes;
    cb.outflow.assign(table.complexes.size(), 0.0);
    cb.inflow.assign(table.complexes.size(), 0.0);
    for (std::size_t i = 0; i < rates.size(); ++i) {
        cb.outflow[table.reactant_of[i]] += rates[i];
        cb.inflow[table.product_of[i]] += rates[i];
    }
    cb.balanced = true;
    for (std::size_t z = 0; z < cb.complexes.size(); ++z) {
        const double d = cb.outflow[z] - cb.inflow[z];
        cb.imbalance.push_back(d);
        if (std::abs(d) > rel_tol * (cb.outflow[z] + cb.inflow[z])) cb.balanced = false;
    }
    return cb;
}

struct EquilibriumOptions {
    double tol = 1e-12;
    int max_iters = 100;
    int restarts = 8;
    std::uint64_t seed = 0x5eed'c0de'2024ULL;
    double balance_rel_tol = 1e-9;
};

struct EquilibriumResult {
    StateVec x_star;
    /// Scaled augmented residual: field part over max(1, total flux), conservation
    /// part over max(1, |x0|_inf).
    double residual_norm = 0.0;
    int newton_iters = 0;
    bool complex_balanced = false;
    std::vector<double> imbalances;
};

namespace detail {

struct AugmentedSystem {
    const Network& net;
    StateVec x0;
    Eigen::MatrixXd s_ortho;
    Eigen::MatrixXd c_ortho;
    double x_scale;

    AugmentedSystem(const Network& network, std::span<const double> anchor, const StoichStructure& s)
        : net(network),
          x0(anchor.begin(), anchor.end()),
          s_ortho(orthonormal_columns(s.s_basis, anchor.size())),
          c_ortho(orthonormal_columns(s.orth_basis, anchor.size())),
          x_scale(1.0) {
        for (double v : x0) x_scale = std::max(x_scale, std::abs(v));
    }

    double flux_scale(std::span<const double> x) const {
        double total = 0.0;
        for (double r : reaction_rates(net, x)) total += r;
        return std::max(1.0, total);
    }

    Eigen::VectorXd residual(std::span<const double> x) const {
        const auto f = vector_field(net, x);
        const auto n = static_cast<Eigen::Index>(x.size());
        Eigen::Map<const Eigen::VectorXd> ef(f.data(), n), ex(x.data(), n), ea(x0.data(), n);
        Eigen::VectorXd out(n);
        out << s_ortho.transpose() * ef, c_ortho.transpose() * (ex - ea);
        return out;
    }

    double scaled_norm(std::span<const double> x, const Eigen::VectorXd& res) const {
        const auto d = s_ortho.cols();
        double a = d ? res.head(d).cwiseAbs().maxCoeff() / flux_scale(x) : 0.0;
        double b = res.size() > d ? res.tail(res.size() - d).cwiseAbs().maxCoeff() / x_scale : 0.0;
        return std::max(a, b);
    }

    Eigen::MatrixXd jacobian(std::span<const double> x) const {
        const auto n = static_cast<Eigen::Index>(x.size());
        Eigen::MatrixXd jac(n, n);
        jac << s_ortho.transpose() * field_jacobian(net, x), c_ortho.transpose();
        return jac;
    }
};

inline std::optional<EquilibriumResult> newton_from(const AugmentedSystem& sys, StateVec x, double tol, int max_iters) {
    for (int it = 0; it <= max_iters; ++it) {
        Eigen::VectorXd res = sys.residual(x);
        const double norm = sys.scaled_norm(x, res);
        if (!std::isfinite(norm)) return std::nullopt;
        if (norm <= tol) {
            EquilibriumResult out;
            out.x_star = std::move(x);
            out.residual_norm = norm;
            out.newton_iters = it;
            return out;
        }
        if (it == max_iters) break;
        const Eigen::VectorXd step = sys.jacobian(x).colPivHouseholderQr().solve(-res);
        if (!step.allFinite()) return std::nullopt;
        const double base = res.norm();
        double lambda = 1.0;
        StateVec trial(x.size());
        bool accepted = false;
        while (lambda > 1e-12) {
            for (std::size_t j = 0; j < x.size(); ++j) trial[j] = x[j] + lambda * step(static_cast<Eigen::Index>(j));
            if (all_positive(trial)) {
                const double tn = sys.residual(trial).norm();
                if (std::isfinite(tn) && tn <= (1.0 - 1e-4 * lambda) * base) {
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            // Close to roundoff: accept the full step if it stays positive.
            for (std::size_t j = 0; j < x.size(); ++j) trial[j] = x[j] + step(static_cast<Eigen::Index>(j));
            if (!all_positive(trial) || sys.residual(trial).norm() > base * (1.0 + 1e-6)) return std::nullopt;
        }
        x = trial;
    }
    return std::nullopt;
}

inline StateVec project_into_class(const Eigen::MatrixXd& s_ortho, std::span<const double> x0, std::span<const double> q) {
    const auto n = static_cast<Eigen::Index>(x0.size());
    Eigen::Map<const Eigen::VectorXd> ex(x0.data(), n), eq(q.data(), n);
    const Eigen::VectorXd p = ex + s_ortho * (s_ortho.transpose() * (eq - ex));
    return StateVec(p.data(), p.data() + n);
}

}  // namespace detail

/// Strictly positive points of the class (x0 + S), in the order they should be
/// tried as Newton seeds. Empty when none could be found.
inline std::vector<StateVec> interior_seeds(const Network& net, std::span<const double> x0, const StoichStructure& s,
                                            int random_count, std::uint64_t seed) {
    const auto n = x0.size();
    const Eigen::MatrixXd s_ortho = orthonormal_columns(s.s_basis, n);
    double mean = 0.0;
    for (double v : x0) mean += v;
    mean = std::max(mean / static_cast<double>(n), 1e-300);
    std::vector<StateVec> seeds;
    if (all_positive(x0)) seeds.emplace_back(x0.begin(), x0.end());

    {
        const StateVec flat(n, mean);
        auto p = detail::project_into_class(s_ortho, x0, flat);
        if (all_positive(p)) seeds.push_back(std::move(p));
    }
    if (seeds.empty()) {
        try {
            const auto traj = sim::integrate_ode(net, x0, 1.0, 1e-8);
            auto last = std::find_if(traj.states.rbegin(), traj.states.rend(),
                                     [](const StateVec& st) { return all_positive(st); });
            if (last != traj.states.rend()) seeds.push_back(*last);
        } catch (const Error&) {
        }
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    int found = 0;
    for (int attempt = 0; attempt < 64 * std::max(random_count, 1) && found < random_count; ++attempt) {
        StateVec q(n);
        for (auto& v : q) v = mean * std::exp(normal(rng));
        auto p = detail::project_into_class(s_ortho, x0, q);
        if (all_positive(p)) {
            seeds.push_back(std::move(p));
            ++found;
        }
    }
    return seeds;
}

/// All distinct positive equilibria reached by damped Newton from the multi-start
/// seeds of x0's class.
inline std::vector<EquilibriumResult> find_equilibria(const Network& net, std::span<const double> x0,
                                                      const EquilibriumOptions& opt = {}) {
    detail::check_dim(net, x0.size(), "find_equilibrium");
    if (!all_nonnegative(x0)) throw DomainError("find_equilibrium: x0 must be nonnegative");
    const auto s = stoich_structure(net);
    const auto seeds = interior_seeds(net, x0, s, opt.restarts, opt.seed);
    if (seeds.empty()) throw PreconditionError("find_equilibrium: the compatibility class of x0 has no positive interior");

    const detail::AugmentedSystem sys(net, x0, s);
    std::vector<EquilibriumResult> found;
    for (const auto& sd : seeds) {
        auto r = detail::newton_from(sys, sd, opt.tol, opt.max_iters);
        if (!r) continue;
        const bool duplicate = std::any_of(found.begin(), found.end(), [&](const EquilibriumResult& e) {
            for (std::size_t j = 0; j < e.x_star.size(); ++j)
                if (std::abs(e.x_star[j] - r->x_star[j]) > 1e-8 * std::max(1.0, std::abs(e.x_star[j]))) return false;
            return true;
        });
        if (duplicate) continue;
        const auto cb = is_complex_balanced(net, r->x_star, opt.balance_rel_tol);
        r->complex_balanced = cb.balanced;
        r->imbalances = cb.imbalance;
        found.push_back(std::move(*r));
    }
    return found;
}

/// First positive equilibrium in the class of x0.
inline EquilibriumResult find_equilibrium(const Network& net, std::span<const double> x0, double tol = 1e-12,
                                          int max_iters = 100) {
    EquilibriumOptions opt;
    opt.tol = tol;
    opt.max_iters = max_iters;
    auto all = find_equilibria(net, x0, opt);
    if (all.empty()) throw NoEquilibriumError("no equilibrium located in the class of x0");
    return std::move(all.front());
}

}  // namespace crnlyap

#endif  // CRNLYAP_EQUILIBRIUM_HPP
