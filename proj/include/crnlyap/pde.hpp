#ifndef CRNLYAP_PDE_HPP
#define CRNLYAP_PDE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crnlyap/error.hpp"
#include "crnlyap/network.hpp"
#include "crnlyap/structure.hpp"

namespace crnlyap {

/// x -> grad f(x) over strictly positive states.
class GradientOracle {
public:
    enum class Kind { analytic, finite_difference };
    using Fn = std::function<StateVec(std::span<const double>)>;

    GradientOracle(Fn fn, Kind kind = Kind::analytic) : fn_(std::move(fn)), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

    StateVec operator()(std::span<const double> x) const {
        auto g = fn_(x);
        if (g.size() != x.size()) throw EvaluationError("gradient oracle returned wrong dimension");
        if (!all_finite(g)) throw EvaluationError("gradient oracle returned a non-finite entry");
        return g;
    }

private:
    Fn fn_;
    Kind kind_;
};

/// Central differences of a value oracle with h_j = max(1e-6 x_j, 1e-9).
inline GradientOracle finite_difference_oracle(std::function<double(std::span<const double>)> value) {
    return GradientOracle(
        [value = std::move(value)](std::span<const double> x) {
            StateVec g(x.size());
            StateVec probe(x.begin(), x.end());
            for (std::size_t j = 0; j < x.size(); ++j) {
                const double h = std::max(1e-6 * x[j], 1e-9);
                probe[j] = x[j] + h;
                const double up = value(probe);
                probe[j] = x[j] - h;
                const double down = value(probe);
                probe[j] = x[j];
                g[j] = (up - down) / (2.0 * h);
            }
            return g;
        },
        GradientOracle::Kind::finite_difference);
}

namespace detail {

inline double delta_dot(const Reaction& r, std::span<const double> g) {
    double s = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const int d = r.product[j] - r.reactant[j];
        if (d != 0) s += d * g[j];
    }
    return s;
}

inline void require_interior(const Network& net, std::span<const double> x, const char* what) {
    check_dim(net, x.size(), what);
    if (!all_positive(x)) throw PreconditionError(std::string(what) + ": state must be strictly positive");
}

}  // namespace detail

/// Left-hand side of the Lyapunov function PDE,
///   sum_i k_i x^{v.i} - sum_i k_i x^{v.i} exp{(v'.i - v.i)^T grad f(x)}.
inline double pde_residual_at(const Network& net, std::span<const double> x, std::span<const double> g) {
    const auto rates = reaction_rates(net, x);
    double res = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) res -= rates[i] * std::expm1(detail::delta_dot(net.reaction(i), g));
    return res;
}

inline double pde_residual(const Network& net, const GradientOracle& grad, std::span<const double> x) {
    detail::require_interior(net, x, "pde_residual");
    return pde_residual_at(net, x, grad(x));
}

/// Time derivative of f along the mass-action flow, vector_field(x)^T grad f(x).
inline double dissipation_at(const Network& net, std::span<const double> x, std::span<const double> g) {
    const auto f = vector_field(net, x);
    double d = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) d += f[j] * g[j];
    return d;
}

inline double dissipation(const Network& net, const GradientOracle& grad, std::span<const double> x) {
    detail::require_interior(net, x, "dissipation");
    return dissipation_at(net, x, grad(x));
}

struct BoundaryPoint {
    StateVec xbar;
    /// Indices j with xbar_j == 0.
    std::vector<std::size_t> zero_set;
    /// A point of the class (usually its equilibrium); used to pick the approach direction.
    StateVec anchor;
};

inline BoundaryPoint make_boundary_point(StateVec xbar, StateVec anchor = {}) {
    if (!all_nonnegative(xbar)) throw PreconditionError("boundary point must be nonnegative");
    BoundaryPoint bp{std::move(xbar), {}, std::move(anchor)};
    for (std::size_t j = 0; j < bp.xbar.size(); ++j)
        if (bp.xbar[j] == 0.0) bp.zero_set.push_back(j);
    if (bp.zero_set.empty()) throw PreconditionError("not a boundary point: every entry is positive");
    return bp;
}

struct BoundaryComplexSet {
    std::vector<Complex> complexes;

    bool contains(const Complex& z) const { return std::find(complexes.begin(), complexes.end(), z) != complexes.end(); }
    bool empty() const noexcept { return complexes.empty(); }
};

/// Complexes whose support avoids the zero coordinates of xbar.
inline BoundaryComplexSet naive_boundary_set(const Network& net, const BoundaryPoint& bp) {
    detail::check_dim(net, bp.xbar.size(), "naive_boundary_set");
    if (bp.zero_set.empty()) throw PreconditionError("not a boundary point: every entry is positive");
    BoundaryComplexSet cs;
    for (const auto& z : complex_table(net).complexes) {
        const bool member = std::all_of(bp.zero_set.begin(), bp.zero_set.end(), [&](std::size_t j) { return z[j] == 0; });
        if (member) cs.complexes.push_back(z);
    }
    return cs;
}

/// Boundary-condition expression at an interior point x near xbar:
///   sum_{v.i in cs} k_i x^{v.i} - sum_{v'.i in cs} k_i x^{v.i} exp{(v'.i - v.i)^T grad f(x)}.
inline double boundary_expression(const Network& net, const GradientOracle& grad, const BoundaryComplexSet& cs,
                                  std::span<const double> x, double* magnitude = nullptr) {
    if (cs.empty()) {
        if (magnitude) *magnitude = 0.0;
        return 0.0;
    }
    const auto g = grad(x);
    const auto rates = reaction_rates(net, x);
    double out = 0.0, in = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        const auto& r = net.reaction(i);
        if (cs.contains(r.reactant)) out += rates[i];
        if (cs.contains(r.product)) in += rates[i] * std::exp(detail::delta_dot(r, g));
    }
    if (magnitude) *magnitude = std::abs(out) + std::abs(in);
    return out - in;
}

struct BoundaryLimit {
    /// Richardson-extrapolated limit estimate.
    double limit = 0.0;
    /// Observed decay order p in R(t) ~ limit + c t^p (0 when not measurable).
    double order = 0.0;
    std::array<double, 3> steps{1e-3, 1e-4, 1e-5};
    std::array<double, 3> samples{};
    /// False when the three samples do not behave like a converging sequence.
    bool determinate = true;
    /// The boundary complex set was empty and the condition holds trivially.
    bool trivially_zero = false;
};

/// Limit of the boundary expression along xbar + t * direction as t -> 0+,
/// from samples at t = 1e-3, 1e-4, 1e-5.
inline BoundaryLimit boundary_residual(const Network& net, const GradientOracle& grad, const BoundaryPoint& bp,
                                       const BoundaryComplexSet& cs, std::span<const double> direction) {
    detail::check_dim(net, bp.xbar.size(), "boundary_residual");
    BoundaryLimit out;
    if (cs.empty()) {
        out.trivially_zero = true;
        return out;
    }
    if (direction.size() != bp.xbar.size()) throw StructuralError("boundary_residual: direction has wrong dimension");

    double scale = 0.0;
    for (std::size_t s = 0; s < 3; ++s) {
        StateVec x(bp.xbar.size());
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = bp.xbar[j] + out.steps[s] * direction[j];
        if (!all_positive(x))
            throw PreconditionError("boundary_residual: direction does not point into the positive interior");
        double mag = 0.0;
        out.samples[s] = boundary_expression(net, grad, cs, x, &mag);
        scale = std::max(scale, mag);
    }

    const auto [r1, r2, r3] = out.samples;
    const double noise = 1e-12 * std::max(scale, 1.0);
    const double d1 = r1 - r2, d2 = r2 - r3;
    out.limit = r3;
    if (std::abs(r1) <= noise && std::abs(r2) <= noise && std::abs(r3) <= noise) return out;
    if (d1 * d2 > 0.0 && std::abs(d1) > 1.05 * std::abs(d2)) {
        const double rho = d1 / d2;
        out.order = std::log10(rho);
        out.limit = r3 - d2 / (rho - 1.0);
        return out;
    }
    if (std::abs(d1) <= noise && std::abs(d2) <= noise) return out;
    out.determinate = false;
    return out;
}

/// Projection of (x_star - xbar) onto S: the default approach direction.
inline StateVec default_boundary_direction(const StoichStructure& s, std::span<const double> x_star,
                                           std::span<const double> xbar) {
    StateVec d(x_star.size());
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = x_star[j] - xbar[j];
    return project_onto_subspace(s, d);
}

}  // namespace crnlyap

#endif  // CRNLYAP_PDE_HPP
