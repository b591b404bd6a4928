#ifndef CRNLYAP_DIM1_HPP
#define CRNLYAP_DIM1_HPP

// Lyapunov function for networks whose stoichiometric subspace is a line
// spanned by w. With v'.i - v.i = m_i w, the PDE reduces to g(x, u) = 0 in
// u = exp(w^T grad f), and
//
//   f(x) = integral_0^gamma(x) ln u~(y+(x) + tau w) dtau,
//
// where x = y+(x) + gamma(x) w and y+ is the zero of J on x's class.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "crnlyap/equilibrium.hpp"
#include "crnlyap/error.hpp"
#include "crnlyap/network.hpp"
#include "crnlyap/numerics.hpp"
#include "crnlyap/pde.hpp"
#include "crnlyap/structure.hpp"

namespace crnlyap {

struct Dim1Geometry {
    /// Primitive integer vector spanning S, oriented so that m[0] > 0.
    std::vector<int> w;
    /// Reaction i has v'.i - v.i = m[i] * w.
    std::vector<int> m;
    std::vector<std::size_t> positive;  // P_w
    std::vector<std::size_t> negative;  // N_w
};

inline Dim1Geometry dim1_geometry(const Network& net) {
    const auto s = stoich_structure(net);
    if (s.dim != 1) throw StructuralError("dim1_geometry: stoichiometric subspace has dimension " + std::to_string(s.dim));
    Dim1Geometry geo;
    auto d0 = net.reaction(0).delta();
    int g = 0;
    for (int v : d0) g = std::gcd(g, std::abs(v));
    geo.w.resize(d0.size());
    std::size_t pivot = 0;
    for (std::size_t j = 0; j < d0.size(); ++j) {
        geo.w[j] = d0[j] / g;
        if (geo.w[j] != 0 && geo.w[pivot] == 0) pivot = j;
        if (geo.w[j] > 0) geo.positive.push_back(j);
        if (geo.w[j] < 0) geo.negative.push_back(j);
    }
    for (const auto& r : net.reactions()) {
        const auto d = r.delta();
        const int mi = d[pivot] / geo.w[pivot];
        for (std::size_t j = 0; j < d.size(); ++j)
            if (d[j] != mi * geo.w[j]) throw StructuralError("dim1_geometry: reaction vector is not an integer multiple of w");
        geo.m.push_back(mi);
    }
    return geo;
}

namespace detail {

/// Coefficient of k_i x^{v.i} in g: sum_{j=0}^{m-1} u^j (m > 0) or -sum_{j=m}^{-1} u^j (m < 0).
inline double g_coeff(int m, double u) {
    double s = 0.0;
    if (m > 0) {
        double p = 1.0;
        for (int j = 0; j < m; ++j, p *= u) s += p;
        return s;
    }
    const double inv = 1.0 / u;
    double p = inv;
    for (int j = -1; j >= m; --j, p *= inv) s += p;
    return -s;
}

/// d/du of g_coeff.
inline double g_coeff_du(int m, double u) {
    double s = 0.0;
    if (m > 0) {
        double p = 1.0;  // u^{j-1}
        for (int j = 1; j < m; ++j, p *= u) s += j * p;
        return s;
    }
    const double inv = 1.0 / u;
    double p = inv * inv;  // u^{j-1} at j = -1
    for (int j = -1; j >= m; --j, p *= inv) s += (-j) * p;
    return s;
}

inline void require_both_signs(const Dim1Geometry& geo) {
    const bool pos = std::any_of(geo.m.begin(), geo.m.end(), [](int v) { return v > 0; });
    const bool neg = std::any_of(geo.m.begin(), geo.m.end(), [](int v) { return v < 0; });
    if (!pos || !neg)
        throw StructuralError("all reactions move along the same direction of w: no positive steady state possible");
}

}  // namespace detail

/// g(x, u) = sum_{m_i>0} k_i x^{v.i} sum_{j=0}^{m_i-1} u^j - sum_{m_i<0} k_i x^{v.i} sum_{j=m_i}^{-1} u^j.
inline double g_eval(const Dim1Geometry& geo, const Network& net, std::span<const double> x, double u) {
    const auto rates = reaction_rates(net, x);
    double g = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) g += rates[i] * detail::g_coeff(geo.m[i], u);
    return g;
}

inline double g_du(const Dim1Geometry& geo, const Network& net, std::span<const double> x, double u) {
    const auto rates = reaction_rates(net, x);
    double g = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) g += rates[i] * detail::g_coeff_du(geo.m[i], u);
    return g;
}

/// Gradient of g(., u) with respect to x.
inline StateVec g_dx(const Dim1Geometry& geo, const Network& net, std::span<const double> x, double u) {
    StateVec out(x.size(), 0.0);
    for (std::size_t i = 0; i < net.num_reactions(); ++i) {
        const auto& r = net.reaction(i);
        const double c = r.rate_const * detail::g_coeff(geo.m[i], u);
        for (std::size_t j = 0; j < x.size(); ++j)
            if (r.reactant[j] != 0) out[j] += c * monomial_partial(x, r.reactant, j);
    }
    return out;
}

/// The unique u > 0 with g(x, u) = 0 (g is increasing in u). Bracketed by
/// doubling/halving from 1, then bisection to machine precision.
inline double solve_u(const Dim1Geometry& geo, const Network& net, std::span<const double> x) {
    detail::require_both_signs(geo);
    if (!all_positive(x)) throw DomainError("solve_u: state must be strictly positive");
    // Scaled so the bracket search is insensitive to the overall rate magnitude.
    const auto rates = reaction_rates(net, x);
    auto g = [&](double u) {
        double s = 0.0;
        for (std::size_t i = 0; i < rates.size(); ++i) s += rates[i] * detail::g_coeff(geo.m[i], u);
        return s;
    };
    const auto br = numerics::bracket_positive_increasing(g, 1.0);
    if (br.lo == br.hi) return br.lo;
    return numerics::bisect(g, br.lo, br.hi);
}

/// J(y) on x's class:  prod_P y - prod_N y,  prod_P y - 1,  or  prod_N y - 1.
inline double anchor_j(const Dim1Geometry& geo, std::span<const double> y) {
    double pp = 1.0, pn = 1.0;
    for (auto i : geo.positive) pp *= y[i];
    for (auto i : geo.negative) pn *= y[i];
    if (!geo.positive.empty() && !geo.negative.empty()) return pp - pn;
    if (!geo.positive.empty()) return pp - 1.0;
    return pn - 1.0;
}

struct Anchor {
    StateVec y_dagger;
    double gamma = 0.0;
    /// J(y_dagger), for diagnostics.
    double j_value = 0.0;
};

/// Splits x = y+ + gamma w with J(y+) = 0, y+ > 0. The zero is found by bisection
/// in beta over the feasible interval {beta : x - beta w > 0} on the log form of J.
inline Anchor anchor(const Dim1Geometry& geo, std::span<const double> x) {
    if (!all_positive(x)) throw DomainError("anchor: state must be strictly positive");
    const bool has_p = !geo.positive.empty(), has_n = !geo.negative.empty();
    constexpr double inf = std::numeric_limits<double>::infinity();

    double lo = -inf, hi = inf, scale = 0.0;
    for (auto i : geo.positive) hi = std::min(hi, x[i] / geo.w[i]);
    for (auto i : geo.negative) lo = std::max(lo, x[i] / geo.w[i]);
    for (std::size_t j = 0; j < x.size(); ++j)
        if (geo.w[j] != 0) scale = std::max(scale, std::abs(x[j] / geo.w[j]));

    // Decreasing in beta in every branch.
    auto h = [&](double beta) {
        double sp = 0.0, sn = 0.0;
        for (auto i : geo.positive) {
            const double y = x[i] - beta * geo.w[i];
            sp += y > 0.0 ? std::log(y) : -inf;
        }
        for (auto i : geo.negative) {
            const double y = x[i] - beta * geo.w[i];
            sn += y > 0.0 ? std::log(y) : -inf;
        }
        if (has_p && has_n) {
            if (sp == -inf) return -inf;
            if (sn == -inf) return inf;
            return sp - sn;
        }
        return has_p ? sp : -sn;
    };

    if (lo == -inf) {
        double step = std::max(1.0, std::abs(hi));
        lo = hi - step;
        while (!(h(lo) > 0.0)) {
            step *= 2.0;
            lo = hi - step;
            if (step > 1e300) throw EvaluationError("anchor: failed to bracket");
        }
    }
    if (hi == inf) {
        double step = std::max(1.0, std::abs(lo));
        hi = lo + step;
        while (!(h(hi) < 0.0)) {
            step *= 2.0;
            hi = lo + step;
            if (step > 1e300) throw EvaluationError("anchor: failed to bracket");
        }
    }

    Anchor a;
    a.gamma = numerics::bisect(h, lo, hi, 4 * std::numeric_limits<double>::epsilon(),
                               4 * std::numeric_limits<double>::epsilon() * scale);
    a.y_dagger.resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) a.y_dagger[j] = x[j] - a.gamma * geo.w[j];
    a.j_value = anchor_j(geo, a.y_dagger);
    return a;
}

struct QuadratureSettings {
    double abs_tol = 1e-10;
    int max_depth = 40;
};

/// One boundary point of the equilibrium's class and the outcome of the
/// "nonempty naive set has a reactant and a resultant complex" check.
struct Dim1BoundaryFace {
    StateVec xbar;
    bool naive_set_empty = true;
    bool has_reactant = false;
    bool has_resultant = false;
    bool assumption_holds = true;
};

struct StabilityMargin {
    /// w^T dg/dx at (x*, 1).
    double margin = 0.0;
    /// Eigenvalues of the rank-one linearization w (dg/dx)^T: {margin, 0}.
    std::array<double, 2> eigenvalues{};
};

/// Candidate Lyapunov function for a network with dim S = 1.
struct Dim1LyapunovFn {
    Network network;
    Dim1Geometry geometry;
    StateVec x_star;
    StabilityMargin stability;
    QuadratureSettings quadrature;
    double root_tol = 1e-12;
    std::vector<Dim1BoundaryFace> faces;
    std::vector<std::string> warnings;
};

namespace detail {

/// Distance from x to the orthant boundary moving along sign(gamma) w, i.e. past
/// the integration endpoint. Integrands blow up like 1/(delta + |gamma - tau|).
inline double endpoint_gap(const Dim1Geometry& geo, std::span<const double> x, double gamma) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double step = (gamma < 0.0 ? -1.0 : 1.0) * geo.w[j];
        if (step < 0.0) d = std::min(d, x[j] / -step);
    }
    return d;
}

/// integral_0^gamma h(tau) dtau. When the endpoint sits within |gamma| of the
/// boundary, substitutes |gamma - tau| + delta = (|gamma| + delta) e^{-s} so the
/// integrand becomes bounded.
template <class T, class H>
numerics::QuadratureResult<T> segment_integral(H&& h, double gamma, double delta, const QuadratureSettings& qs) {
    if (gamma == 0.0 || !(delta < std::abs(gamma)))
        return numerics::adaptive_simpson<T>(h, 0.0, gamma, qs.abs_tol, qs.max_depth);
    const double sg = gamma < 0.0 ? -1.0 : 1.0;
    const double len = std::abs(gamma) + delta;
    auto graded = [&](double s) -> T {
        const double rho = len * std::exp(-s);  // |gamma - tau| + delta
        const double tau = gamma - sg * (rho - delta);
        return T(h(tau) * (sg * rho));
    };
    return numerics::adaptive_simpson<T>(graded, 0.0, std::log(len / delta), qs.abs_tol, qs.max_depth);
}

}  // namespace detail

/// w^T grad f(x) = ln u~(x).
inline double w_directional_grad(const Dim1LyapunovFn& fn, std::span<const double> x) {
    return std::log(solve_u(fn.geometry, fn.network, x));
}

inline double f_value(const Dim1LyapunovFn& fn, std::span<const double> x) {
    const auto a = anchor(fn.geometry, x);
    const auto& w = fn.geometry.w;
    StateVec z(x.size());
    auto integrand = [&](double tau) {
        for (std::size_t j = 0; j < z.size(); ++j) z[j] = a.y_dagger[j] + tau * w[j];
        return std::log(solve_u(fn.geometry, fn.network, z));
    };
    const auto q = detail::segment_integral<double>(integrand, a.gamma, detail::endpoint_gap(fn.geometry, x, a.gamma),
                                                    fn.quadrature);
    if (!q.converged && q.error_estimate > fn.quadrature.abs_tol)
        throw EvaluationError("f_value: quadrature did not converge (error bound " + fmt_num(q.error_estimate) + ")");
    return q.value;
}

/// Full analytic gradient of f:
///   grad f = ln u~(x) grad gamma + integral_0^gamma [grad phi - (w . grad phi) grad gamma](y+ + tau w) dtau,
/// with phi = ln u~, grad phi = -(dg/dx) / (u~ dg/du), grad gamma = grad h / (w . grad h)
/// and h the log form of J.
inline StateVec dim1_gradient(const Dim1LyapunovFn& fn, std::span<const double> x) {
    const auto& geo = fn.geometry;
    const auto a = anchor(geo, x);
    const auto n = x.size();

    StateVec grad_gamma(n, 0.0);
    double wdot = 0.0;
    for (auto i : geo.positive) grad_gamma[i] = 1.0 / a.y_dagger[i];
    for (auto i : geo.negative) grad_gamma[i] = -1.0 / a.y_dagger[i];
    for (std::size_t j = 0; j < n; ++j) wdot += geo.w[j] * grad_gamma[j];
    for (auto& v : grad_gamma) v /= wdot;

    StateVec z(n);
    auto integrand = [&](double tau) {
        for (std::size_t j = 0; j < n; ++j) z[j] = a.y_dagger[j] + tau * geo.w[j];
        const double u = solve_u(geo, fn.network, z);
        const auto gx = g_dx(geo, fn.network, z, u);
        const double gu = g_du(geo, fn.network, z, u);
        Eigen::VectorXd v(static_cast<Eigen::Index>(n));
        double along = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            v(static_cast<Eigen::Index>(j)) = -gx[j] / (u * gu);
            along += geo.w[j] * v(static_cast<Eigen::Index>(j));
        }
        for (std::size_t j = 0; j < n; ++j) v(static_cast<Eigen::Index>(j)) -= along * grad_gamma[j];
        return v;
    };
    const auto q = detail::segment_integral<Eigen::VectorXd>(integrand, a.gamma, detail::endpoint_gap(geo, x, a.gamma),
                                                             fn.quadrature);
    if (!q.converged && q.error_estimate > fn.quadrature.abs_tol)
        throw EvaluationError("dim1_gradient: quadrature did not converge (error bound " + fmt_num(q.error_estimate) + ")");

    const double phi = w_directional_grad(fn, x);
    StateVec g(n);
    for (std::size_t j = 0; j < n; ++j) g[j] = phi * grad_gamma[j] + (a.gamma == 0.0 ? 0.0 : q.value(static_cast<Eigen::Index>(j)));
    return g;
}

inline GradientOracle gradient_oracle(const Dim1LyapunovFn& fn) {
    return GradientOracle([fn](std::span<const double> x) { return dim1_gradient(fn, x); });
}

/// Sign of w^T dg/dx(x*, 1) decides local convexity of f at x* and local
/// asymptotic stability. Requires x* to be an equilibrium.
inline StabilityMargin stability_margin(const Dim1Geometry& geo, const Network& net, std::span<const double> x_star,
                                        double tol = 1e-8) {
    if (!all_positive(x_star)) throw PreconditionError("stability_margin: x* must be strictly positive");
    const auto rates = reaction_rates(net, x_star);
    double flux = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) flux += rates[i] * std::abs(geo.m[i]);
    const double g1 = g_eval(geo, net, x_star, 1.0);
    if (std::abs(g1) > tol * std::max(flux, 1.0))
        throw PreconditionError("stability_margin: x* is not an equilibrium (g(x*,1) = " + fmt_num(g1) + ")");
    // dg(x,1)/dx_j = sum_i m_i k_i v_ji x^{v.i} / x_j
    double margin = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        const auto& r = net.reaction(i);
        for (std::size_t j = 0; j < x_star.size(); ++j)
            if (r.reactant[j] != 0 && geo.w[j] != 0)
                margin += geo.w[j] * geo.m[i] * r.rate_const * monomial_partial(x_star, r.reactant, j);
    }
    return {margin, {margin, 0.0}};
}

namespace detail {

/// The two ends of the segment (x* + R w) intersected with the nonnegative orthant.
inline std::vector<StateVec> dim1_class_endpoints(const Dim1Geometry& geo, std::span<const double> x_star) {
    std::vector<StateVec> out;
    for (int sign : {+1, -1}) {
        double alpha = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < x_star.size(); ++j) {
            const int wj = sign * geo.w[j];
            if (wj < 0) alpha = std::min(alpha, x_star[j] / -wj);
        }
        if (!std::isfinite(alpha)) continue;
        StateVec xbar(x_star.size());
        for (std::size_t j = 0; j < x_star.size(); ++j) {
            const int wj = sign * geo.w[j];
            xbar[j] = x_star[j] + alpha * wj;
            if (wj < 0 && x_star[j] / -wj == alpha) xbar[j] = 0.0;
            xbar[j] = std::max(xbar[j], 0.0);
        }
        out.push_back(std::move(xbar));
    }
    return out;
}

}  // namespace detail

/// Builds the dim-1 function on x0's class. Failed hypotheses (boundary complex
/// sets, nonnegative margin) become warnings; the candidate is still returned.
inline Dim1LyapunovFn construct_dim1(const Network& net, std::span<const double> x0) {
    Dim1LyapunovFn fn;
    fn.geometry = dim1_geometry(net);
    detail::require_both_signs(fn.geometry);
    fn.network = net;
    fn.x_star = find_equilibrium(net, x0).x_star;
    fn.stability = stability_margin(fn.geometry, net, fn.x_star);
    if (!(fn.stability.margin < 0.0))
        fn.warnings.push_back("stability margin w^T dg/dx(x*,1) = " + fmt_num(fn.stability.margin) +
                              " is not negative; local convexity is not certified");

    for (auto& xbar : detail::dim1_class_endpoints(fn.geometry, fn.x_star)) {
        Dim1BoundaryFace face;
        face.xbar = xbar;
        const auto bp = make_boundary_point(std::move(xbar), fn.x_star);
        const auto cs = naive_boundary_set(net, bp);
        face.naive_set_empty = cs.empty();
        for (const auto& r : net.reactions()) {
            face.has_reactant = face.has_reactant || cs.contains(r.reactant);
            face.has_resultant = face.has_resultant || cs.contains(r.product);
        }
        face.assumption_holds = face.naive_set_empty || (face.has_reactant && face.has_resultant);
        if (!face.assumption_holds) {
            std::string where;
            for (std::size_t j = 0; j < face.xbar.size(); ++j) where += (j ? "," : "") + fmt_num(face.xbar[j]);
            fn.warnings.push_back("naive boundary complex set at (" + where +
                                  ") lacks a reactant or a resultant complex; boundary condition not guaranteed");
        }
        fn.faces.push_back(std::move(face));
    }
    return fn;
}

}  // namespace crnlyap

#endif  // CRNLYAP_DIM1_HPP
