#ifndef CRNLYAP_GIBBS_HPP
#define CRNLYAP_GIBBS_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "crnlyap/equilibrium.hpp"
#include "crnlyap/error.hpp"
#include "crnlyap/network.hpp"

namespace crnlyap {

/// Gibbs free energy G(x) = sum_j x_j (ln x_j - ln x*_j - 1) + x*_j.
struct GibbsFn {
    StateVec x_star;
};

namespace detail {

/// r ln r - r + 1, accurate near r = 1.
inline double gibbs_kernel(double r) {
    const double d = r - 1.0;
    if (std::abs(d) < 0.1) {
        // sum_{k>=2} (-1)^k d^k / (k (k-1))
        double term = d * d, sum = 0.0;
        for (int k = 2; k < 40; ++k) {
            const double t = term / (k * (k - 1.0));
            sum += (k % 2 == 0) ? t : -t;
            if (std::abs(t) < 1e-18 * std::abs(sum)) break;
            term *= d;
        }
        return sum;
    }
    return r * std::log(r) - d;
}

inline void require_positive_state(std::span<const double> x, std::size_t n, const char* what) {
    if (x.size() != n) throw StructuralError(std::string(what) + ": state has wrong dimension");
    for (double v : x)
        if (!(v > 0.0)) throw DomainError(std::string(what) + ": entries must be strictly positive");
}

}  // namespace detail

inline double gibbs_value(const GibbsFn& fn, std::span<const double> x) {
    detail::require_positive_state(x, fn.x_star.size(), "gibbs_value");
    double g = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) g += fn.x_star[j] * detail::gibbs_kernel(x[j] / fn.x_star[j]);
    return g;
}

/// grad G = Ln(x / x*).
inline StateVec gibbs_gradient(const GibbsFn& fn, std::span<const double> x) {
    detail::require_positive_state(x, fn.x_star.size(), "gibbs_gradient");
    StateVec g(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) g[j] = std::log(x[j] / fn.x_star[j]);
    return g;
}

/// Locates the equilibrium of x0's class and certifies complex balance there
/// (rel_tol 1e-9) before returning G.
inline GibbsFn construct_gibbs(const Network& net, std::span<const double> x0) {
    const auto eq = find_equilibrium(net, x0);
    const auto cb = is_complex_balanced(net, eq.x_star, 1e-9);
    if (!cb.balanced)
        throw ConstructionError("equilibrium is not complex balanced; try the dim1 or composite constructors");
    return GibbsFn{eq.x_star};
}

}  // namespace crnlyap

#endif  // CRNLYAP_GIBBS_HPP
