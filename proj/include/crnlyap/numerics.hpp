#ifndef CRNLYAP_NUMERICS_HPP
#define CRNLYAP_NUMERICS_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "crnlyap/error.hpp"

namespace crnlyap::numerics {

struct Bracket {
    double lo;
    double hi;
};

/// Bisection on [lo, hi] for a function whose sign differs at the two ends.
/// Stops when the interval is within rel_tol of its magnitude (or abs_floor),
/// or when the midpoint can no longer be represented between the ends.
template <class F>
double bisect(F&& f, double lo, double hi, double rel_tol = 4 * std::numeric_limits<double>::epsilon(),
              double abs_floor = 0.0, int max_iter = 2000) {
    double flo = f(lo);
    if (flo == 0.0) return lo;
    const double fhi = f(hi);
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) throw EvaluationError("bisect: root not bracketed");
    for (int it = 0; it < max_iter; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= std::min(lo, hi) || mid >= std::max(lo, hi)) break;
        if (std::abs(hi - lo) <= std::max(rel_tol * std::max(std::abs(lo), std::abs(hi)), abs_floor)) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return lo + 0.5 * (hi - lo);
}

/// Brackets the unique positive root of an increasing function by doubling or
/// halving from `start`.
template <class F>
Bracket bracket_positive_increasing(F&& f, double start = 1.0) {
    constexpr double big = 1e300, tiny = 1e-300;
    const double f0 = f(start);
    if (f0 == 0.0) return {start, start};
    if (f0 < 0.0) {
        double lo = start, hi = start * 2.0;
        while (f(hi) < 0.0) {
            lo = hi;
            hi *= 2.0;
            if (hi > big) throw EvaluationError("bracket: no sign change below 1e300");
        }
        return {lo, hi};
    }
    double hi = start, lo = start * 0.5;
    while (f(lo) > 0.0) {
        hi = lo;
        lo *= 0.5;
        if (lo < tiny) throw EvaluationError("bracket: no sign change above 1e-300");
    }
    return {lo, hi};
}

template <class T>
struct QuadratureResult {
    T value;
    double error_estimate = 0.0;
    bool converged = true;
};

namespace detail {

inline double qnorm(double v) { return std::abs(v); }
inline double qnorm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

template <class T, class F>
T simpson_recurse(F& f, double a, double b, const T& fa, const T& fm, const T& fb, const T& whole, double tol,
                  int depth, double& err, bool& converged) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const T flm = f(lm), frm = f(rm);
    const double h = (b - a) / 12.0;
    const T left = h * (fa + 4.0 * flm + fm);
    const T right = h * (fm + 4.0 * frm + fb);
    const T both = left + right;
    const T delta = both - whole;
    const double d = qnorm(delta);
    // Below a few ulps of the local integral the test can only be met by roundoff luck.
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * qnorm(both);
    if (d <= 15.0 * std::max(tol, floor)) {
        err += d / 15.0;
        return both + delta / 15.0;
    }
    if (depth <= 0) {
        converged = false;
        err += d / 15.0;
        return both + delta / 15.0;
    }
    return simpson_recurse<T>(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err, converged) +
           simpson_recurse<T>(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err, converged);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] (b < a allowed) with Richardson
/// correction. T is double or Eigen::VectorXd; the error test uses the max norm.
template <class T, class F>
QuadratureResult<T> adaptive_simpson(F&& f, double a, double b, double abs_tol, int max_depth = 40) {
    const T fa = f(a), fb = f(b);
    if (a == b) return {T(fa * 0.0), 0.0, true};
    const double m = 0.5 * (a + b);
    const T fm = f(m);
    const T whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    QuadratureResult<T> out{whole, 0.0, true};
    out.value = detail::simpson_recurse<T>(f, a, b, fa, fm, fb, whole, abs_tol, max_depth, out.error_estimate,
                                           out.converged);
    return out;
}

}  // namespace crnlyap::numerics

#endif  // CRNLYAP_NUMERICS_HPP
