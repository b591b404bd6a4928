#ifndef CRNLYAP_LYAPUNOV_HPP
#define CRNLYAP_LYAPUNOV_HPP

#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "crnlyap/composite.hpp"
#include "crnlyap/dim1.hpp"
#include "crnlyap/gibbs.hpp"
#include "crnlyap/pde.hpp"

namespace crnlyap {

using LyapunovFn = std::variant<GibbsFn, Dim1LyapunovFn, ScaledGibbsFn, CompositeFn>;

/// Which boundary complex set the function is meant to satisfy the boundary condition with.
enum class BoundaryPolicy { naive, empty };

inline const char* method_name(const LyapunovFn& fn) {
    switch (fn.index()) {
        case 0: return "gibbs";
        case 1: return "dim1";
        case 2: return "cycle3";
        default: return "composite";
    }
}

inline double lyapunov_value(const LyapunovFn& fn, std::span<const double> x) {
    return std::visit(
        [&](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, GibbsFn>) return gibbs_value(f, x);
            else if constexpr (std::is_same_v<T, Dim1LyapunovFn>) return f_value(f, x);
            else if constexpr (std::is_same_v<T, ScaledGibbsFn>) return scaled_gibbs_value(f, x);
            else return composite_value(f, x);
        },
        fn);
}

inline StateVec lyapunov_gradient(const LyapunovFn& fn, std::span<const double> x) {
    return std::visit(
        [&](const auto& f) -> StateVec {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, GibbsFn>) return gibbs_gradient(f, x);
            else if constexpr (std::is_same_v<T, Dim1LyapunovFn>) return dim1_gradient(f, x);
            else if constexpr (std::is_same_v<T, ScaledGibbsFn>) return scaled_gibbs_gradient(f, x);
            else return composite_gradient(f, x);
        },
        fn);
}

inline GradientOracle gradient_oracle(const LyapunovFn& fn) {
    return GradientOracle([fn](std::span<const double> x) { return lyapunov_gradient(fn, x); });
}

inline GradientOracle value_fd_oracle(const LyapunovFn& fn) {
    return finite_difference_oracle([fn](std::span<const double> x) { return lyapunov_value(fn, x); });
}

inline const StateVec& equilibrium_of(const LyapunovFn& fn) {
    return std::visit([](const auto& f) -> const StateVec& { return f.x_star; }, fn);
}

inline BoundaryPolicy boundary_policy(const LyapunovFn& fn) {
    return std::holds_alternative<ScaledGibbsFn>(fn) ? BoundaryPolicy::empty : BoundaryPolicy::naive;
}

inline std::vector<std::string> construction_warnings(const LyapunovFn& fn) {
    if (const auto* d = std::get_if<Dim1LyapunovFn>(&fn)) return d->warnings;
    if (const auto* c = std::get_if<CompositeFn>(&fn)) return c->warnings;
    return {};
}

struct MarginEntry {
    /// Parent species indices of the dim1 block (all species for a plain dim1 function).
    std::vector<std::size_t> species;
    StabilityMargin margin;
};

/// Stability margins of every dim1 block.
inline std::vector<MarginEntry> stability_margins(const LyapunovFn& fn) {
    std::vector<MarginEntry> out;
    if (const auto* d = std::get_if<Dim1LyapunovFn>(&fn)) {
        std::vector<std::size_t> all(d->x_star.size());
        for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
        out.push_back({all, d->stability});
    }
    if (const auto* c = std::get_if<CompositeFn>(&fn))
        for (const auto& p : c->parts)
            if (const auto* d = std::get_if<Dim1LyapunovFn>(&p.fn)) out.push_back({p.species, d->stability});
    return out;
}

}  // namespace crnlyap

#endif  // CRNLYAP_LYAPUNOV_HPP
