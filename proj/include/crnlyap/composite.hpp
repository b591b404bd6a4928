#ifndef CRNLYAP_COMPOSITE_HPP
#define CRNLYAP_COMPOSITE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "crnlyap/dim1.hpp"
#include "crnlyap/equilibrium.hpp"
#include "crnlyap/error.hpp"
#include "crnlyap/gibbs.hpp"
#include "crnlyap/network.hpp"
#include "crnlyap/structure.hpp"

namespace crnlyap {

enum class PartClass { complex_balanced, dim1, cycle3, unsupported };

inline const char* to_string(PartClass c) {
    switch (c) {
        case PartClass::complex_balanced: return "complex_balanced";
        case PartClass::dim1: return "dim1";
        case PartClass::cycle3: return "cycle3";
        case PartClass::unsupported: return "unsupported";
    }
    return "unsupported";
}

// ---------------------------------------------------------------------------
// Three-species cycle 2S_i -> S_i + S_{i+1 mod 3}

struct Cycle3Match {
    /// perm[i] is the network species playing S_{i+1}.
    std::array<std::size_t, 3> perm{};
    /// k[i] is the rate of 2S_{i+1} -> S_{i+1} + S_{i+2}.
    std::array<double, 3> k{};
};

/// Exact match against the cycle pattern. Of the three cyclic rotations that
/// match, the one mapping reaction 0 to the first pattern reaction is returned.
inline std::optional<Cycle3Match> cycle3_match(const Network& net) {
    if (net.num_species() != 3 || net.num_reactions() != 3) return std::nullopt;
    std::array<std::size_t, 3> perm{0, 1, 2};
    do {
        std::array<int, 3> which{-1, -1, -1};  // reaction -> pattern index
        bool ok = true;
        for (std::size_t i = 0; i < 3 && ok; ++i) {
            const auto& r = net.reaction(i);
            for (int p = 0; p < 3; ++p) {
                std::vector<int> v(3, 0), vp(3, 0);
                v[perm[p]] = 2;
                vp[perm[p]] += 1;
                vp[perm[(p + 1) % 3]] += 1;
                if (r.reactant.coeffs == v && r.product.coeffs == vp) which[i] = p;
            }
            ok = which[i] >= 0;
        }
        if (!ok || which[0] != 0) continue;
        if (which[1] == which[2]) continue;
        Cycle3Match m;
        m.perm = perm;
        for (std::size_t i = 0; i < 3; ++i) m.k[static_cast<std::size_t>(which[i])] = net.reaction(i).rate_const;
        return m;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::nullopt;
}

/// Unique positive equilibrium of the cycle on {1^T x = class_sum}, in pattern order.
inline StateVec cycle3_equilibrium(const std::array<double, 3>& k, double class_sum) {
    for (double v : k)
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("cycle3_equilibrium: rates must be positive");
    if (!(class_sum > 0.0) || !std::isfinite(class_sum)) throw DomainError("cycle3_equilibrium: class sum must be positive");
    const double a = std::sqrt(k[1] * k[2]), b = std::sqrt(k[0] * k[2]), c = std::sqrt(k[0] * k[1]);
    const double scale = class_sum / (a + b + c);
    return {scale * a, scale * b, scale * c};
}

/// factor * G(x), with G the Gibbs function at x_star.
struct ScaledGibbsFn {
    double factor = 2.0;
    StateVec x_star;
};

inline double scaled_gibbs_value(const ScaledGibbsFn& fn, std::span<const double> x) {
    return fn.factor * gibbs_value(GibbsFn{fn.x_star}, x);
}

inline StateVec scaled_gibbs_gradient(const ScaledGibbsFn& fn, std::span<const double> x) {
    auto g = gibbs_gradient(GibbsFn{fn.x_star}, x);
    for (auto& v : g) v *= fn.factor;
    return g;
}

/// f = 2G on the cycle, solving the PDE with an empty boundary complex set.
inline ScaledGibbsFn construct_cycle3(const Network& net, std::span<const double> x0) {
    const auto m = cycle3_match(net);
    if (!m) throw StructuralError("construct_cycle3: network does not match 2S_i -> S_i + S_{i+1} on three species");
    detail::check_dim(net, x0.size(), "construct_cycle3");
    if (!all_nonnegative(x0)) throw DomainError("construct_cycle3: x0 must be nonnegative");
    const double total = std::accumulate(x0.begin(), x0.end(), 0.0);
    const auto xp = cycle3_equilibrium(m->k, total);
    ScaledGibbsFn fn;
    fn.x_star.assign(3, 0.0);
    for (std::size_t i = 0; i < 3; ++i) fn.x_star[m->perm[i]] = xp[i];
    return fn;
}

// ---------------------------------------------------------------------------
// Species-disjoint decomposition

struct DecompositionPart {
    Network network;
    /// Parent species index of each part species.
    std::vector<std::size_t> species;
    /// Parent reaction index of each part reaction.
    std::vector<std::size_t> reactions;
    PartClass classification = PartClass::unsupported;
};

struct Decomposition {
    std::size_t num_species = 0;
    std::vector<DecompositionPart> parts;
};

namespace detail {

inline StateVec restrict_state(std::span<const double> x, const std::vector<std::size_t>& idx) {
    StateVec out(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) out[j] = x[idx[j]];
    return out;
}

inline PartClass classify(const Network& net) {
    try {
        const StateVec ones(net.num_species(), 1.0);
        for (const auto& eq : find_equilibria(net, ones))
            if (eq.complex_balanced) return PartClass::complex_balanced;
    } catch (const Error&) {
    }
    if (stoich_structure(net).dim == 1) return PartClass::dim1;
    if (cycle3_match(net)) return PartClass::cycle3;
    return PartClass::unsupported;
}

}  // namespace detail

/// Splits the network into connected components of the species-reaction graph.
/// Complex-balanced parts come first; otherwise parts keep the order of their
/// lowest species index.
inline Decomposition decompose(const Network& net) {
    const auto n = net.num_species();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (const auto& r : net.reactions()) {
        std::optional<std::size_t> first;
        for (std::size_t j = 0; j < n; ++j) {
            if (r.reactant[j] == 0 && r.product[j] == 0) continue;
            if (!first) first = j;
            else parent[find(j)] = find(*first);
        }
    }

    std::vector<std::size_t> roots;
    for (std::size_t j = 0; j < n; ++j)
        if (std::find(roots.begin(), roots.end(), find(j)) == roots.end()) roots.push_back(find(j));

    Decomposition dec;
    dec.num_species = n;
    for (auto root : roots) {
        DecompositionPart part;
        for (std::size_t j = 0; j < n; ++j)
            if (find(j) == root) part.species.push_back(j);
        std::vector<std::string> names;
        for (auto j : part.species) names.push_back(net.species_names()[j]);
        std::vector<Reaction> rs;
        for (std::size_t i = 0; i < net.num_reactions(); ++i) {
            const auto& r = net.reaction(i);
            Complex a, b;
            bool touches = false;
            for (auto j : part.species) {
                a.coeffs.push_back(r.reactant[j]);
                b.coeffs.push_back(r.product[j]);
                touches = touches || r.reactant[j] != 0 || r.product[j] != 0;
            }
            if (!touches) continue;
            part.reactions.push_back(i);
            rs.push_back(Reaction{std::move(a), std::move(b), r.rate_const});
        }
        part.network = Network(std::move(names), std::move(rs));
        part.classification = detail::classify(part.network);
        dec.parts.push_back(std::move(part));
    }
    std::stable_partition(dec.parts.begin(), dec.parts.end(),
                          [](const DecompositionPart& p) { return p.classification == PartClass::complex_balanced; });
    return dec;
}

struct CompositePart {
    std::variant<GibbsFn, Dim1LyapunovFn> fn;
    std::vector<std::size_t> species;
    PartClass classification = PartClass::complex_balanced;
};

/// f(x) = sum_p f_p(x^(p)).
struct CompositeFn {
    std::size_t num_species = 0;
    std::vector<CompositePart> parts;
    StateVec x_star;
    std::vector<std::string> warnings;
};

inline double composite_value(const CompositeFn& fn, std::span<const double> x) {
    double f = 0.0;
    for (const auto& p : fn.parts) {
        const auto xp = detail::restrict_state(x, p.species);
        f += std::visit(
            [&](const auto& part) -> double {
                using T = std::decay_t<decltype(part)>;
                if constexpr (std::is_same_v<T, GibbsFn>) return gibbs_value(part, xp);
                else return f_value(part, xp);
            },
            p.fn);
    }
    return f;
}

inline StateVec composite_gradient(const CompositeFn& fn, std::span<const double> x) {
    if (x.size() != fn.num_species) throw StructuralError("composite_gradient: state has wrong dimension");
    StateVec g(x.size(), 0.0);
    for (const auto& p : fn.parts) {
        const auto xp = detail::restrict_state(x, p.species);
        const auto gp = std::visit(
            [&](const auto& part) -> StateVec {
                using T = std::decay_t<decltype(part)>;
                if constexpr (std::is_same_v<T, GibbsFn>) return gibbs_gradient(part, xp);
                else return dim1_gradient(part, xp);
            },
            p.fn);
        for (std::size_t j = 0; j < gp.size(); ++j) g[p.species[j]] = gp[j];
    }
    return g;
}

/// Builds one function per part and sums them. Parts must be complex balanced
/// or dim1; the composite equilibrium is the product of the part equilibria.
inline CompositeFn compose_lyapunov(const Decomposition& dec, std::span<const double> x0) {
    if (x0.size() != dec.num_species) throw StructuralError("compose_lyapunov: x0 has wrong dimension");
    CompositeFn out;
    out.num_species = dec.num_species;
    out.x_star.assign(dec.num_species, 0.0);

    std::size_t balanced = 0;
    for (std::size_t p = 0; p < dec.parts.size(); ++p) {
        const auto& part = dec.parts[p];
        if (part.classification != PartClass::complex_balanced && part.classification != PartClass::dim1) {
            std::string names;
            for (const auto& s : part.network.species_names()) names += (names.empty() ? "" : ",") + s;
            throw UnsupportedNetworkError("part " + std::to_string(p) + " {" + names + "} is classified " +
                                          to_string(part.classification) +
                                          "; composites support complex_balanced and dim1 parts only");
        }
        if (part.classification == PartClass::complex_balanced) ++balanced;
    }
    if (balanced == 0 && dec.parts.size() > 1)
        out.warnings.push_back("no complex-balanced part: beyond the stated hypotheses of the composite construction");
    if (balanced > 1)
        out.warnings.push_back("more than one complex-balanced part: beyond the stated hypotheses of the composite construction");

    for (std::size_t p = 0; p < dec.parts.size(); ++p) {
        const auto& part = dec.parts[p];
        const auto xp0 = detail::restrict_state(x0, part.species);
        CompositePart cp;
        cp.species = part.species;
        cp.classification = part.classification;
        StateVec xs;
        if (part.classification == PartClass::complex_balanced) {
            auto g = construct_gibbs(part.network, xp0);
            xs = g.x_star;
            cp.fn = std::move(g);
        } else {
            auto d = construct_dim1(part.network, xp0);
            xs = d.x_star;
            for (const auto& w : d.warnings) out.warnings.push_back("part " + std::to_string(p) + ": " + w);
            cp.fn = std::move(d);
        }
        for (std::size_t j = 0; j < xs.size(); ++j) out.x_star[part.species[j]] = xs[j];
        out.parts.push_back(std::move(cp));
    }
    return out;
}

}  // namespace crnlyap

#endif  // CRNLYAP_COMPOSITE_HPP
