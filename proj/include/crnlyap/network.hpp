#ifndef CRNLYAP_NETWORK_HPP
#define CRNLYAP_NETWORK_HPP

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "crnlyap/error.hpp"

namespace crnlyap {

/// Concentration vector x (or any real n-vector).
using StateVec = std::vector<double>;
/// Molecule counts N.
using CountVec = std::vector<long long>;

/// Stoichiometric coefficients of one complex, indexed by species.
struct Complex {
    std::vector<int> coeffs;

    std::size_t size() const noexcept { return coeffs.size(); }
    int operator[](std::size_t j) const { return coeffs[j]; }

    /// |v|, the molecularity.
    int order() const {
        int s = 0;
        for (int c : coeffs) s += c;
        return s;
    }

    bool is_zero() const {
        return std::all_of(coeffs.begin(), coeffs.end(), [](int c) { return c == 0; });
    }

    friend auto operator<=>(const Complex&, const Complex&) = default;
    friend bool operator==(const Complex&, const Complex&) = default;
};

struct Reaction {
    Complex reactant;
    Complex product;
    double rate_const = 1.0;

    /// v' - v.
    std::vector<int> delta() const {
        std::vector<int> d(reactant.size());
        for (std::size_t j = 0; j < d.size(); ++j) d[j] = product[j] - reactant[j];
        return d;
    }
};

/// Mass-action network {S, C, R}. Validated on construction and immutable.
class Network {
public:
    Network() = default;

    Network(std::vector<std::string> species_names, std::vector<Reaction> reactions)
        : species_(std::move(species_names)), reactions_(std::move(reactions)) {
        validate();
    }

    std::size_t num_species() const noexcept { return species_.size(); }
    std::size_t num_reactions() const noexcept { return reactions_.size(); }
    const std::vector<std::string>& species_names() const noexcept { return species_; }
    const std::vector<Reaction>& reactions() const noexcept { return reactions_; }
    const Reaction& reaction(std::size_t i) const { return reactions_.at(i); }

    /// Copy of the network with different rate constants (same order as reactions()).
    Network with_rates(std::span<const double> k) const {
        if (k.size() != reactions_.size())
            throw StructuralError("with_rates: expected " + std::to_string(reactions_.size()) + " rates");
        auto rs = reactions_;
        for (std::size_t i = 0; i < rs.size(); ++i) rs[i].rate_const = k[i];
        return Network(species_, std::move(rs));
    }

    std::vector<double> rates() const {
        std::vector<double> k;
        k.reserve(reactions_.size());
        for (const auto& r : reactions_) k.push_back(r.rate_const);
        return k;
    }

    friend bool operator==(const Network& a, const Network& b) {
        if (a.species_ != b.species_ || a.reactions_.size() != b.reactions_.size()) return false;
        for (std::size_t i = 0; i < a.reactions_.size(); ++i) {
            const auto& ra = a.reactions_[i];
            const auto& rb = b.reactions_[i];
            if (ra.reactant != rb.reactant || ra.product != rb.product || ra.rate_const != rb.rate_const)
                return false;
        }
        return true;
    }

private:
    void validate() const {
        const auto n = species_.size();
        if (n == 0) throw StructuralError("network has no species");
        if (reactions_.empty()) throw StructuralError("network has no reactions");
        std::vector<bool> used(n, false);
        bool any_nonzero = false;
        for (std::size_t i = 0; i < reactions_.size(); ++i) {
            const auto& r = reactions_[i];
            if (r.reactant.size() != n || r.product.size() != n)
                throw StructuralError("reaction " + std::to_string(i + 1) + ": complex length differs from species count");
            if (!(r.rate_const > 0.0) || !std::isfinite(r.rate_const))
                throw DomainError("reaction " + std::to_string(i + 1) + ": rate constant must be positive and finite");
            if (r.reactant == r.product)
                throw StructuralError("reaction " + std::to_string(i + 1) + ": reactant equals product");
            for (std::size_t j = 0; j < n; ++j) {
                if (r.reactant[j] < 0 || r.product[j] < 0)
                    throw DomainError("reaction " + std::to_string(i + 1) + ": negative stoichiometric coefficient");
                if (r.reactant[j] > 0 || r.product[j] > 0) used[j] = true;
            }
            any_nonzero = any_nonzero || !r.reactant.is_zero() || !r.product.is_zero();
        }
        if (!any_nonzero) throw StructuralError("every complex is zero");
        for (std::size_t j = 0; j < n; ++j)
            if (!used[j]) throw StructuralError("species '" + species_[j] + "' appears in no complex");
    }

    std::vector<std::string> species_;
    std::vector<Reaction> reactions_;
};

namespace detail {

inline void check_dim(const Network& net, std::size_t size, const char* what) {
    if (size != net.num_species())
        throw StructuralError(std::string(what) + ": state has " + std::to_string(size) + " entries, network has " +
                              std::to_string(net.num_species()) + " species");
}

}  // namespace detail

/// x^v = prod_j x_j^{v_j}, with 0^0 = 1.
inline double monomial(std::span<const double> x, const Complex& v) {
    double p = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j)
        for (int e = 0; e < v[j]; ++e) p *= x[j];
    return p;
}

/// k_i x^{v.i} for every reaction.
inline std::vector<double> reaction_rates(const Network& net, std::span<const double> x) {
    detail::check_dim(net, x.size(), "reaction_rates");
    std::vector<double> rates;
    rates.reserve(net.num_reactions());
    for (const auto& r : net.reactions()) rates.push_back(r.rate_const * monomial(x, r.reactant));
    return rates;
}

/// dx/dt = sum_i k_i x^{v.i} (v'.i - v.i).
inline StateVec vector_field(const Network& net, std::span<const double> x) {
    const auto rates = reaction_rates(net, x);
    StateVec dx(net.num_species(), 0.0);
    for (std::size_t i = 0; i < rates.size(); ++i) {
        const auto& r = net.reaction(i);
        for (std::size_t j = 0; j < dx.size(); ++j) {
            const int d = r.product[j] - r.reactant[j];
            if (d != 0) dx[j] += rates[i] * d;
        }
    }
    return dx;
}

/// d(x^v)/dx_j = v_j x^{v - e_j}; well defined at zero entries.
inline double monomial_partial(std::span<const double> x, const Complex& v, std::size_t j) {
    if (v[j] == 0) return 0.0;
    double p = static_cast<double>(v[j]);
    for (std::size_t l = 0; l < x.size(); ++l) {
        const int e = (l == j) ? v[l] - 1 : v[l];
        for (int c = 0; c < e; ++c) p *= x[l];
    }
    return p;
}

/// Jacobian of vector_field, J(a, b) = d(dx_a/dt)/dx_b.
inline Eigen::MatrixXd field_jacobian(const Network& net, std::span<const double> x) {
    detail::check_dim(net, x.size(), "field_jacobian");
    const auto n = net.num_species();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& r : net.reactions()) {
        for (std::size_t b = 0; b < n; ++b) {
            const double dr = r.rate_const * monomial_partial(x, r.reactant, b);
            if (dr == 0.0) continue;
            for (std::size_t a = 0; a < n; ++a) {
                const int d = r.product[a] - r.reactant[a];
                if (d != 0) jac(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += dr * d;
            }
        }
    }
    return jac;
}

/// Distinct complexes of a network in first-appearance order, with the
/// index of each reaction's reactant and product complex.
struct ComplexTable {
    std::vector<Complex> complexes;
    std::vector<std::size_t> reactant_of;
    std::vector<std::size_t> product_of;
};

inline ComplexTable complex_table(const Network& net) {
    ComplexTable t;
    auto index_of = [&t](const Complex& c) {
        auto it = std::find(t.complexes.begin(), t.complexes.end(), c);
        if (it != t.complexes.end()) return static_cast<std::size_t>(it - t.complexes.begin());
        t.complexes.push_back(c);
        return t.complexes.size() - 1;
    };
    for (const auto& r : net.reactions()) {
        t.reactant_of.push_back(index_of(r.reactant));
        t.product_of.push_back(index_of(r.product));
    }
    return t;
}

inline bool all_positive(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return v > 0.0; });
}

inline bool all_nonnegative(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return v >= 0.0; });
}

inline bool all_finite(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace crnlyap

#endif  // CRNLYAP_NETWORK_HPP
