#ifndef CRNLYAP_STRUCTURE_HPP
#define CRNLYAP_STRUCTURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "crnlyap/network.hpp"

namespace crnlyap {

/// Stoichiometric subspace S, its orthogonal complement, and the deficiency.
struct StoichStructure {
    /// Linearly independent reaction vectors spanning S.
    std::vector<StateVec> s_basis;
    /// Basis of S-perp (conservation laws), one vector per conserved quantity.
    std::vector<StateVec> orth_basis;
    std::size_t dim = 0;
    std::size_t num_complexes = 0;
    std::size_t linkage_classes = 0;
    long deficiency = 0;
};

namespace detail {

struct RowEchelon {
    Eigen::MatrixXd reduced;
    std::vector<Eigen::Index> pivot_cols;
};

/// Gauss-Jordan elimination with partial pivoting inside each column; entries
/// below rel_tol * max|a| are treated as zero.
inline RowEchelon reduced_row_echelon(Eigen::MatrixXd a, double rel_tol = 1e-10) {
    const double scale = a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
    const double tol = rel_tol * std::max(scale, 1e-300);
    RowEchelon out;
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < a.cols() && row < a.rows(); ++col) {
        Eigen::Index best = row;
        for (Eigen::Index i = row + 1; i < a.rows(); ++i)
            if (std::abs(a(i, col)) > std::abs(a(best, col))) best = i;
        if (std::abs(a(best, col)) <= tol) {
            a.col(col).tail(a.rows() - row).setZero();
            continue;
        }
        a.row(row).swap(a.row(best));
        a.row(row) /= a(row, col);
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (i == row || a(i, col) == 0.0) continue;
            a.row(i) -= a(i, col) * a.row(row);
        }
        out.pivot_cols.push_back(col);
        ++row;
    }
    out.reduced = std::move(a);
    return out;
}

inline std::size_t count_components(std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    std::vector<std::size_t> parent(nodes);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&parent](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    std::size_t comps = nodes;
    for (auto [a, b] : edges) {
        const auto ra = find(a), rb = find(b);
        if (ra != rb) {
            parent[ra] = rb;
            --comps;
        }
    }
    return comps;
}

}  // namespace detail

/// n x r matrix whose columns are the reaction vectors v'.i - v.i.
inline Eigen::MatrixXd reaction_matrix(const Network& net) {
    const auto n = static_cast<Eigen::Index>(net.num_species());
    const auto r = static_cast<Eigen::Index>(net.num_reactions());
    Eigen::MatrixXd gamma(n, r);
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto& rx = net.reaction(static_cast<std::size_t>(i));
        for (Eigen::Index j = 0; j < n; ++j)
            gamma(j, i) = rx.product[static_cast<std::size_t>(j)] - rx.reactant[static_cast<std::size_t>(j)];
    }
    return gamma;
}

inline StoichStructure stoich_structure(const Network& net) {
    const Eigen::MatrixXd gamma = reaction_matrix(net);
    StoichStructure s;

    const auto col_form = detail::reduced_row_echelon(gamma);
    for (auto c : col_form.pivot_cols) {
        StateVec v(gamma.rows());
        for (Eigen::Index j = 0; j < gamma.rows(); ++j) v[static_cast<std::size_t>(j)] = gamma(j, c);
        s.s_basis.push_back(std::move(v));
    }
    s.dim = s.s_basis.size();

    // Null space of gamma^T: free columns of its reduced form.
    const auto row_form = detail::reduced_row_echelon(gamma.transpose());
    const auto n = gamma.rows();
    std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
    for (auto c : row_form.pivot_cols) is_pivot[static_cast<std::size_t>(c)] = true;
    for (Eigen::Index f = 0; f < n; ++f) {
        if (is_pivot[static_cast<std::size_t>(f)]) continue;
        StateVec v(static_cast<std::size_t>(n), 0.0);
        v[static_cast<std::size_t>(f)] = 1.0;
        for (std::size_t k = 0; k < row_form.pivot_cols.size(); ++k)
            v[static_cast<std::size_t>(row_form.pivot_cols[k])] = -row_form.reduced(static_cast<Eigen::Index>(k), f);
        s.orth_basis.push_back(std::move(v));
    }

    const auto table = complex_table(net);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < net.num_reactions(); ++i) edges.emplace_back(table.reactant_of[i], table.product_of[i]);
    s.num_complexes = table.complexes.size();
    s.linkage_classes = detail::count_components(s.num_complexes, edges);
    s.deficiency = static_cast<long>(s.num_complexes) - static_cast<long>(s.linkage_classes) - static_cast<long>(s.dim);
    return s;
}

/// Orthonormal basis (as matrix columns) for the span of the given vectors.
inline Eigen::MatrixXd orthonormal_columns(const std::vector<StateVec>& vectors, std::size_t n) {
    if (vectors.empty()) return Eigen::MatrixXd(static_cast<Eigen::Index>(n), 0);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t c = 0; c < vectors.size(); ++c)
        for (std::size_t j = 0; j < n; ++j) m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) = vectors[c][j];
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

/// Orthogonal projection of v onto S.
inline StateVec project_onto_subspace(const StoichStructure& s, std::span<const double> v) {
    const auto q = orthonormal_columns(s.s_basis, v.size());
    Eigen::Map<const Eigen::VectorXd> ev(v.data(), static_cast<Eigen::Index>(v.size()));
    const Eigen::VectorXd p = q * (q.transpose() * ev);
    return StateVec(p.data(), p.data() + p.size());
}

/// Max over conservation laws of |q . (a - b)|.
inline double conservation_gap(const StoichStructure& s, std::span<const double> a, std::span<const double> b) {
    double gap = 0.0;
    for (const auto& q : s.orth_basis) {
        double d = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) d += q[j] * (a[j] - b[j]);
        gap = std::max(gap, std::abs(d));
    }
    return gap;
}

}  // namespace crnlyap

#endif  // CRNLYAP_STRUCTURE_HPP
