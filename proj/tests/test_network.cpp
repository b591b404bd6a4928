#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Dense>

#include "support.hpp"

using namespace crnlyap;
using namespace testing_support;

TEST(ReactionRates, NetBSubstitution) {
    const auto b = net_b();
    EXPECT_EQ(reaction_rates(b, StateVec{1, 1}), (std::vector<double>{1, 1}));
    EXPECT_EQ(reaction_rates(b, StateVec{2, 1}), (std::vector<double>{2, 1}));
}

TEST(ReactionRates, ZeroFactorAndZeroPower) {
    const auto b = net_b();
    EXPECT_EQ(reaction_rates(b, StateVec{0, 3})[0], 0.0);
    EXPECT_EQ(reaction_rates(b, StateVec{5, 0})[1], 0.0);
    // 0^0 = 1: the inflow 0 -> X has rate k regardless of x
    const auto bd = net("0 -> X ; k=2.5\nX -> 0 ; k=0.5\n");
    EXPECT_EQ(reaction_rates(bd, StateVec{0})[0], 2.5);
}

TEST(ReactionRates, DimensionMismatchIsStructural) {
    EXPECT_THROW(reaction_rates(net_b(), StateVec{1, 1, 1}), StructuralError);
    EXPECT_THROW(vector_field(net_b(), StateVec{1}), StructuralError);
}

TEST(ReactionRates, Homogeneous) {
    const auto e = net_e(1.3, 0.7);
    CounterRng rng(11);
    for (int t = 0; t < 100; ++t) {
        const StateVec x{rng.uniform(0.1, 3), rng.uniform(0.1, 3)};
        const double c = rng.uniform(0.2, 5);
        const auto r1 = reaction_rates(e, x);
        const auto r2 = reaction_rates(e, StateVec{c * x[0], c * x[1]});
        for (std::size_t i = 0; i < r1.size(); ++i) {
            const int order = e.reaction(i).reactant.order();
            EXPECT_NEAR(r2[i], std::pow(c, order) * r1[i], 1e-12 * r2[i]);
        }
    }
}

TEST(VectorField, Examples) {
    EXPECT_EQ(vector_field(net_b(), StateVec{2, 1}), (StateVec{0, 0}));
    EXPECT_EQ(vector_field(net_b(), StateVec{1, 1}), (StateVec{1, -1}));
    EXPECT_EQ(vector_field(net_c(), StateVec{1, 1, 1}), (StateVec{0, 0, 0}));
}

TEST(VectorField, JacobianMatchesFiniteDifferences) {
    const auto c = net_c(1.5, 0.5, 2.0);
    const StateVec x{0.7, 1.3, 0.4};
    const auto jac = field_jacobian(c, x);
    for (std::size_t k = 0; k < 3; ++k) {
        StateVec up = x, dn = x;
        const double h = 1e-6;
        up[k] += h;
        dn[k] -= h;
        const auto fu = vector_field(c, up), fd = vector_field(c, dn);
        for (std::size_t j = 0; j < 3; ++j)
            EXPECT_NEAR(jac(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)), (fu[j] - fd[j]) / (2 * h), 1e-7);
    }
}

TEST(Network, RejectsInvalidInput) {
    auto c = [](std::vector<int> v) { return Complex{std::move(v)}; };
    EXPECT_THROW(Network({}, {}), StructuralError);
    EXPECT_THROW(Network({"A"}, {}), StructuralError);
    EXPECT_THROW(Network({"A", "B"}, {Reaction{c({1, 0}), c({1, 0}), 1.0}}), StructuralError);
    EXPECT_THROW(Network({"A", "B"}, {Reaction{c({1, 0}), c({0, 1}), 0.0}}), DomainError);
    EXPECT_THROW(Network({"A", "B"}, {Reaction{c({1, 0}), c({0, 1}), -2.0}}), DomainError);
    EXPECT_THROW(Network({"A", "B", "C"}, {Reaction{c({1, 0, 0}), c({0, 1, 0}), 1.0}}), StructuralError);
    EXPECT_THROW(Network({"A", "B"}, {Reaction{c({1, 0}), c({0, 1, 0}), 1.0}}), StructuralError);
    EXPECT_NO_THROW(Network({"A", "B"}, {Reaction{c({1, 0}), c({0, 1}), 1.0}}));
}

TEST(Structure, NetBLine) {
    const auto s = stoich_structure(net_b());
    ASSERT_EQ(s.dim, 1u);
    // S = span{(-1, 1)}
    const auto& v = s.s_basis[0];
    EXPECT_NEAR(v[0] + v[1], 0.0, 1e-14);
    EXPECT_EQ(s.num_complexes, 4u);
    EXPECT_EQ(s.linkage_classes, 2u);
    EXPECT_EQ(s.deficiency, 1);
}

TEST(Structure, NetCPlane) {
    const auto s = stoich_structure(net_c());
    ASSERT_EQ(s.dim, 2u);
    ASSERT_EQ(s.orth_basis.size(), 1u);
    const auto& q = s.orth_basis[0];
    EXPECT_NEAR(q[0], q[1], 1e-14 * std::abs(q[0]));
    EXPECT_NEAR(q[1], q[2], 1e-14 * std::abs(q[0]));
    EXPECT_EQ(s.deficiency, 1);
}

TEST(Structure, Deficiencies) {
    EXPECT_EQ(stoich_structure(net_a()).deficiency, 0);
    EXPECT_EQ(stoich_structure(triangle()).deficiency, 0);
    EXPECT_EQ(stoich_structure(net_e()).deficiency, 1);
}

TEST(Structure, OrthBasisAnnihilatesReactionVectors) {
    for (const char* f : {"neta.crn", "netb.crn", "netc.crn", "netd.crn", "nete.crn", "triangle.crn", "reversible.crn"}) {
        const auto d = load(f);
        const auto s = stoich_structure(d.network);
        EXPECT_EQ(s.dim + s.orth_basis.size(), d.network.num_species()) << f;
        for (const auto& q : s.orth_basis)
            for (const auto& r : d.network.reactions()) {
                double dot = 0;
                const auto delta = r.delta();
                for (std::size_t j = 0; j < q.size(); ++j) dot += q[j] * delta[j];
                EXPECT_NEAR(dot, 0.0, 1e-12) << f;
            }
    }
}

TEST(Structure, RankAgreesWithEigenLu) {
    // Independent oracle: Eigen's full-pivot LU rank on random small integer matrices.
    CounterRng rng(5);
    for (int t = 0; t < 200; ++t) {
        const int n = 1 + static_cast<int>(rng.uniform() * 5), r = 1 + static_cast<int>(rng.uniform() * 6);
        Eigen::MatrixXd m(n, r);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < r; ++j) m(i, j) = std::floor(rng.uniform(-2.0, 3.0));
        if (t % 3 == 0 && r > 1) m.col(r - 1) = 2 * m.col(0) - m.col(r - 2);
        const auto re = detail::reduced_row_echelon(m);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
        EXPECT_EQ(static_cast<long>(re.pivot_cols.size()), static_cast<long>(lu.rank()));
    }
}

TEST(Structure, FieldOrthogonalToConservationLaws) {
    const auto d = load("netd.crn");
    const auto s = stoich_structure(d.network);
    CounterRng rng(3);
    for (int t = 0; t < 200; ++t) {
        StateVec x(d.network.num_species());
        for (auto& v : x) v = rng.uniform(0.01, 5);
        const auto f = vector_field(d.network, x);
        for (const auto& q : s.orth_basis) {
            double dot = 0;
            for (std::size_t j = 0; j < q.size(); ++j) dot += q[j] * f[j];
            EXPECT_NEAR(dot, 0.0, 1e-12);
        }
    }
}

TEST(Equilibrium, Examples) {
    auto check = [](const Network& n, StateVec x0, StateVec expected) {
        const auto eq = find_equilibrium(n, x0);
        for (std::size_t j = 0; j < expected.size(); ++j) EXPECT_NEAR(eq.x_star[j], expected[j], 1e-10);
        EXPECT_LT(max_abs(vector_field(n, eq.x_star)), 1e-11);
        EXPECT_LT(conservation_gap(stoich_structure(n), eq.x_star, x0), 1e-10);
    };
    check(net_b(), {3, 0}, {2, 1});
    check(net_a(), {2, 0}, {1, 1});
    check(net_c(), {1, 1, 1}, {1, 1, 1});
    check(triangle(), {3, 0, 0}, {1, 1, 1});
    check(triangle(2, 3, 5), {15 + 10 + 6, 0, 0}, {15, 10, 6});
}

TEST(Equilibrium, EmptyInteriorIsPreconditionError) {
    // class of (0,0) for S1 <-> S2 is the single point 0
    EXPECT_THROW(find_equilibrium(net_a(), StateVec{0, 0}), PreconditionError);
}

TEST(Equilibrium, MultiStartDeduplicates) {
    const auto all = find_equilibria(net_b(), StateVec{3, 0});
    ASSERT_EQ(all.size(), 1u);
    EXPECT_FALSE(all[0].complex_balanced);
}

TEST(ComplexBalance, Examples) {
    EXPECT_TRUE(is_complex_balanced(net_a(), StateVec{1, 1}).balanced);
    const auto nb = is_complex_balanced(net_b(), StateVec{2, 1});
    EXPECT_FALSE(nb.balanced);
    // complex S1 (first in the table) has outflow 2, inflow 0
    EXPECT_EQ(nb.outflow[0], 2.0);
    EXPECT_EQ(nb.inflow[0], 0.0);
    const double k1 = 0.3, k2 = 2.0, k3 = 1.7;
    EXPECT_TRUE(is_complex_balanced(triangle(k1, k2, k3), StateVec{k2 * k3, k1 * k3, k1 * k2}).balanced);
    EXPECT_THROW(is_complex_balanced(net_a(), StateVec{0, 1}), PreconditionError);
}
