#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace crnlyap;
using namespace testing_support;

namespace {

GradientOracle constant_gradient(StateVec g) {
    return GradientOracle([g](std::span<const double>) { return g; });
}

}  // namespace

TEST(PdeResidual, ZeroGradientGivesZero) {
    // exp(0) - 1 = 0 for every reaction
    const auto b = net_b(2, 3);
    EXPECT_EQ(pde_residual(b, constant_gradient({0, 0}), StateVec{0.4, 1.7}), 0.0);
}

TEST(PdeResidual, HandComputedNetB) {
    // grad f = (0, ln 2) at x = (1, 1): reaction 1 has delta^T g = ln 2, reaction 2 has -2 ln 2
    const auto b = net_b();
    const double r = pde_residual(b, constant_gradient({0, std::log(2.0)}), StateVec{1, 1});
    EXPECT_NEAR(r, -(2.0 - 1.0) - (0.25 - 1.0), 1e-15);
}

TEST(PdeResidual, RejectsBoundaryStates) {
    const auto b = net_b();
    EXPECT_THROW(pde_residual(b, constant_gradient({0, 0}), StateVec{0, 1}), PreconditionError);
    EXPECT_THROW(dissipation(b, constant_gradient({0, 0}), StateVec{1, -1}), PreconditionError);
}

TEST(PdeResidual, OracleDimensionChecked) {
    const auto b = net_b();
    EXPECT_THROW(pde_residual(b, constant_gradient({0}), StateVec{1, 1}), EvaluationError);
    const GradientOracle nan_grad([](std::span<const double>) { return StateVec{NAN, 0}; });
    EXPECT_THROW(pde_residual(b, nan_grad, StateVec{1, 1}), EvaluationError);
}

TEST(Dissipation, IsFieldDotGradient) {
    const auto c = net_c(1, 2, 3);
    const StateVec x{0.3, 1.1, 2.0}, g{1.0, -2.0, 0.5};
    const auto f = vector_field(c, x);
    EXPECT_NEAR(dissipation(c, constant_gradient(g), x), f[0] * g[0] + f[1] * g[1] + f[2] * g[2], 1e-14);
}

TEST(FiniteDifferenceOracle, MatchesQuadratic) {
    const auto fd = finite_difference_oracle([](std::span<const double> x) { return x[0] * x[0] + 3 * x[0] * x[1]; });
    EXPECT_EQ(fd.kind(), GradientOracle::Kind::finite_difference);
    const auto g = fd(StateVec{2.0, 0.5});
    EXPECT_NEAR(g[0], 4.0 + 1.5, 1e-8);
    EXPECT_NEAR(g[1], 6.0, 1e-8);
}

TEST(BoundarySet, NaiveMembershipMatchesBruteForce) {
    // Brute force: a complex belongs iff every species with positive coefficient is positive at xbar.
    const auto d = load("netd.crn");
    const auto table = complex_table(d.network);
    const std::size_t n = d.network.num_species();
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        StateVec xbar(n, 1.0);
        for (std::size_t j = 0; j < n; ++j)
            if (mask & (1u << j)) xbar[j] = 0.0;
        const auto bp = make_boundary_point(xbar);
        const auto cs = naive_boundary_set(d.network, bp);
        for (const auto& z : table.complexes) {
            bool expected = true;
            for (std::size_t j = 0; j < n; ++j)
                if (z[j] > 0 && xbar[j] == 0.0) expected = false;
            EXPECT_EQ(cs.contains(z), expected);
        }
    }
}

TEST(BoundarySet, RequiresZeroEntry) {
    EXPECT_THROW(make_boundary_point(StateVec{1, 2}), PreconditionError);
    EXPECT_THROW(make_boundary_point(StateVec{-1, 2}), PreconditionError);
}

TEST(BoundaryResidual, EmptySetIsTriviallyZero) {
    // every NET-E complex contains S2, so the face S2 = 0 has an empty naive set
    const auto e = net_e();
    const auto bp = make_boundary_point(StateVec{1, 0});
    const auto cs = naive_boundary_set(e, bp);
    EXPECT_TRUE(cs.empty());
    const auto lim = boundary_residual(e, constant_gradient({0, 0}), bp, cs, StateVec{-1, 1});
    EXPECT_TRUE(lim.trivially_zero);
    EXPECT_EQ(lim.limit, 0.0);
}

TEST(BoundaryResidual, GibbsBalancesExactly) {
    // NET-A with G at x* = (1, 1): at xbar = (0, 2) the naive set is {S2}, and
    // along (t, 2 - t) inflow t (2 - t) / t cancels outflow 2 - t identically.
    const auto a = net_a();
    const GibbsFn g{{1, 1}};
    const GradientOracle grad([&](std::span<const double> x) { return gibbs_gradient(g, x); });
    const auto bp = make_boundary_point(StateVec{0, 2});
    const auto cs = naive_boundary_set(a, bp);
    ASSERT_EQ(cs.complexes.size(), 1u);
    const auto lim = boundary_residual(a, grad, bp, cs, StateVec{1, -1});
    EXPECT_TRUE(lim.determinate);
    EXPECT_NEAR(lim.limit, 0.0, 1e-12);
}

TEST(BoundaryResidual, DetectsNonzeroLimit) {
    // a deliberately wrong gradient: grad f = 0 leaves out-flux of S2 unbalanced at xbar = (0, 2)
    const auto a = net_a();
    const auto bp = make_boundary_point(StateVec{0, 2});
    const auto cs = naive_boundary_set(a, bp);
    const auto lim = boundary_residual(a, constant_gradient({0, 0}), bp, cs, StateVec{1, -1});
    // along (t, 2 - t): out = 2 - t, in = t, so R(t) = 2 - 2t and Richardson is exact
    EXPECT_TRUE(lim.determinate);
    EXPECT_NEAR(lim.limit, 2.0, 1e-9);
    EXPECT_NEAR(lim.order, 1.0, 1e-6);
}

TEST(BoundaryResidual, RejectsOutwardDirection) {
    const auto a = net_a();
    const auto bp = make_boundary_point(StateVec{0, 2});
    EXPECT_THROW(boundary_residual(a, constant_gradient({0, 0}), bp, naive_boundary_set(a, bp), StateVec{-1, 1}),
                 PreconditionError);
}
