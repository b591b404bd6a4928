#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace crnlyap;
using namespace testing_support;

TEST(Gibbs, ValueAndGradientClosedForm) {
    const GibbsFn g{{2.0, 0.5}};
    const StateVec x{1.0, 3.0};
    const double expected = 1.0 * (std::log(0.5) - 1) + 2.0 + 3.0 * (std::log(6.0) - 1) + 0.5;
    EXPECT_NEAR(gibbs_value(g, x), expected, 1e-14);
    const auto grad = gibbs_gradient(g, x);
    EXPECT_NEAR(grad[0], std::log(0.5), 1e-15);
    EXPECT_NEAR(grad[1], std::log(6.0), 1e-15);
    EXPECT_EQ(gibbs_value(g, g.x_star), 0.0);
}

TEST(Gibbs, AccurateNearEquilibrium) {
    // series branch: G ~ sum (x - x*)^2 / (2 x*)
    const GibbsFn g{{1.0}};
    const double d = 1e-7;
    EXPECT_NEAR(gibbs_value(g, StateVec{1.0 + d}), d * d / 2, 1e-6 * d * d);
}

TEST(Gibbs, RejectsNonpositive) {
    const GibbsFn g{{1.0, 1.0}};
    EXPECT_THROW(gibbs_value(g, StateVec{0.0, 1.0}), DomainError);
    EXPECT_THROW(gibbs_gradient(g, StateVec{1.0}), StructuralError);
}

TEST(Gibbs, ConstructRejectsNonComplexBalanced) {
    EXPECT_THROW(construct_gibbs(net_b(), StateVec{3, 0}), ConstructionError);
}

TEST(Gibbs, SolvesPdeForComplexBalancedNetworks) {
    CounterRng rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        const double k1 = rng.uniform(0.1, 10), k2 = rng.uniform(0.1, 10), k3 = rng.uniform(0.1, 10);
        const auto t = triangle(k1, k2, k3);
        const auto fn = construct_gibbs(t, StateVec{3, 0, 0});
        const GradientOracle grad([&](std::span<const double> x) { return gibbs_gradient(fn, x); });
        for (int s = 0; s < 100; ++s) {
            StateVec x{rng.uniform(0.01, 5), rng.uniform(0.01, 5), rng.uniform(0.01, 5)};
            const double scale = k1 * x[0] + k2 * x[1] + k3 * x[2];
            EXPECT_LT(std::abs(pde_residual(t, grad, x)), 1e-12 * std::max(1.0, scale));
            EXPECT_LE(dissipation(t, grad, x), 1e-12 * std::max(1.0, scale));
        }
    }
}

TEST(Gibbs, GradientMatchesFiniteDifferences) {
    const GibbsFn g{{0.7, 1.3, 2.0}};
    const auto fd = finite_difference_oracle([&](std::span<const double> x) { return gibbs_value(g, x); });
    const StateVec x{0.2, 2.5, 1.1};
    const auto a = gibbs_gradient(g, x), b = fd(x);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(a[j], b[j], 1e-7);
}

TEST(Gibbs, StrictlyConvex) {
    const GibbsFn g{{1.0, 2.0}};
    CounterRng rng(4);
    for (int s = 0; s < 200; ++s) {
        const StateVec a{rng.uniform(0.01, 4), rng.uniform(0.01, 4)}, b{rng.uniform(0.01, 4), rng.uniform(0.01, 4)};
        const StateVec mid{(a[0] + b[0]) / 2, (a[1] + b[1]) / 2};
        EXPECT_LT(gibbs_value(g, mid), (gibbs_value(g, a) + gibbs_value(g, b)) / 2 + 1e-15);
    }
}
