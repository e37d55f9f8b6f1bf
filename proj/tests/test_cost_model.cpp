#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lsc/cost_model.hpp"
#include "lsc/numerics/quadrature.hpp"
#include "lsc/threshold_solver.hpp"

using lsc::CostModel;
using lsc::Extremum;

namespace {

std::vector<CostModel> families() {
    return {CostModel(lsc::ExpExpCost{1.0, 1.0, 2.0, 1.0}), CostModel(lsc::MonomialLinearCost{0.5, 1, 0.2}),
            CostModel(lsc::MonomialLinearCost{0.7, 2, -0.1}), CostModel(lsc::ExpQuadraticCost{1.0, 1.0})};
}

}  // namespace

TEST(CostModel, FamilyFormulas) {
    const CostModel ee(lsc::ExpExpCost{2.0, 0.5, 3.0, 0.7});
    EXPECT_NEAR(ee.f(1.2), 2.0 * std::exp(0.6), 1e-14);
    EXPECT_NEAR(ee.c(1.2), 3.0 * std::exp(-0.84), 1e-14);
    EXPECT_NEAR(ee.f_prime(1.2), std::exp(0.6), 1e-14);
    const CostModel ml(lsc::MonomialLinearCost{0.5, 2, 1.0});
    EXPECT_NEAR(ml.f(2.0), 0.5 * 16.0 + 1.0, 1e-14);
    EXPECT_NEAR(ml.c(2.0), -2.0, 1e-15);
    const CostModel eq(lsc::ExpQuadraticCost{1.5, -0.5});
    EXPECT_NEAR(eq.c(2.0), 5.5, 1e-15);
    EXPECT_EQ(eq.family_name(), "exp_quadratic");
}

TEST(CostModel, RejectsInvalidParameters) {
    EXPECT_THROW(CostModel(lsc::ExpExpCost{0.0, 1.0, 1.0, 1.0}), lsc::ParameterError);
    EXPECT_THROW(CostModel(lsc::ExpExpCost{1.0, 1.0, 1.0, -1.0}), lsc::ParameterError);
    EXPECT_THROW(CostModel(lsc::MonomialLinearCost{1.0, 0, 0.0}), lsc::ParameterError);
    EXPECT_THROW(CostModel(lsc::ExpQuadraticCost{-1.0, 0.0}), lsc::ParameterError);
}

TEST(CostModel, ControlCostIntegralMatchesQuadrature) {
    for (const auto& cm : families()) {
        for (auto [a, b] : {std::pair{-1.0, 0.5}, std::pair{0.3, 2.0}}) {
            const double quad = lsc::numerics::adaptive_gauss_legendre([&](double s) { return cm.c(s); }, a, b);
            EXPECT_NEAR(cm.control_cost_integral(a, b), quad, 1e-12) << cm.family_name();
        }
    }
}

TEST(ResolventCost, KilledExpectationReturnsControlCost) {
    // E r(x + X_{e_delta}) = c(x), with X_{e_delta} = S + I in law.
    const auto m = fixtures::jump_diffusion_example();
    const double delta = 1.0;
    const auto roots = lsc::solve_phi_equals_delta(m, delta);
    const auto sup = lsc::extremum_law(roots, m, Extremum::Sup);
    const auto inf = lsc::extremum_law(roots, m, Extremum::Inf);
    for (const auto& cm : families()) {
        const auto r = lsc::resolvent_cost(cm, m, delta);
        const auto composed = lsc::expect_shifted(sup, lsc::expect_shifted(inf, r));
        for (double x : {-2.0, -0.5, 0.0, 0.8, 2.5}) {
            EXPECT_NEAR(composed(x), cm.c(x), 1e-11 * (1.0 + std::fabs(cm.c(x)))) << cm.family_name();
        }
    }
}

TEST(ResolventCost, SolvesResolventEquation) {
    // delta r = (delta - L) c, with L applied by finite differences and quadrature.
    const auto m = fixtures::jump_diffusion_example();
    const double delta = 0.8;
    for (const auto& cm : families()) {
        const auto r = lsc::resolvent_cost(cm, m, delta);
        const auto c = cm.control_cost();
        lsc::GeneratorOptions gen;
        gen.growth_rate = 1.0;
        for (double x : {-1.0, 0.0, 1.3}) {
            const double Lc = lsc::apply_generator([&](double y) { return c(y); }, m, x, gen);
            EXPECT_NEAR(delta * r(x), delta * c(x) - Lc, 1e-8 * (1.0 + std::fabs(c(x)))) << cm.family_name();
        }
    }
}

TEST(DiscountedGradient, SolvesResolventEquation) {
    // (delta - L) H = f'.
    const auto m = fixtures::jump_diffusion_example();
    const double delta = 1.0;
    for (const auto& cm : families()) {
        const auto H = lsc::discounted_gradient(cm, m, delta);
        const auto fp = cm.running_cost_derivative();
        lsc::GeneratorOptions gen;
        gen.growth_rate = 1.0;
        for (double x : {-1.0, 0.0, 1.3}) {
            const double LH = lsc::apply_generator([&](double y) { return H(y); }, m, x, gen);
            EXPECT_NEAR(delta * H(x) - LH, fp(x), 1e-8 * (1.0 + std::fabs(fp(x)))) << cm.family_name();
        }
    }
}

TEST(DiscountedGradient, BrownianCubicByHand) {
    // f' = 4A x^3 for n = 2 and X = mu t + sigma W:
    // int e^{-ds} E(x + mu s + sigma W_s)^3 ds with E X_s^3 expanded by hand.
    const auto m = lsc::LevyModel::brownian(0.3, 0.5);
    const double d = 0.7, A = 0.25, mu = 0.3, s2 = 0.25;
    const auto H = lsc::discounted_gradient(CostModel(lsc::MonomialLinearCost{A, 2, 0.0}), m, d);
    for (double x : {-1.0, 0.4, 2.0}) {
        // E(x + mu s + sigma W)^3 = (x + mu s)^3 + 3 (x + mu s) s2 s
        const double I0 = 1.0 / d, I1 = 1.0 / (d * d), I2 = 2.0 / (d * d * d), I3 = 6.0 / (d * d * d * d);
        const double cubic = x * x * x * I0 + 3 * x * x * mu * I1 + 3 * x * mu * mu * I2 + mu * mu * mu * I3;
        const double var_term = 3.0 * s2 * (x * I1 + mu * I2);
        EXPECT_NEAR(H(x), 4.0 * A * (cubic + var_term), 1e-12 * (1.0 + std::fabs(H(x))));
    }
}

TEST(DiscountedGradient, RequiresExponentBelowDelta) {
    const auto m = fixtures::jump_diffusion_example();
    EXPECT_THROW(lsc::discounted_gradient(CostModel(lsc::ExpExpCost{1.0, 2.0, 1.0, 1.0}), m, 0.5),
                 lsc::DomainError);
    EXPECT_THROW(lsc::resolvent_cost(CostModel(lsc::ExpExpCost{1.0, 1.0, 1.0, 6.0}), m, 1.0), lsc::DomainError);
}

TEST(GrowthScan, BoundedWhenThetaDominates) {
    const CostModel ee(lsc::ExpExpCost{1.0, 1.0, 2.0, 1.0});
    EXPECT_TRUE(lsc::cost_growth_scan(ee, 1.5).bounded);
    EXPECT_FALSE(lsc::cost_growth_scan(ee, 0.5).bounded);
    EXPECT_TRUE(lsc::cost_growth_scan(CostModel(lsc::MonomialLinearCost{1.0, 3, 0.0}), 0.5).bounded);
    const auto scan = lsc::cost_growth_scan(CostModel(lsc::ExpQuadraticCost{1.0, 1.0}), 1.0);
    EXPECT_TRUE(scan.bounded);
    EXPECT_GT(scan.K, 0.0);
}

TEST(FamilyPreconditions, ExpQuadraticWarnings) {
    const auto m = fixtures::compound_poisson_example();
    EXPECT_TRUE(lsc::check_family_preconditions(CostModel(lsc::ExpQuadraticCost{1.0, 1.0}), m).monotonicity_guaranteed);
    const auto steep = lsc::check_family_preconditions(CostModel(lsc::ExpQuadraticCost{2.0, 1.0}), m);
    EXPECT_FALSE(steep.monotonicity_guaranteed);
    EXPECT_EQ(steep.warnings.size(), 1u);
    const auto down = lsc::LevyModel::compound_poisson(0.2, 3.0, 1.0, 4.0);
    EXPECT_FALSE(
        lsc::check_family_preconditions(CostModel(lsc::ExpQuadraticCost{1.0, 1.0}), down).monotonicity_guaranteed);
}
