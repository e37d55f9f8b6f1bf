#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "lsc/scenario.hpp"
#include "lsc/threshold_solver.hpp"
#include "oracles.hpp"

using lsc::CostModel;
using lsc::LevyModel;

namespace {

// e^{zx} with exact derivatives, exercising the integration-by-parts branch.
struct Exponential {
    double z;
    double operator()(double x) const { return std::exp(z * x); }
    double derivative(double x) const { return z * std::exp(z * x); }
    double second_derivative(double x) const { return z * z * std::exp(z * x); }
    std::optional<double> kink() const { return std::nullopt; }
};

lsc::ThresholdSolution solve_scenario(const std::string& file) {
    const auto sc = lsc::load_scenario(fixtures::scenario_path(file));
    return lsc::solve_control_problem(sc.model, sc.cost, sc.delta, sc.theta);
}

const lsc::ThresholdSolution& cpp_solution() {
    static const auto sol = solve_scenario("paper_4_3_cpp.json");
    return sol;
}

const lsc::ThresholdSolution& jd_solution() {
    static const auto sol = solve_scenario("paper_4_1_jd.json");
    return sol;
}

}  // namespace

TEST(Generator, ExponentialsAreEigenfunctions) {
    for (const auto& m : {fixtures::jump_diffusion_example(), fixtures::compound_poisson_example()}) {
        for (double z : {-1.5, -0.4, 0.7, 2.0}) {
            lsc::GeneratorOptions gen;
            gen.growth_rate = std::fabs(z);
            const double phi = m.characteristic_exponent(z);
            for (double x : {-1.0, 0.0, 0.5}) {
                const double expected = phi * std::exp(z * x);
                const double fd = lsc::apply_generator([z](double y) { return std::exp(z * y); }, m, x, gen);
                const double ibp = lsc::apply_generator(Exponential{z}, m, x, gen);
                EXPECT_NEAR(fd, expected, 1e-8 * std::fabs(expected)) << "z=" << z;
                EXPECT_NEAR(ibp, expected, 1e-8 * std::fabs(expected)) << "z=" << z;
            }
        }
    }
}

TEST(Generator, ConstantsAndLinearFunction) {
    const auto m = fixtures::jump_diffusion_example();
    for (double x : {-2.0, 0.3, 4.0}) {
        EXPECT_NEAR(lsc::apply_generator([](double) { return 3.0; }, m, x), 0.0, 1e-12);
        EXPECT_NEAR(lsc::apply_generator([](double y) { return y; }, m, x), m.mean(), 1e-10);
    }
}

TEST(Threshold, CompoundPoissonExampleMatchesExplicitQ) {
    const auto& sol = cpp_solution();
    EXPECT_NEAR(sol.x_star, -0.0377, 5e-4);
    const auto& Q = sol.problem.Q;
    for (double x = -3.0; x <= 3.0; x += 0.25) {
        const double ref = oracle::q_cpp_exp_quadratic(x, 4.0 / 7.0, 3.0 / 7.0, 3.0, 4.0, 1.0, 1.0, 3.0);
        EXPECT_NEAR(Q(x), ref, 1e-12 * (1.0 + std::fabs(ref))) << "x=" << x;
    }
    EXPECT_TRUE(sol.assumption4_report.passed);
}

TEST(Threshold, ExpExpClosedFormOnRandomModels) {
    fixtures::RandomModels gen(101);
    for (int i = 0; i < 25; ++i) {
        const auto inst = gen.exp_exp_instance();
        const auto& fam = std::get<lsc::ExpExpCost>(inst.cost.family());
        const auto problem = lsc::ControlProblem::build(inst.model, inst.cost, inst.delta, inst.theta);
        const double x_star = lsc::find_threshold(problem).x_star;
        const auto roots = oracle::phi_roots(inst.model, inst.delta);
        ASSERT_EQ(roots.positive.size(), 2u);
        ASSERT_EQ(roots.negative.size(), 2u);
        const double ref = oracle::expexp_threshold(fam.A, fam.alpha, fam.B, fam.beta, inst.model.eta_up(),
                                                    inst.model.eta_down(), roots.positive[0], roots.positive[1],
                                                    roots.negative[0], roots.negative[1]);
        EXPECT_NEAR(x_star, ref, 1e-9 * (1.0 + std::fabs(ref))) << "instance " << i;
        EXPECT_NEAR(*lsc::closed_form_threshold(inst.cost, inst.model, inst.delta, problem.roots), ref,
                    1e-10 * (1.0 + std::fabs(ref)));
        EXPECT_GE(x_star, std::log(fam.B / (fam.A * fam.alpha)) / (fam.alpha + fam.beta) - 1e-12);
    }
}

TEST(Threshold, MonomialLinearClosedFormOnRandomModels) {
    fixtures::RandomModels gen(202);
    for (int i = 0; i < 25; ++i) {
        const auto inst = gen.monomial_linear_instance();
        const auto& fam = std::get<lsc::MonomialLinearCost>(inst.cost.family());
        const double x_star = lsc::find_threshold(inst.cost, inst.model, inst.delta);
        const auto roots = oracle::phi_roots(inst.model, inst.delta);
        const double ref = oracle::monomial_linear_threshold(fam.A, inst.model.eta_up(), inst.model.eta_down(),
                                                             roots.positive[0], roots.positive[1],
                                                             roots.negative[0], roots.negative[1]);
        EXPECT_NEAR(x_star, ref, 1e-9 * (1.0 + std::fabs(ref))) << "instance " << i;
    }
}

TEST(Threshold, InvariantUnderCostScaling) {
    const auto m = fixtures::jump_diffusion_example();
    const double base = lsc::find_threshold(CostModel(lsc::ExpExpCost{1.0, 1.0, 2.0, 1.0}), m, 1.0);
    const double scaled = lsc::find_threshold(CostModel(lsc::ExpExpCost{7.0, 1.0, 14.0, 1.0}), m, 1.0);
    EXPECT_NEAR(base, scaled, 1e-10);
    // The additive constant in f does not move the barrier.
    const double b0 = lsc::find_threshold(CostModel(lsc::MonomialLinearCost{0.5, 2, 0.0}), m, 1.0);
    const double b1 = lsc::find_threshold(CostModel(lsc::MonomialLinearCost{0.5, 2, 3.0}), m, 1.0);
    EXPECT_NEAR(b0, b1, 1e-10);
}

TEST(Threshold, HigherDegreeQMatchesQuadrature) {
    const auto m = fixtures::jump_diffusion_example();
    const double delta = 1.0;
    const auto roots = lsc::solve_phi_equals_delta(m, delta);
    for (int n : {2, 3}) {
        const CostModel cm(lsc::MonomialLinearCost{0.4, n, 0.0});
        const auto closed = lsc::averaging_function(cm, m, delta, roots);
        const auto quad = lsc::averaging_function_quadrature(cm, m, delta, roots);
        for (double x : {-1.5, -0.2, 0.0, 0.9, 2.0}) {
            EXPECT_NEAR(closed(x), quad(x), 1e-8 * (1.0 + std::fabs(closed(x)))) << "n=" << n << " x=" << x;
        }
    }
}

TEST(Threshold, Assumption4ViolationIsReported) {
    const auto m = fixtures::compound_poisson_example();
    EXPECT_THROW(lsc::find_threshold(CostModel(lsc::ExpQuadraticCost{10.0, 1.0}), m, 1.0), lsc::Assumption4Violation);
}

TEST(Threshold, NoRootWhenQNeverCrosses) {
    EXPECT_THROW(lsc::locate_smallest_root([](double) { return -1.0; }), lsc::NoRootError);
    EXPECT_THROW(lsc::locate_smallest_root([](double) { return 2.0; }), lsc::NoRootError);
}

TEST(StoppingValue, BelowControlCostAndEqualRightOfBarrier) {
    for (const auto* sol : {&cpp_solution(), &jd_solution()}) {
        const auto& cm = sol->problem.cost;
        for (double x = sol->x_star - 6.0; x <= sol->x_star + 6.0; x += 0.05) {
            const double tol = 1e-9 * (1.0 + std::fabs(cm.c(x)));
            EXPECT_LE(sol->v(x), cm.c(x) + tol) << "x=" << x;
            if (x >= sol->x_star) {
                EXPECT_NEAR(sol->v(x), cm.c(x), tol) << "x=" << x;
            }
        }
    }
}

TEST(StoppingValue, ContinuousAtOptimalBarrier) {
    for (const auto* sol : {&cpp_solution(), &jd_solution()}) {
        const double b = sol->x_star;
        EXPECT_NEAR(sol->v.left_branch(b), sol->v(b), 1e-10);
    }
}

TEST(StoppingValue, SmoothFitUnderDiffusion) {
    const auto& sol = jd_solution();
    const double b = sol.x_star;
    const double c_slope = sol.problem.cost.control_cost().derivative()(b);
    EXPECT_NEAR(sol.v.left_branch_derivative(b), c_slope, 1e-8);
    EXPECT_NEAR(sol.v.derivative(b), c_slope, 1e-10);
}

TEST(StoppingValue, MatchesBrownianPassageSimulation) {
    // Without jumps there is no overshoot, so for x < x*
    // v(x) = H(x) - E e^{-delta tau} (H(x*) - c(x*)).
    const double mu = 0.2, sigma = 0.5, delta = 1.0;
    const auto m = LevyModel::brownian(mu, sigma);
    const CostModel cm(lsc::ExpExpCost{1.0, 1.0, 2.0, 1.0});
    const auto sol = lsc::solve_control_problem(m, cm, delta, 1.5);
    const double b = sol.x_star;
    const double gap = sol.problem.H(b) - cm.c(b);
    for (double x : {b - 0.3, b - 1.0}) {
        const auto mc = oracle::brownian_passage_discount(mu, sigma, b - x, delta, 100000, 17);
        const double ref = sol.problem.H(x) - mc.mean * gap;
        EXPECT_NEAR(sol.v(x), ref, 4.0 * mc.se * std::fabs(gap) + 1e-12) << "x=" << x;
    }
}

TEST(ValueFunction, DerivativeIsStoppingValue) {
    for (const auto* sol : {&cpp_solution(), &jd_solution()}) {
        const auto& u = sol->u;
        for (double x : {sol->x_star - 2.3, sol->x_star - 0.517, sol->x_star + 0.311, sol->x_star + 1.9}) {
            const double fd = oracle::central_difference(u, x, 1e-5);
            EXPECT_NEAR(fd, sol->v(x), 1e-5 * (1.0 + std::fabs(sol->v(x)))) << "x=" << x;
        }
    }
}

TEST(ValueFunction, SolvesEquationAtBarrier) {
    for (const auto* sol : {&cpp_solution(), &jd_solution()}) {
        const auto& p = sol->problem;
        const double res = lsc::hjb_residual(sol->u, p.cost, p.model, p.delta, sol->x_star,
                                             lsc::generator_options_for(p));
        EXPECT_NEAR(res, 0.0, 1e-8 * (1.0 + std::fabs(p.cost.f(sol->x_star))));
    }
}

TEST(ValueFunction, GrowthWithinThetaEnvelope) {
    const auto& sol = jd_solution();
    const double theta = sol.problem.theta;
    double prev = 0.0;
    for (double x : {10.0, 15.0, 20.0, 25.0}) {
        const double ratio = std::fabs(sol.u(x)) / (1.0 + std::cosh(theta * x));
        if (prev > 0.0) {
            EXPECT_LE(ratio, prev * (1.0 + 1e-9));
        }
        prev = ratio;
    }
}

TEST(Hjb, BundledScenariosPass) {
    for (const char* file : {"paper_4_1_jd.json", "paper_4_2_quadratic.json", "paper_4_3_cpp.json"}) {
        const auto sol = solve_scenario(file);
        EXPECT_TRUE(sol.hjb_report.passed) << file << " left residual " << sol.hjb_report.max_abs_residual_left
                                           << " control gap " << sol.hjb_report.max_control_gap;
    }
}

TEST(Hjb, PerturbedBarrierFails) {
    for (const auto* sol : {&cpp_solution(), &jd_solution()}) {
        for (double shift : {-0.5, 0.5}) {
            const auto an = lsc::analyze_barrier(sol->problem, sol->x_star + shift);
            EXPECT_FALSE(an.hjb_report.passed) << "shift " << shift;
        }
    }
}
