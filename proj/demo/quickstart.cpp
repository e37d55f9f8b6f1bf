// Optimal barrier for a compound Poisson process with exponential running cost
// and quadratic control cost, then a check of u against a short simulation.
#include <cstdio>

#include "lsc/lsc.hpp"

int main() {
    const auto model = lsc::LevyModel::compound_poisson(4.0 / 7.0, 3.0, 3.0 / 7.0, 4.0);
    const lsc::CostModel cost(lsc::ExpQuadraticCost{1.0, 1.0});
    const double delta = 1.0;
    const double theta = 1.0;

    const auto sol = lsc::solve_control_problem(model, cost, delta, theta);
    std::printf("x*            = %.10f\n", sol.x_star);
    std::printf("u(x*)         = %.10f\n", sol.u(sol.x_star));
    std::printf("HJB residuals : %s (tol %.1e)\n", sol.hjb_report.passed ? "PASS" : "FAIL", sol.hjb_report.tolerance);

    lsc::SimConfig cfg;
    cfg.paths = 20000;
    cfg.start_x = sol.x_star;
    cfg.barrier = sol.x_star;
    cfg.theta = theta;
    const auto est = lsc::estimate_cost(model, cost, delta, cfg);
    std::printf("MC J(x*, D^*) = %.6f +- %.6f\n", est.mean, est.std_error);
}
