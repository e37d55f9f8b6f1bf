// Simulated cost of reflecting at barriers around x* for a jump-diffusion with
// exponential running and control costs.
#include <cstdio>
#include <vector>

#include "lsc/lsc.hpp"

int main() {
    const auto model = lsc::LevyModel::jump_diffusion(0.1, 0.3, 1.0, 4.0, 1.5, 5.0);
    const lsc::CostModel cost(lsc::ExpExpCost{1.0, 1.0, 2.0, 1.0});
    const double delta = 1.0;

    const auto problem = lsc::ControlProblem::build(model, cost, delta, 1.5);
    const double x_star = lsc::find_threshold(problem).x_star;
    const auto closed = lsc::closed_form_threshold(cost, model, delta, problem.roots);
    std::printf("x* = %.12f (closed form %.12f)\n", x_star, closed.value_or(0.0));

    lsc::SimConfig cfg;
    cfg.paths = 4000;
    cfg.dt = 1e-2;
    cfg.horizon = 30.0;
    cfg.theta = 1.5;
    cfg.start_x = x_star;
    std::vector<double> barriers;
    for (int i = 0; i <= 6; ++i) barriers.push_back(x_star - 0.6 + 0.2 * i);
    const auto sweep = lsc::barrier_sweep(model, cost, delta, cfg, barriers);
    for (const auto& p : sweep.points) {
        std::printf("b = %+.3f  J = %.5f +- %.5f\n", p.barrier, p.estimate.mean, p.estimate.std_error);
    }
}
