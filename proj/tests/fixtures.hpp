#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "lsc/cost_model.hpp"
#include "lsc/levy_model.hpp"

namespace fixtures {

inline std::string scenario_path(const std::string& name) { return std::string(LSC_SCENARIO_DIR) + "/" + name; }

inline lsc::LevyModel compound_poisson_example() {
    return lsc::LevyModel::compound_poisson(4.0 / 7.0, 3.0, 3.0 / 7.0, 4.0);
}

inline lsc::LevyModel jump_diffusion_example() { return lsc::LevyModel::jump_diffusion(0.1, 0.3, 1.0, 4.0, 1.5, 5.0); }

class RandomModels {
public:
    explicit RandomModels(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    lsc::LevyModel jump_diffusion() {
        return lsc::LevyModel::jump_diffusion(uniform(-0.3, 0.3), uniform(0.05, 0.8), uniform(0.1, 2.0),
                                              uniform(1.5, 6.0), uniform(0.1, 2.0), uniform(1.5, 6.0));
    }

    lsc::LevyModel compound_poisson() {
        return lsc::LevyModel::compound_poisson(uniform(0.1, 2.0), uniform(1.0, 6.0), uniform(0.1, 2.0),
                                                uniform(1.0, 6.0));
    }

    /// An exp/exp jump-diffusion instance passing the exponential-moment check
    /// at theta = max(alpha, beta).
    struct ExpExpInstance {
        lsc::LevyModel model;
        lsc::CostModel cost;
        double delta;
        double theta;
    };

    ExpExpInstance exp_exp_instance() {
        for (;;) {
            auto model = jump_diffusion();
            const double delta = uniform(0.3, 2.0);
            const double alpha = uniform(0.2, 1.2);
            const double beta = uniform(0.2, 1.2);
            const double theta = std::max(alpha, beta);
            if (!lsc::check_assumption1(model, delta, theta).passed) continue;
            lsc::CostModel cost(lsc::ExpExpCost{uniform(0.2, 3.0), alpha, uniform(0.2, 3.0), beta});
            return {model, cost, delta, theta};
        }
    }

    ExpExpInstance monomial_linear_instance() {
        for (;;) {
            auto model = jump_diffusion();
            const double delta = uniform(0.3, 2.0);
            const double theta = uniform(0.2, 1.0);
            if (!lsc::check_assumption1(model, delta, theta).passed) continue;
            lsc::CostModel cost(lsc::MonomialLinearCost{uniform(0.1, 3.0), 1, uniform(-1.0, 1.0)});
            return {model, cost, delta, theta};
        }
    }

private:
    std::mt19937_64 rng_;
};

}  // namespace fixtures
