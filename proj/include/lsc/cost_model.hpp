#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "lsc/errors.hpp"
#include "lsc/exp_poly.hpp"
#include "lsc/fluctuation.hpp"
#include "lsc/levy_model.hpp"

namespace lsc {

/// f(x) = A e^{alpha x}, c(x) = B e^{-beta x} (log-scale pollution abatement).
struct ExpExpCost {
    double A = 1.0;
    double alpha = 1.0;
    double B = 1.0;
    double beta = 1.0;
};

/// f(x) = A x^{2n} + B, c(x) = -x.
struct MonomialLinearCost {
    double A = 1.0;
    int n = 1;
    double B = 0.0;
};

/// f(x) = e^x, c(x) = A x^2 + B.
struct ExpQuadraticCost {
    double A = 1.0;
    double B = 0.0;
};

using CostFamily = std::variant<ExpExpCost, MonomialLinearCost, ExpQuadraticCost>;

/// Running cost f and marginal control cost c of one of the supported families.
class CostModel {
public:
    explicit CostModel(CostFamily family) : family_(family) { validate(); }

    [[nodiscard]] const CostFamily& family() const noexcept { return family_; }

    [[nodiscard]] std::string family_name() const {
        return std::visit(
            [](const auto& fam) -> std::string {
                using T = std::decay_t<decltype(fam)>;
                if constexpr (std::is_same_v<T, ExpExpCost>) return "exp_exp";
                else if constexpr (std::is_same_v<T, MonomialLinearCost>) return "monomial_linear";
                else return "exp_quadratic";
            },
            family_);
    }

    [[nodiscard]] ExpPoly running_cost() const {
        return std::visit(
            [](const auto& fam) -> ExpPoly {
                using T = std::decay_t<decltype(fam)>;
                if constexpr (std::is_same_v<T, ExpExpCost>) {
                    return ExpPoly::exponential(fam.A, fam.alpha);
                } else if constexpr (std::is_same_v<T, MonomialLinearCost>) {
                    return ExpPoly::monomial(fam.A, 2 * fam.n) + ExpPoly::constant(fam.B);
                } else {
                    return ExpPoly::exponential(1.0, 1.0);
                }
            },
            family_);
    }

    [[nodiscard]] ExpPoly control_cost() const {
        return std::visit(
            [](const auto& fam) -> ExpPoly {
                using T = std::decay_t<decltype(fam)>;
                if constexpr (std::is_same_v<T, ExpExpCost>) {
                    return ExpPoly::exponential(fam.B, -fam.beta);
                } else if constexpr (std::is_same_v<T, MonomialLinearCost>) {
                    return ExpPoly::monomial(-1.0, 1);
                } else {
                    return ExpPoly::monomial(fam.A, 2) + ExpPoly::constant(fam.B);
                }
            },
            family_);
    }

    [[nodiscard]] ExpPoly running_cost_derivative() const { return running_cost().derivative(); }

    [[nodiscard]] double f(double x) const { return running_cost()(x); }
    [[nodiscard]] double f_prime(double x) const { return running_cost_derivative()(x); }
    [[nodiscard]] double c(double x) const { return control_cost()(x); }

    /// int_a^b c(s) ds in closed form.
    [[nodiscard]] double control_cost_integral(double a, double b) const {
        return std::visit(
            [a, b](const auto& fam) -> double {
                using T = std::decay_t<decltype(fam)>;
                if constexpr (std::is_same_v<T, ExpExpCost>) {
                    return fam.B * (std::exp(-fam.beta * a) - std::exp(-fam.beta * b)) / fam.beta;
                } else if constexpr (std::is_same_v<T, MonomialLinearCost>) {
                    return -0.5 * (b * b - a * a);
                } else {
                    return fam.A * (b * b * b - a * a * a) / 3.0 + fam.B * (b - a);
                }
            },
            family_);
    }

    /// Largest exponential rate (in absolute value) appearing in f, f' or c.
    [[nodiscard]] double exponential_order() const {
        return std::visit(
            [](const auto& fam) -> double {
                using T = std::decay_t<decltype(fam)>;
                if constexpr (std::is_same_v<T, ExpExpCost>) return std::max(fam.alpha, fam.beta);
                else if constexpr (std::is_same_v<T, MonomialLinearCost>) return 0.0;
                else return 1.0;
            },
            family_);
    }

private:
    void validate() const {
        std::visit(
            [](const auto& fam) {
                using T = std::decay_t<decltype(fam)>;
                if constexpr (std::is_same_v<T, ExpExpCost>) {
                    if (!(fam.A > 0.0 && fam.alpha > 0.0 && fam.B > 0.0 && fam.beta > 0.0)) {
                        throw ParameterError("exp_exp cost: A, alpha, B, beta must be > 0");
                    }
                } else if constexpr (std::is_same_v<T, MonomialLinearCost>) {
                    if (!(fam.A > 0.0) || fam.n < 1 || !std::isfinite(fam.B)) {
                        throw ParameterError("monomial_linear cost: requires A > 0, n >= 1, finite B");
                    }
                } else {
                    if (!(fam.A > 0.0) || !std::isfinite(fam.B)) {
                        throw ParameterError("exp_quadratic cost: requires A > 0, finite B");
                    }
                }
            },
            family_);
    }

    CostFamily family_;
};

/**
 * r = delta^{-1} (delta - L) c, the transform with E_x r(X_{e_delta}) = c(x).
 * Throws DomainError if -beta lies outside the domain of phi.
 */
inline ExpPoly resolvent_cost(const CostModel& cm, const LevyModel& model, double delta) {
    return std::visit(
        [&](const auto& fam) -> ExpPoly {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, ExpExpCost>) {
                const double factor = (delta - model.characteristic_exponent(-fam.beta)) / delta;
                return ExpPoly::exponential(factor * fam.B, -fam.beta);
            } else if constexpr (std::is_same_v<T, MonomialLinearCost>) {
                return ExpPoly::constant(model.mean() / delta) + ExpPoly::monomial(-1.0, 1);
            } else {
                const double m = model.mean();
                const double var = model.variance_rate();
                return ExpPoly{{fam.A, 2, 0.0},
                               {-2.0 * fam.A * m / delta, 1, 0.0},
                               {fam.B - fam.A * var / delta, 0, 0.0}};
            }
        },
        cm.family());
}

namespace detail {

/// int_0^inf e^{-delta s} E[X_s^j] ds for j = 0..max_power, using the moment
/// recursion m_k(s) = sum_i C(k-1, i-1) kappa_i s m_{k-i}(s) over cumulants.
inline std::vector<double> discounted_moments(const LevyModel& model, double delta, int max_power) {
    std::vector<std::vector<double>> poly(static_cast<std::size_t>(max_power) + 1);
    poly[0] = {1.0};
    for (int k = 1; k <= max_power; ++k) {
        std::vector<double> acc(static_cast<std::size_t>(k) + 1, 0.0);
        for (int i = 1; i <= k; ++i) {
            const double coef = binomial(k - 1, i - 1) * model.cumulant(i);
            const auto& prev = poly[static_cast<std::size_t>(k - i)];
            for (std::size_t l = 0; l < prev.size(); ++l) acc[l + 1] += coef * prev[l];
        }
        poly[static_cast<std::size_t>(k)] = std::move(acc);
    }
    std::vector<double> out(static_cast<std::size_t>(max_power) + 1, 0.0);
    for (int j = 0; j <= max_power; ++j) {
        const auto& p = poly[static_cast<std::size_t>(j)];
        double factorial = 1.0;
        double dpow = delta;
        for (std::size_t l = 0; l < p.size(); ++l) {
            if (l > 0) {
                factorial *= static_cast<double>(l);
                dpow *= delta;
            }
            out[static_cast<std::size_t>(j)] += p[l] * factorial / dpow;
        }
    }
    return out;
}

inline double require_resolvent_exponent(const LevyModel& model, double delta, double rate) {
    const double phi = model.characteristic_exponent(rate);
    if (!(phi < delta)) {
        throw DomainError("discounted gradient: phi(rate) >= delta, resolvent diverges");
    }
    return phi;
}

}  // namespace detail

/// H(x) = E_x int_0^inf f'(X_s) e^{-delta s} ds.
inline ExpPoly discounted_gradient(const CostModel& cm, const LevyModel& model, double delta) {
    return std::visit(
        [&](const auto& fam) -> ExpPoly {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, ExpExpCost>) {
                const double phi = detail::require_resolvent_exponent(model, delta, fam.alpha);
                return ExpPoly::exponential(fam.A * fam.alpha / (delta - phi), fam.alpha);
            } else if constexpr (std::is_same_v<T, MonomialLinearCost>) {
                const int m = 2 * fam.n - 1;
                const double lead = 2.0 * fam.A * fam.n;
                const auto moments = detail::discounted_moments(model, delta, m);
                std::vector<ExpPolyTerm> terms;
                for (int j = 0; j <= m; ++j) {
                    terms.push_back({lead * detail::binomial(m, j) * moments[static_cast<std::size_t>(j)], m - j, 0.0});
                }
                return ExpPoly(std::move(terms));
            } else {
                const double phi = detail::require_resolvent_exponent(model, delta, 1.0);
                return ExpPoly::exponential(1.0 / (delta - phi), 1.0);
            }
        },
        cm.family());
}

/// Q(x) = E_x (f' - r)(I), closed form through the infimum law.
inline ExpPoly averaging_function(const CostModel& cm, const LevyModel& model, double delta,
                                  const RootSet& roots) {
    const auto inf_law = extremum_law(roots, model, Extremum::Inf);
    return expect_shifted(inf_law, cm.running_cost_derivative() - resolvent_cost(cm, model, delta));
}

/// Q(x) through the generic quadrature path of `expect`.
inline std::function<double(double)> averaging_function_quadrature(const CostModel& cm, const LevyModel& model,
                                                                   double delta, const RootSet& roots) {
    const auto inf_law = extremum_law(roots, model, Extremum::Inf);
    const auto integrand = cm.running_cost_derivative() - resolvent_cost(cm, model, delta);
    return [inf_law, integrand](double x) {
        return expect_quadrature(inf_law, [&](double y) { return integrand(y); }, x);
    };
}

/// Result of scanning |g(x)| / (1 + cosh(theta x)) on [lo, hi].
struct GrowthScan {
    double K = 0.0;        // sup of the ratio on the scan window
    bool bounded = false;  // ratio not increasing towards either end of the window
    double lo = -30.0;
    double hi = 30.0;
};

inline GrowthScan growth_scan(const std::vector<std::function<double(double)>>& fns, double theta,
                              double lo = -30.0, double hi = 30.0, int points = 1201) {
    auto ratio = [&](double x) {
        double m = 0.0;
        for (const auto& g : fns) m = std::max(m, std::fabs(g(x)));
        return m / (1.0 + std::cosh(theta * x));
    };
    GrowthScan scan;
    scan.lo = lo;
    scan.hi = hi;
    for (int i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * i / (points - 1);
        scan.K = std::max(scan.K, ratio(x));
    }
    const double inner = (hi - lo) / 12.0;
    const bool left_ok = ratio(lo) <= ratio(lo + inner) * (1.0 + 1e-6) + 1e-300;
    const bool right_ok = ratio(hi) <= ratio(hi - inner) * (1.0 + 1e-6) + 1e-300;
    scan.bounded = std::isfinite(scan.K) && left_ok && right_ok;
    return scan;
}

/// Growth bound on max(|f|, |f'|, |c|).
inline GrowthScan cost_growth_scan(const CostModel& cm, double theta) {
    const auto f = cm.running_cost();
    const auto fp = cm.running_cost_derivative();
    const auto c = cm.control_cost();
    return growth_scan({[f](double x) { return f(x); }, [fp](double x) { return fp(x); },
                        [c](double x) { return c(x); }},
                       theta);
}

/// Growth bound on max(|r'|, |f''|), needed under unbounded variation.
inline GrowthScan smoothness_growth_scan(const CostModel& cm, const LevyModel& model, double delta, double theta) {
    const auto rp = resolvent_cost(cm, model, delta).derivative();
    const auto fpp = cm.running_cost_derivative().derivative();
    return growth_scan({[rp](double x) { return rp(x); }, [fpp](double x) { return fpp(x); }}, theta);
}

/// Growth constant K_f of |f| alone (used by the simulator's tail bound).
inline double running_cost_growth_constant(const CostModel& cm, double theta) {
    const auto f = cm.running_cost();
    return growth_scan({[f](double x) { return f(x); }}, theta).K;
}

struct FamilyCheck {
    bool monotonicity_guaranteed = true;
    std::vector<std::string> warnings;
};

/// Sufficient conditions for a monotone Q; failures are warnings, not errors.
inline FamilyCheck check_family_preconditions(const CostModel& cm, const LevyModel& model) {
    FamilyCheck check;
    if (const auto* fam = std::get_if<ExpQuadraticCost>(&cm.family())) {
        if (!(2.0 * fam->A <= std::numbers::e)) {
            check.monotonicity_guaranteed = false;
            check.warnings.emplace_back("exp_quadratic: 2A > e, monotonicity of Q not guaranteed");
        }
        if (!(model.mean() > 0.0)) {
            check.monotonicity_guaranteed = false;
            check.warnings.emplace_back("exp_quadratic: E X_1 <= 0, monotonicity of Q not guaranteed");
        }
    }
    return check;
}

}  // namespace lsc
