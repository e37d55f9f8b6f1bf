#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <optional>
#include <sstream>
#include <type_traits>
#include <utility>
#include <vector>

#include "lsc/errors.hpp"
#include "lsc/exp_poly.hpp"
#include "lsc/levy_model.hpp"
#include "lsc/numerics/brent.hpp"
#include "lsc/numerics/quadrature.hpp"

namespace lsc {

/**
 * Real roots of phi(z) = delta.
 *
 * positive_roots holds the roots z > 0, negative_roots the magnitudes of the
 * roots z < 0; both ascending. With poles they interleave as
 *   -g2 < -eta_down < -g1 < 0 < r1 < eta_up < r2
 * (an outer root exists when the side tends to +inf, i.e. sigma > 0 or the
 * drift points that way).
 */
struct RootSet {
    std::vector<double> positive_roots;
    std::vector<double> negative_roots;
    double delta = 0.0;
};

enum class Extremum { Sup, Inf };

struct MixtureComponent {
    double weight = 0.0;
    double rate = 0.0;
};

/**
 * Law of S (resp. I) as an atom at zero plus an exponential mixture:
 * density sum_k w_k r_k exp(-r_k x) on (0, inf) for S, sum_k w_k r_k exp(r_k x)
 * on (-inf, 0) for I.
 */
struct ExtremumLaw {
    Extremum which = Extremum::Sup;
    double atom_at_zero = 1.0;
    std::vector<MixtureComponent> mixture;

    [[nodiscard]] double min_rate() const noexcept {
        double r = std::numeric_limits<double>::infinity();
        for (const auto& c : mixture) r = std::min(r, c.rate);
        return r;
    }
    [[nodiscard]] double total_mass() const noexcept {
        double m = atom_at_zero;
        for (const auto& c : mixture) m += c.weight;
        return m;
    }
    /// E exp(z E) for the extremum E, straight from the atom-plus-mixture form.
    [[nodiscard]] double mgf(double z) const noexcept {
        const double s = which == Extremum::Sup ? 1.0 : -1.0;
        double value = atom_at_zero;
        for (const auto& c : mixture) value += c.weight * c.rate / (c.rate - s * z);
        return value;
    }
};

namespace detail {

inline constexpr int kMaxBracketSteps = 200;

/// Roots of psi(w) = delta for w > 0 where psi(w) = phi(side * w).
/// `pole` is the jump rate on that side (absent when no jumps); `escapes`
/// says whether psi -> +inf as w -> inf.
inline std::vector<double> one_sided_roots(const LevyModel& model, double delta, double side,
                                           std::optional<double> pole, bool escapes) {
    auto g = [&](double w) { return model.unchecked_exponent(side * w) - delta; };
    numerics::BrentOptions opts;
    opts.x_tolerance = 1e-14;

    // A few Newton steps after Brent squeeze the residual when psi is steep.
    auto polish = [&](double w, double lo, double hi) {
        for (int i = 0; i < 3; ++i) {
            const double r = g(w);
            const double d = side * model.exponent_derivative(side * w);
            if (r == 0.0 || d == 0.0 || !std::isfinite(d)) break;
            const double next = w - r / d;
            if (!(next > lo && next < hi) || std::fabs(g(next)) >= std::fabs(r)) break;
            w = next;
        }
        return w;
    };

    std::vector<double> roots;
    double outer_lo = 0.0;
    if (pole) {
        const double p = *pole;
        double hi = 0.0;
        bool bracketed = false;
        for (int k = 1; k <= kMaxBracketSteps; ++k) {
            hi = p * (1.0 - std::ldexp(1.0, -k));
            if (hi <= 0.0) continue;
            if (g(hi) > 0.0) {
                bracketed = true;
                break;
            }
        }
        if (!bracketed) throw ConvergenceError("solve_phi_equals_delta: no bracket below the pole");
        roots.push_back(polish(numerics::brent_root(g, 0.0, hi, opts), 0.0, p));

        bracketed = false;
        for (int k = 1; k <= kMaxBracketSteps; ++k) {
            outer_lo = p * (1.0 + std::ldexp(1.0, -k));
            if (g(outer_lo) < 0.0) {
                bracketed = true;
                break;
            }
        }
        if (!bracketed) throw ConvergenceError("solve_phi_equals_delta: no bracket above the pole");
    }
    if (escapes) {
        double hi = std::max(2.0 * outer_lo, 1.0);
        bool bracketed = false;
        for (int k = 0; k < kMaxBracketSteps; ++k, hi *= 2.0) {
            if (g(hi) > 0.0) {
                bracketed = true;
                break;
            }
        }
        if (!bracketed) throw ConvergenceError("solve_phi_equals_delta: outer root bracket expansion failed");
        roots.push_back(polish(numerics::brent_root(g, outer_lo, hi, opts), outer_lo,
                               std::numeric_limits<double>::infinity()));
    }
    return roots;
}

inline std::optional<double> up_pole(const LevyModel& m) {
    return m.has_up_jumps() ? std::optional<double>(m.eta_up()) : std::nullopt;
}
inline std::optional<double> down_pole(const LevyModel& m) {
    return m.has_down_jumps() ? std::optional<double>(m.eta_down()) : std::nullopt;
}

}  // namespace detail

inline RootSet solve_phi_equals_delta(const LevyModel& model, double delta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ParameterError("solve_phi_equals_delta: delta must be > 0");
    if (!model.is_nontrivial()) {
        throw DomainError("solve_phi_equals_delta: pure-drift model has no Wiener–Hopf mixture form");
    }
    RootSet roots;
    roots.delta = delta;
    const bool up_escapes = model.sigma() > 0.0 || model.drift() > 0.0;
    const bool down_escapes = model.sigma() > 0.0 || model.drift() < 0.0;
    roots.positive_roots = detail::one_sided_roots(model, delta, +1.0, detail::up_pole(model), up_escapes);
    roots.negative_roots = detail::one_sided_roots(model, delta, -1.0, detail::down_pole(model), down_escapes);
    return roots;
}

/// E exp(z S) = prod_k r_k/(r_k - z) * (eta_up - z)/eta_up, for z < smallest positive root.
inline double mgf_sup(const RootSet& roots, const LevyModel& model, double z) {
    if (!roots.positive_roots.empty() && !(z < roots.positive_roots.front())) {
        throw DomainError("mgf_sup: z must be below the smallest positive root");
    }
    double value = 1.0;
    for (double r : roots.positive_roots) value *= r / (r - z);
    if (model.has_up_jumps()) value *= (model.eta_up() - z) / model.eta_up();
    return value;
}

/// E exp(z I) = prod_k g_k/(g_k + z) * (eta_down + z)/eta_down, for z > -(smallest negative magnitude).
inline double mgf_inf(const RootSet& roots, const LevyModel& model, double z) {
    if (!roots.negative_roots.empty() && !(z > -roots.negative_roots.front())) {
        throw DomainError("mgf_inf: z must be above minus the smallest negative root magnitude");
    }
    double value = 1.0;
    for (double g : roots.negative_roots) value *= g / (g + z);
    if (model.has_down_jumps()) value *= (model.eta_down() + z) / model.eta_down();
    return value;
}

/// Partial-fraction form of the Wiener–Hopf factor; weights are residues
/// w_k = lim_{z -> r_k} (1 - z/r_k) mgf(z).
inline ExtremumLaw extremum_law(const RootSet& roots, const LevyModel& model, Extremum which) {
    const auto& rates = which == Extremum::Sup ? roots.positive_roots : roots.negative_roots;
    const auto pole = which == Extremum::Sup ? detail::up_pole(model) : detail::down_pole(model);
    for (std::size_t i = 0; i < rates.size(); ++i) {
        for (std::size_t j = i + 1; j < rates.size(); ++j) {
            if (std::fabs(rates[i] - rates[j]) <= 1e-10) {
                throw DegenerateError("extremum_law: coincident roots (confluent partial fractions)");
            }
        }
    }
    const std::size_t n_poles = pole ? 1 : 0;
    if (rates.size() < n_poles) throw DegenerateError("extremum_law: fewer roots than poles");

    ExtremumLaw law;
    law.which = which;
    if (rates.size() == n_poles) {
        double atom = 1.0;
        for (double r : rates) atom *= r;
        if (pole) atom /= *pole;
        law.atom_at_zero = atom;
    } else {
        law.atom_at_zero = 0.0;
    }
    for (std::size_t k = 0; k < rates.size(); ++k) {
        double w = 1.0;
        for (std::size_t j = 0; j < rates.size(); ++j) {
            if (j != k) w *= rates[j] / (rates[j] - rates[k]);
        }
        if (pole) w *= (*pole - rates[k]) / *pole;
        law.mixture.push_back({w, rates[k]});
    }
    return law;
}

struct Moments {
    double first = 0.0;
    double second = 0.0;
};

/// E[E^k] for the extremum E (k >= 0).
inline double raw_moment(const ExtremumLaw& law, int k) {
    if (k == 0) return law.total_mass();
    double factorial = 1.0;
    for (int i = 2; i <= k; ++i) factorial *= i;
    const double sign = (law.which == Extremum::Inf && k % 2 == 1) ? -1.0 : 1.0;
    double value = 0.0;
    for (const auto& c : law.mixture) value += c.weight * factorial / std::pow(c.rate, k);
    return sign * value;
}

inline Moments moments(const ExtremumLaw& law) { return {raw_moment(law, 1), raw_moment(law, 2)}; }

namespace detail {

/// E[E^j exp(a E)] for j = 0..max_power.
inline std::vector<double> exponential_moments(const ExtremumLaw& law, double a, int max_power) {
    const bool sup = law.which == Extremum::Sup;
    for (const auto& c : law.mixture) {
        const double q = sup ? c.rate - a : c.rate + a;
        if (!(q > 0.0)) {
            std::ostringstream os;
            os << "expect: exponential rate " << a << " not integrable against "
               << (sup ? "sup" : "inf") << " law with minimal rate " << law.min_rate();
            throw IntegrabilityError(os.str());
        }
    }
    std::vector<double> out(static_cast<std::size_t>(max_power) + 1, 0.0);
    out[0] = law.atom_at_zero;
    for (const auto& c : law.mixture) {
        const double q = sup ? c.rate - a : c.rate + a;
        double factorial = 1.0;
        double qpow = q;
        for (int j = 0; j <= max_power; ++j) {
            if (j > 0) {
                factorial *= j;
                qpow *= q;
            }
            const double sign = (!sup && j % 2 == 1) ? -1.0 : 1.0;
            out[static_cast<std::size_t>(j)] += sign * c.weight * c.rate * factorial / qpow;
        }
    }
    return out;
}

inline double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

}  // namespace detail

/// x -> E g(x + E) in closed form; the result is again an exponential polynomial.
inline ExpPoly expect_shifted(const ExtremumLaw& law, const ExpPoly& g) {
    std::vector<ExpPolyTerm> out;
    for (const auto& t : g.terms()) {
        const auto m = detail::exponential_moments(law, t.rate, t.power);
        for (int j = 0; j <= t.power; ++j) {
            out.push_back({t.coef * detail::binomial(t.power, j) * m[static_cast<std::size_t>(j)], t.power - j, t.rate});
        }
    }
    return ExpPoly(std::move(out));
}

/// Quadrature route: E[g(E + shift) 1{E + shift >= from}] with adaptive
/// Gauss–Legendre on each mixture component, truncated at 60 / (min rate).
template <typename G>
double expect_quadrature(const ExtremumLaw& law, G&& g, double shift,
                         std::optional<double> indicator_from = std::nullopt) {
    double total = 0.0;
    if (law.atom_at_zero != 0.0 && (!indicator_from || shift >= *indicator_from)) {
        total += law.atom_at_zero * g(shift);
    }
    if (law.mixture.empty()) return total;
    const double horizon = 60.0 / law.min_rate();
    numerics::AdaptiveOptions opts;
    opts.abs_tolerance = 1e-15;
    opts.rel_tolerance = 1e-13;
    for (const auto& c : law.mixture) {
        double lo = 0.0, hi = horizon;
        if (law.which == Extremum::Sup) {
            if (indicator_from) lo = std::max(0.0, *indicator_from - shift);
            if (lo >= hi) continue;
            auto integrand = [&](double s) { return g(shift + s) * c.rate * std::exp(-c.rate * s); };
            total += c.weight * numerics::adaptive_gauss_legendre(integrand, lo, hi, opts);
        } else {
            if (indicator_from) hi = std::min(hi, shift - *indicator_from);
            if (hi <= lo) continue;
            auto integrand = [&](double s) { return g(shift - s) * c.rate * std::exp(-c.rate * s); };
            total += c.weight * numerics::adaptive_gauss_legendre(integrand, lo, hi, opts);
        }
    }
    return total;
}

namespace detail {

/// Mixture part of E[g(S + shift) 1{S + shift >= y0}] for y0 >= shift, in closed form.
inline double sup_mixture_tail(const ExtremumLaw& law, const ExpPoly& g, double shift, double y0) {
    double total = 0.0;
    for (const auto& t : g.terms()) {
        (void)detail::exponential_moments(law, t.rate, 0);
        for (const auto& c : law.mixture) {
            // With y = S + shift the component contributes w r e^{r shift} int_{y0}^inf y^p e^{-(r-a) y} dy.
            const double q = c.rate - t.rate;
            double poly = 0.0;
            double falling = 1.0;  // p!/(p-j)!
            double qpow = q;
            for (int j = 0; j <= t.power; ++j) {
                if (j > 0) {
                    falling *= (t.power - j + 1);
                    qpow *= q;
                }
                poly += falling * std::pow(y0, t.power - j) / qpow;
            }
            const double log_scale = t.rate * y0 - c.rate * (y0 - shift);
            total += t.coef * c.weight * c.rate * std::exp(log_scale) * poly;
        }
    }
    return total;
}

}  // namespace detail

/**
 * E[g(E + shift) 1{E + shift >= from}] for an exponential polynomial g.
 *
 * Closed form without an indicator and for the supremum with an indicator; the
 * infimum with an indicator falls back to quadrature. Throws
 * IntegrabilityError when an exponential rate reaches the law's minimal rate.
 */
inline double expect(const ExtremumLaw& law, const ExpPoly& g, double shift,
                     std::optional<double> indicator_from = std::nullopt) {
    if (!indicator_from) return expect_shifted(law, g)(shift);
    if (law.which == Extremum::Inf) {
        for (const auto& t : g.terms()) (void)detail::exponential_moments(law, t.rate, 0);
        return expect_quadrature(law, g, shift, indicator_from);
    }
    const double from = *indicator_from;
    double total = 0.0;
    if (law.atom_at_zero != 0.0 && shift >= from) total += law.atom_at_zero * g(shift);
    return total + detail::sup_mixture_tail(law, g, shift, std::max(shift, from));
}

/// Generic integrand: quadrature path.
template <typename G>
    requires std::invocable<G, double> && (!std::same_as<std::remove_cvref_t<G>, ExpPoly>)
double expect(const ExtremumLaw& law, G&& g, double shift, std::optional<double> indicator_from = std::nullopt) {
    return expect_quadrature(law, std::forward<G>(g), shift, indicator_from);
}

}  // namespace lsc
