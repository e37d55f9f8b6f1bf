#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "lsc/errors.hpp"

namespace lsc::numerics {

/// Gauss–Legendre nodes and weights on [-1, 1], computed once by Newton iteration
/// on the Legendre recurrence.
template <std::size_t N>
struct GaussLegendreRule {
    std::array<double, N> nodes{};
    std::array<double, N> weights{};

    GaussLegendreRule() {
        for (std::size_t i = 0; i < (N + 1) / 2; ++i) {
            double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(N) + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = 0.0;
                for (std::size_t j = 1; j <= N; ++j) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / static_cast<double>(j);
                }
                dp = static_cast<double>(N) * (z * p0 - p1) / (z * z - 1.0);
                const double dz = p0 / dp;
                z -= dz;
                if (std::fabs(dz) < 1e-16) break;
            }
            nodes[i] = -z;
            nodes[N - 1 - i] = z;
            weights[i] = weights[N - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
    }

    template <typename F>
    double integrate(F&& f, double a, double b) const {
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        double sum = 0.0;
        for (std::size_t i = 0; i < N; ++i) sum += weights[i] * f(mid + half * nodes[i]);
        return half * sum;
    }
};

template <std::size_t N>
const GaussLegendreRule<N>& gauss_legendre_rule() {
    static const GaussLegendreRule<N> rule;
    return rule;
}

/// Fixed 16-point Gauss–Legendre on [a, b].
template <typename F>
double gauss_legendre_16(F&& f, double a, double b) {
    return gauss_legendre_rule<16>().integrate(f, a, b);
}

struct AdaptiveOptions {
    double abs_tolerance = 1e-13;
    double rel_tolerance = 1e-12;
    int max_depth = 40;
};

namespace detail {

// Panels whose refinement changes the estimate by less than this multiple of
// their own magnitude are accepted; tighter absolute targets are not reachable.
inline constexpr double kRoundoffFloor = 1e-14;

template <typename F>
double adaptive_gl_step(F& f, double a, double b, double whole, double tol, int depth, int max_depth) {
    const auto& rule = gauss_legendre_rule<10>();
    const double mid = 0.5 * (a + b);
    const double left = rule.integrate(f, a, mid);
    const double right = rule.integrate(f, mid, b);
    const double refined = left + right;
    const double floor = kRoundoffFloor * (std::fabs(left) + std::fabs(right));
    if (depth >= max_depth || std::fabs(refined - whole) <= std::fmax(tol, floor) || !std::isfinite(refined)) {
        return refined;
    }
    return adaptive_gl_step(f, a, mid, left, 0.5 * tol, depth + 1, max_depth) +
           adaptive_gl_step(f, mid, b, right, 0.5 * tol, depth + 1, max_depth);
}

template <typename F>
double adaptive_simpson_step(F& f, double a, double b, double fa, double fm, double fb, double whole,
                             double tol, int depth, int max_depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    const double floor = kRoundoffFloor * (std::fabs(left) + std::fabs(right));
    if (std::fabs(delta) <= std::fmax(15.0 * tol, floor)) return left + right + delta / 15.0;
    if (depth >= max_depth) {
        throw ConvergenceError("adaptive_simpson: maximum recursion depth reached");
    }
    return adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth) +
           adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace detail

/// Adaptive Gauss–Legendre: a 10-point panel is accepted when splitting it in two
/// changes the estimate by less than the (halving) tolerance.
template <typename F>
double adaptive_gauss_legendre(F&& f, double a, double b, const AdaptiveOptions& opts = {}) {
    if (a == b) return 0.0;
    const auto& rule = gauss_legendre_rule<10>();
    const double whole = rule.integrate(f, a, b);
    const double tol = std::fmax(opts.abs_tolerance, opts.rel_tolerance * std::fabs(whole));
    return detail::adaptive_gl_step(f, a, b, whole, tol, 0, opts.max_depth);
}

/// Adaptive Simpson with Richardson correction. Throws ConvergenceError if the
/// recursion limit is hit before the tolerance is met.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tolerance = 1e-10, int max_depth = 20) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_step(f, a, b, fa, fm, fb, whole, tolerance, 0, max_depth);
}

}  // namespace lsc::numerics
