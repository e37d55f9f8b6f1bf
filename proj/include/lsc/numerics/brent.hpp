#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "lsc/errors.hpp"

namespace lsc::numerics {

struct BrentOptions {
    double x_tolerance = 1e-14;   // absolute, added to the relative machine term
    std::size_t max_iterations = 500;
};

/**
 * Brent's method (zeroin) on a bracket [a, b] with f(a), f(b) of opposite sign.
 *
 * Terminates when the bracket is narrower than 2*eps*|x| + x_tolerance/2 or
 * f vanishes exactly. The returned point is the endpoint with the smaller |f|.
 */
template <typename F>
double brent_root(F&& f, double a, double b, double fa, double fb, const BrentOptions& opts = {}) {
    if (std::isnan(fa) || std::isnan(fb)) {
        throw ConvergenceError("brent_root: NaN at bracket endpoint");
    }
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) {
        throw ConvergenceError("brent_root: endpoints do not bracket a root");
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double c = a, fc = fa;
    double d = b - a, e = d;
    for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol = 2.0 * eps * std::fabs(b) + 0.5 * opts.x_tolerance;
        const double m = 0.5 * (c - b);
        if (std::fabs(m) <= tol || fb == 0.0) return b;

        if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            else p = -p;
            if (2.0 * p < std::fmin(3.0 * m * q - std::fabs(tol * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
        if (std::isnan(fb)) throw ConvergenceError("brent_root: NaN inside bracket");
    }
    throw ConvergenceError("brent_root: iteration limit reached");
}

template <typename F>
double brent_root(F&& f, double a, double b, const BrentOptions& opts = {}) {
    const double fa = f(a);
    const double fb = f(b);
    return brent_root(f, a, b, fa, fb, opts);
}

}  // namespace lsc::numerics
