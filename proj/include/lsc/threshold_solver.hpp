#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <variant>
#include <vector>

#include "lsc/cost_model.hpp"
#include "lsc/errors.hpp"
#include "lsc/exp_poly.hpp"
#include "lsc/fluctuation.hpp"
#include "lsc/levy_model.hpp"
#include "lsc/numerics/brent.hpp"
#include "lsc/numerics/quadrature.hpp"

namespace lsc {

// ---------------------------------------------------------------------------
// Infinitesimal generator
// ---------------------------------------------------------------------------

struct GeneratorOptions {
    /// Exponential growth rate of the argument; jump integrals are truncated at
    /// 60 / (eta - growth_rate).
    double growth_rate = 0.0;
    /// Base step of the Richardson-extrapolated central differences (h, h/2, h/4).
    double fd_step = 1e-2;
};

/// A function that also knows its first two derivatives (and optionally where
/// its second derivative jumps).
template <typename W>
concept SmoothFunction = requires(const W& w, double x) {
    { w(x) } -> std::convertible_to<double>;
    { w.derivative(x) } -> std::convertible_to<double>;
    { w.second_derivative(x) } -> std::convertible_to<double>;
    { w.kink() } -> std::convertible_to<std::optional<double>>;
};

namespace detail {

template <typename F>
double richardson(F&& estimate, double h) {
    const double d0 = estimate(h);
    const double d1 = estimate(0.5 * h);
    const double d2 = estimate(0.25 * h);
    const double r1 = (4.0 * d1 - d0) / 3.0;
    const double r2 = (4.0 * d2 - d1) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
}

inline double jump_horizon(double eta, double growth) {
    if (!(eta > growth)) {
        throw DomainError("apply_generator: jump rate must exceed the growth rate of the argument");
    }
    return 60.0 / (eta - growth);
}

template <typename F>
double integrate_with_break(F&& f, double a, double b, std::optional<double> brk) {
    numerics::AdaptiveOptions opts;
    opts.abs_tolerance = 1e-14;
    opts.rel_tolerance = 1e-12;
    if (brk && *brk > a && *brk < b) {
        return numerics::adaptive_gauss_legendre(f, a, *brk, opts) +
               numerics::adaptive_gauss_legendre(f, *brk, b, opts);
    }
    return numerics::adaptive_gauss_legendre(f, a, b, opts);
}

}  // namespace detail

/**
 * L w(x) = drift w'(x) + sigma^2/2 w''(x) + sum over jump sides of
 * lambda int (w(x +- y) - w(x)) eta e^{-eta y} dy, natural-drift convention
 * (no compensator), so that L e^{zx} = phi(z) e^{zx}.
 *
 * For a SmoothFunction the derivatives are taken from the object and the jump
 * terms are integrated by parts, lambda int_0^inf w'(x + t) e^{-eta t} dt,
 * which only needs w'.
 */
template <typename W>
double apply_generator(const W& w, const LevyModel& model, double x, const GeneratorOptions& opts = {}) {
    const double s2 = model.sigma() * model.sigma();
    double d1 = 0.0, d2 = 0.0, jumps = 0.0;
    if constexpr (SmoothFunction<W>) {
        d1 = w.derivative(x);
        if (s2 > 0.0) d2 = w.second_derivative(x);
        const std::optional<double> kink = w.kink();
        if (model.has_up_jumps()) {
            const double eta = model.eta_up();
            const double T = detail::jump_horizon(eta, opts.growth_rate);
            const auto brk = kink ? std::optional<double>(*kink - x) : std::nullopt;
            jumps += model.lambda_up() *
                     detail::integrate_with_break([&](double t) { return w.derivative(x + t) * std::exp(-eta * t); },
                                                  0.0, T, brk);
        }
        if (model.has_down_jumps()) {
            const double eta = model.eta_down();
            const double T = detail::jump_horizon(eta, opts.growth_rate);
            const auto brk = kink ? std::optional<double>(x - *kink) : std::nullopt;
            jumps -= model.lambda_down() *
                     detail::integrate_with_break([&](double t) { return w.derivative(x - t) * std::exp(-eta * t); },
                                                  0.0, T, brk);
        }
    } else {
        const double h = opts.fd_step * std::max(1.0, std::fabs(x));
        d1 = detail::richardson([&](double s) { return (w(x + s) - w(x - s)) / (2.0 * s); }, h);
        const double wx = w(x);
        if (s2 > 0.0) {
            d2 = detail::richardson([&](double s) { return (w(x + s) - 2.0 * wx + w(x - s)) / (s * s); }, h);
        }
        if (model.has_up_jumps()) {
            const double eta = model.eta_up();
            const double T = detail::jump_horizon(eta, opts.growth_rate);
            jumps += model.lambda_up() * detail::integrate_with_break(
                                             [&](double y) { return (w(x + y) - wx) * eta * std::exp(-eta * y); },
                                             0.0, T, std::nullopt);
        }
        if (model.has_down_jumps()) {
            const double eta = model.eta_down();
            const double T = detail::jump_horizon(eta, opts.growth_rate);
            jumps += model.lambda_down() * detail::integrate_with_break(
                                               [&](double y) { return (w(x - y) - wx) * eta * std::exp(-eta * y); },
                                               0.0, T, std::nullopt);
        }
    }
    return model.drift() * d1 + 0.5 * s2 * d2 + jumps;
}

// ---------------------------------------------------------------------------
// Control problem data
// ---------------------------------------------------------------------------

/// Everything derived once from (model, cost, delta): roots, extremum laws and
/// the closed-form transforms f', r, H and Q.
struct ControlProblem {
    LevyModel model;
    CostModel cost;
    double delta;
    double theta;
    RootSet roots;
    ExtremumLaw sup_law;
    ExtremumLaw inf_law;
    ExpPoly f_prime;
    ExpPoly r;
    ExpPoly H;
    ExpPoly Q;

    static ControlProblem build(const LevyModel& model, const CostModel& cost, double delta, double theta) {
        auto roots = solve_phi_equals_delta(model, delta);
        auto sup_law = extremum_law(roots, model, Extremum::Sup);
        auto inf_law = extremum_law(roots, model, Extremum::Inf);
        auto f_prime = cost.running_cost_derivative();
        auto r = resolvent_cost(cost, model, delta);
        auto H = discounted_gradient(cost, model, delta);
        auto Q = expect_shifted(inf_law, f_prime - r);
        return ControlProblem{model, cost, delta, theta, std::move(roots), std::move(sup_law), std::move(inf_law),
                              std::move(f_prime), std::move(r), std::move(H), std::move(Q)};
    }

    /// Magnitude used to scale absolute tolerances around a point.
    [[nodiscard]] double q_scale(double x) const { return 1.0 + f_prime.magnitude(x) + r.magnitude(x); }
};

// ---------------------------------------------------------------------------
// Threshold search
// ---------------------------------------------------------------------------

struct Assumption4Report {
    double left_grid_max_Q = 0.0;
    bool right_grid_monotone = false;
    double left_lo = 0.0;    // grid [left_lo, x*] for the sign check
    double right_hi = 0.0;   // grid [x*, right_hi] for the monotonicity check
    int points = 200;
    double tolerance = 0.0;
    bool flat_zero_segment = false;
    bool passed = false;
};

struct RootLocation {
    double x = 0.0;
    bool flat_zero_segment = false;
};

/**
 * Smallest root of a function with Q <= 0 to the left and Q > 0 to the right:
 * geometric bracket expansion from 0 out to |x| = 1e6, then Brent. A flat zero
 * segment is resolved to its left end by bisection.
 */
template <typename F>
RootLocation locate_smallest_root(const F& q, double zero_tolerance = 0.0) {
    constexpr double kLimit = 1e6;
    auto value = [&](double x) {
        const double v = q(x);
        if (std::isnan(v)) throw NoRootError("find_threshold: Q evaluates to NaN during the search");
        return v;
    };
    double a = 0.0, b = 0.0;
    double qa = 0.0, qb = 0.0;
    const double q0 = value(0.0);
    if (q0 < 0.0) {
        a = 0.0;
        qa = q0;
        double step = 1.0;
        for (;;) {
            const double qs = value(step);
            if (qs >= 0.0) {
                b = step;
                qb = qs;
                break;
            }
            a = step;
            qa = qs;
            if (step >= kLimit) throw NoRootError("find_threshold: Q < 0 on [0, 1e6]");
            step = std::min(2.0 * step, kLimit);
        }
    } else {
        b = 0.0;
        qb = q0;
        double step = -1.0;
        for (;;) {
            const double qs = value(step);
            if (qs < 0.0) {
                a = step;
                qa = qs;
                break;
            }
            b = step;
            qb = qs;
            if (step <= -kLimit) throw NoRootError("find_threshold: Q >= 0 on [-1e6, 0]");
            step = std::max(2.0 * step, -kLimit);
        }
    }
    numerics::BrentOptions opts;
    opts.x_tolerance = 1e-12;
    RootLocation loc;
    if (qb == 0.0) {
        loc.x = b;
    } else {
        loc.x = numerics::brent_root(value, a, b, qa, qb, opts);
    }
    const double probe = loc.x - 1e-6 * (1.0 + std::fabs(loc.x));
    if (probe > a && value(probe) >= -zero_tolerance) {
        // Flat zero set: the infimum of {Q >= -tol} on [a, x].
        loc.flat_zero_segment = true;
        double lo = a, hi = loc.x;
        while (hi - lo > 1e-12 * (1.0 + std::fabs(hi))) {
            const double mid = 0.5 * (lo + hi);
            if (value(mid) >= -zero_tolerance) hi = mid;
            else lo = mid;
        }
        loc.x = hi;
    }
    return loc;
}

/// Q <= tol on 200 points of [x* - 20, x*] and nondecreasing on 200 points of [x*, x* + 20].
template <typename F>
Assumption4Report check_assumption4(const F& q, double x_star, double scale, int points = 200, double width = 20.0) {
    Assumption4Report rep;
    rep.points = points;
    rep.left_lo = x_star - width;
    rep.right_hi = x_star + width;
    rep.tolerance = 1e-10 * scale;
    rep.left_grid_max_Q = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < points; ++i) {
        const double x = rep.left_lo + width * i / (points - 1);
        rep.left_grid_max_Q = std::max(rep.left_grid_max_Q, q(x));
    }
    rep.right_grid_monotone = true;
    double prev = q(x_star);
    for (int i = 1; i < points; ++i) {
        const double x = x_star + width * i / (points - 1);
        const double cur = q(x);
        if (cur < prev - 1e-12 * std::max({std::fabs(prev), std::fabs(cur), scale})) {
            rep.right_grid_monotone = false;
        }
        prev = cur;
    }
    rep.passed = rep.left_grid_max_Q <= rep.tolerance && rep.right_grid_monotone;
    return rep;
}

struct ThresholdResult {
    double x_star = 0.0;
    Assumption4Report assumption4;
};

inline ThresholdResult find_threshold(const ControlProblem& problem) {
    const auto& Q = problem.Q;
    const auto loc = locate_smallest_root([&](double x) { return Q(x); }, 1e-14 * problem.q_scale(0.0));
    ThresholdResult out;
    out.x_star = loc.x;
    out.assumption4 = check_assumption4([&](double x) { return Q(x); }, loc.x, problem.q_scale(loc.x));
    out.assumption4.flat_zero_segment = loc.flat_zero_segment;
    if (!out.assumption4.passed) {
        std::ostringstream os;
        os << "Q fails the sign/monotonicity structure around x* = " << loc.x
           << " (max Q on left grid " << out.assumption4.left_grid_max_Q << ", right monotone "
           << (out.assumption4.right_grid_monotone ? "yes" : "no") << ")";
        throw Assumption4Violation(os.str());
    }
    return out;
}

/// Optimal barrier x*, the smallest root of Q.
inline double find_threshold(const CostModel& cm, const LevyModel& model, double delta) {
    return find_threshold(ControlProblem::build(model, cm, delta, 0.0)).x_star;
}

/**
 * Closed-form barrier where the family admits one: the exp/exp family through
 * the root-and-pole products of the Wiener–Hopf factors, the quadratic/linear
 * family with n = 1 through E S and E I. Empty for other families.
 */
inline std::optional<double> closed_form_threshold(const CostModel& cm, const LevyModel& model, double delta,
                                                   const RootSet& roots) {
    (void)delta;
    if (const auto* fam = std::get_if<ExpExpCost>(&cm.family())) {
        const double a = fam->alpha, b = fam->beta;
        // log(1 / (E e^{alpha I} E e^{-beta S})) from roots and poles directly.
        double log_ratio = 0.0;
        for (double g : roots.negative_roots) log_ratio += std::log((g + a) / g);
        if (model.has_down_jumps()) log_ratio += std::log(model.eta_down() / (model.eta_down() + a));
        for (double r : roots.positive_roots) log_ratio += std::log((r + b) / r);
        if (model.has_up_jumps()) log_ratio += std::log(model.eta_up() / (model.eta_up() + b));
        return (std::log(fam->B / (fam->A * a)) + log_ratio) / (a + b);
    }
    if (const auto* fam = std::get_if<MonomialLinearCost>(&cm.family()); fam && fam->n == 1) {
        double es = 0.0, ei = 0.0;
        for (double r : roots.positive_roots) es += 1.0 / r;
        if (model.has_up_jumps()) es -= 1.0 / model.eta_up();
        for (double g : roots.negative_roots) ei -= 1.0 / g;
        if (model.has_down_jumps()) ei += 1.0 / model.eta_down();
        return (es - 2.0 * fam->A * ei) / (2.0 * fam->A + 1.0);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Optimal stopping value and its primitive
// ---------------------------------------------------------------------------

/**
 * v(x) = H(x) - delta^{-1} E[Q(S + x) 1{S + x >= b}], the value of stopping at
 * the first entrance into [b, inf). At the optimal barrier b = x* this is the
 * OSP value and v = c on [x*, inf).
 */
class StoppingValue {
public:
    StoppingValue(ExpPoly H, ExpPoly Q, ExtremumLaw sup_law, double delta, double barrier)
        : H_(std::move(H)), Q_(std::move(Q)), dH_(H_.derivative()), dQ_(Q_.derivative()),
          sup_(std::move(sup_law)), delta_(delta), barrier_(barrier), q_at_barrier_(Q_(barrier)),
          right_(cancel(H_, (-1.0 / delta_) * expect_shifted(sup_, Q_))), d_right_(right_.derivative()) {}

    [[nodiscard]] double operator()(double x) const { return x >= barrier_ ? right_(x) : left_branch(x); }

    /// Derivative in closed form; at x = b this is the right derivative.
    [[nodiscard]] double derivative(double x) const {
        return x >= barrier_ ? d_right_(x) : left_branch_derivative(x);
    }

    /// The formula valid below b, continued up to and past b. Differs from v on
    /// [b, inf) by the atom term, which vanishes when Q(b) = 0.
    [[nodiscard]] double left_branch(double x) const {
        return H_(x) - detail::sup_mixture_tail(sup_, Q_, x, barrier_) / delta_;
    }

    [[nodiscard]] double left_branch_derivative(double x) const {
        double boundary = 0.0;
        for (const auto& c : sup_.mixture) boundary += c.weight * c.rate * std::exp(-c.rate * (barrier_ - x));
        boundary *= q_at_barrier_;
        return dH_(x) - (detail::sup_mixture_tail(sup_, dQ_, x, barrier_) + boundary) / delta_;
    }

    [[nodiscard]] double barrier() const noexcept { return barrier_; }
    [[nodiscard]] double delta() const noexcept { return delta_; }

    /// v on [b, inf) as a single exponential polynomial.
    [[nodiscard]] const ExpPoly& right_branch() const noexcept { return right_; }

private:
    // a + b with like terms merged; coefficients that cancel to roundoff are
    // dropped, since H and E Q(S + x) share their leading exponentials.
    static ExpPoly cancel(const ExpPoly& a, const ExpPoly& b) {
        const ExpPoly sum = a + b;
        std::vector<ExpPolyTerm> out;
        for (const auto& t : sum.terms()) {
            double scale = 0.0;
            for (const auto* src : {&a, &b}) {
                for (const auto& u : src->terms()) {
                    if (u.rate == t.rate && u.power == t.power) scale += std::fabs(u.coef);
                }
            }
            if (std::fabs(t.coef) > 1e-13 * scale) out.push_back(t);
        }
        return ExpPoly(std::move(out));
    }

    ExpPoly H_;
    ExpPoly Q_;
    ExpPoly dH_;
    ExpPoly dQ_;
    ExtremumLaw sup_;
    double delta_;
    double barrier_;
    double q_at_barrier_;
    ExpPoly right_;
    ExpPoly d_right_;
};

inline StoppingValue stopping_value(const ControlProblem& problem, double barrier) {
    return {problem.H, problem.Q, problem.sup_law, problem.delta, barrier};
}

inline StoppingValue stopping_value(const CostModel& cm, const LevyModel& model, double delta, const RootSet& roots,
                                    double x_star) {
    const auto sup_law = extremum_law(roots, model, Extremum::Sup);
    return {discounted_gradient(cm, model, delta), averaging_function(cm, model, delta, roots), sup_law, delta,
            x_star};
}

/**
 * u(x) = W(x) + (f(b) + L W(b)) / delta with W(x) = int_b^x v(y) dy.
 *
 * W is tabulated on a uniform grid through b (adaptive Simpson per cell) and
 * interpolated by cubic Hermite using the exact slopes v; outside the grid it
 * is integrated directly from the nearest end.
 */
class ValueFunction {
public:
    ValueFunction(StoppingValue v, const LevyModel& model, const CostModel& cm, double delta, double lo, double hi,
                  double step = 1e-2, const GeneratorOptions& gen = {})
        : v_(std::move(v)), step_(step) {
        const double b = v_.barrier();
        const long k_lo = static_cast<long>(std::floor((std::min(lo, b) - b) / step_));
        const long k_hi = static_cast<long>(std::ceil((std::max(hi, b) - b) / step_));
        origin_ = b + static_cast<double>(k_lo) * step_;
        const auto n = static_cast<std::size_t>(k_hi - k_lo + 1);
        barrier_index_ = static_cast<std::size_t>(-k_lo);
        w_.assign(n, 0.0);
        slope_.resize(n);
        for (std::size_t i = 0; i < n; ++i) slope_[i] = v_(node(i));
        // v may jump at b (bounded variation, b off the optimum), so cells left
        // of b integrate the left branch and use its limit as the end slope.
        slope_at_barrier_from_left_ = v_.left_branch(b);
        auto right = [this](double y) { return v_(y); };
        auto left = [this](double y) { return v_.left_branch(y); };
        for (std::size_t i = barrier_index_; i + 1 < n; ++i) {
            w_[i + 1] = w_[i] + numerics::adaptive_simpson(right, node(i), node(i + 1), kSimpsonTolerance);
        }
        for (std::size_t i = barrier_index_; i > 0; --i) {
            w_[i - 1] = w_[i] - numerics::adaptive_simpson(left, node(i - 1), node(i), kSimpsonTolerance);
        }
        generator_at_barrier_ = apply_generator(*this, model, b, gen);
        constant_ = (cm.f(b) + generator_at_barrier_) / delta;
    }

    /// W(x) = int_b^x v.
    [[nodiscard]] double primitive(double x) const {
        const double last = node(w_.size() - 1);
        auto vf = [this](double y) { return v_(y); };
        if (x < origin_) return w_.front() - numerics::adaptive_simpson(vf, x, origin_, kSimpsonTolerance);
        if (x > last) return w_.back() + numerics::adaptive_simpson(vf, last, x, kSimpsonTolerance);
        auto i = static_cast<std::size_t>((x - origin_) / step_);
        if (i + 1 >= w_.size()) i = w_.size() - 2;
        if (x < node(i) && i > 0) --i;
        if (x >= node(i + 1) && i + 2 < w_.size()) ++i;
        const double t = (x - node(i)) / step_;
        const double t2 = t * t, t3 = t2 * t;
        const double s1 = i + 1 == barrier_index_ ? slope_at_barrier_from_left_ : slope_[i + 1];
        return (2 * t3 - 3 * t2 + 1) * w_[i] + (t3 - 2 * t2 + t) * step_ * slope_[i] +
               (-2 * t3 + 3 * t2) * w_[i + 1] + (t3 - t2) * step_ * s1;
    }

    [[nodiscard]] double operator()(double x) const { return primitive(x) + constant_; }
    [[nodiscard]] double derivative(double x) const { return v_(x); }
    [[nodiscard]] double second_derivative(double x) const { return v_.derivative(x); }
    [[nodiscard]] std::optional<double> kink() const { return v_.barrier(); }

    [[nodiscard]] double constant() const noexcept { return constant_; }
    [[nodiscard]] double generator_at_barrier() const noexcept { return generator_at_barrier_; }
    [[nodiscard]] double barrier() const noexcept { return v_.barrier(); }
    [[nodiscard]] const StoppingValue& stopping_value() const noexcept { return v_; }

private:
    static constexpr double kSimpsonTolerance = 1e-10;

    // Nodes are laid out from b so that b itself is a node exactly.
    [[nodiscard]] double node(std::size_t i) const {
        return v_.barrier() + (static_cast<double>(i) - static_cast<double>(barrier_index_)) * step_;
    }

    StoppingValue v_;
    double step_;
    double origin_ = 0.0;
    std::size_t barrier_index_ = 0;
    std::vector<double> w_;
    std::vector<double> slope_;
    double slope_at_barrier_from_left_ = 0.0;
    double generator_at_barrier_ = 0.0;
    double constant_ = 0.0;
};

// ---------------------------------------------------------------------------
// HJB certification
// ---------------------------------------------------------------------------

struct GridSpec {
    double left_width = 8.0;
    double right_width = 8.0;
    int points = 400;
};

struct HjbReport {
    bool passed = false;
    double x_star = 0.0;
    double tolerance = 0.0;
    GridSpec grid;
    double max_abs_residual_left = 0.0;     // |L u - delta u + f| on x < x*
    double min_residual = 0.0;              // min of L u - delta u + f over the grid
    double min_residual_right = 0.0;        // same on x >= x*
    double max_control_gap = 0.0;           // max of u' - c over the grid
    double max_abs_control_gap_right = 0.0; // |u' - c| on x >= x*
    int left_points = 0;
    int right_points = 0;
};

template <typename U>
double hjb_residual(const U& u, const CostModel& cm, const LevyModel& model, double delta, double x,
                    const GeneratorOptions& gen = {}) {
    return apply_generator(u, model, x, gen) - delta * u(x) + cm.f(x);
}

/// Checks L u - delta u + f >= 0 (= 0 left of x*) and u' <= c (= c right of x*)
/// on a uniform grid, with tolerance 1e-4 (1 + |f(x*)|).
template <typename U>
HjbReport hjb_residual_check(const U& u, const CostModel& cm, const LevyModel& model, double delta, double x_star,
                             const GridSpec& grid = {}, const GeneratorOptions& gen = {}) {
    HjbReport rep;
    rep.x_star = x_star;
    rep.grid = grid;
    rep.tolerance = 1e-4 * (1.0 + std::fabs(cm.f(x_star)));
    rep.min_residual = std::numeric_limits<double>::infinity();
    rep.min_residual_right = std::numeric_limits<double>::infinity();
    rep.max_control_gap = -std::numeric_limits<double>::infinity();
    const double lo = x_star - grid.left_width;
    const double hi = x_star + grid.right_width;
    for (int i = 0; i < grid.points; ++i) {
        const double x = lo + (hi - lo) * i / (grid.points - 1);
        const double residual = hjb_residual(u, cm, model, delta, x, gen);
        const double gap = u.derivative(x) - cm.c(x);
        rep.min_residual = std::min(rep.min_residual, residual);
        rep.max_control_gap = std::max(rep.max_control_gap, gap);
        if (x < x_star) {
            ++rep.left_points;
            rep.max_abs_residual_left = std::max(rep.max_abs_residual_left, std::fabs(residual));
        } else {
            ++rep.right_points;
            rep.min_residual_right = std::min(rep.min_residual_right, residual);
            rep.max_abs_control_gap_right = std::max(rep.max_abs_control_gap_right, std::fabs(gap));
        }
    }
    const double tol = rep.tolerance;
    rep.passed = rep.min_residual >= -tol && rep.max_abs_residual_left <= tol && rep.max_control_gap <= tol &&
                 rep.max_abs_control_gap_right <= tol;
    return rep;
}

// ---------------------------------------------------------------------------
// Full pipeline
// ---------------------------------------------------------------------------

struct SolverOptions {
    GridSpec hjb_grid;
    double value_grid_step = 1e-2;
    /// The primitive is tabulated on at least [-value_grid_half_width, value_grid_half_width].
    double value_grid_half_width = 31.0;
};

/// v, u and the HJB report for reflection at an arbitrary barrier b.
struct BarrierAnalysis {
    double barrier;
    StoppingValue v;
    ValueFunction u;
    HjbReport hjb_report;
};

inline GeneratorOptions generator_options_for(const ControlProblem& problem) {
    GeneratorOptions gen;
    gen.growth_rate = problem.theta;
    return gen;
}

inline BarrierAnalysis analyze_barrier(const ControlProblem& problem, double barrier, const SolverOptions& opts = {}) {
    auto v = stopping_value(problem, barrier);
    const double lo = std::min(barrier - opts.hjb_grid.left_width, -opts.value_grid_half_width) - 1.0;
    const double hi = std::max(barrier + opts.hjb_grid.right_width, opts.value_grid_half_width) + 1.0;
    const auto gen = generator_options_for(problem);
    ValueFunction u(v, problem.model, problem.cost, problem.delta, lo, hi, opts.value_grid_step, gen);
    auto report = hjb_residual_check(u, problem.cost, problem.model, problem.delta, barrier, opts.hjb_grid, gen);
    return BarrierAnalysis{barrier, std::move(v), std::move(u), report};
}

struct ThresholdSolution {
    ControlProblem problem;
    double x_star;
    std::optional<double> closed_form_x_star;
    Assumption4Report assumption4_report;
    StoppingValue v;
    ValueFunction u;
    HjbReport hjb_report;
};

inline ThresholdSolution solve_control_problem(const LevyModel& model, const CostModel& cost, double delta,
                                               double theta, const SolverOptions& opts = {}) {
    auto problem = ControlProblem::build(model, cost, delta, theta);
    const auto threshold = find_threshold(problem);
    auto analysis = analyze_barrier(problem, threshold.x_star, opts);
    auto closed = closed_form_threshold(cost, model, delta, problem.roots);
    return ThresholdSolution{std::move(problem),          threshold.x_star,       closed,
                             threshold.assumption4,       std::move(analysis.v), std::move(analysis.u),
                             analysis.hjb_report};
}

}  // namespace lsc
