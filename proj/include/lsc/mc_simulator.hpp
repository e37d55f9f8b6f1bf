#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lsc/cost_model.hpp"
#include "lsc/errors.hpp"
#include "lsc/levy_model.hpp"
#include "lsc/numerics/random.hpp"
#include "lsc/numerics/summation.hpp"

namespace lsc {

struct SimConfig {
    /// Time truncation T; unset means 40 / delta.
    std::optional<double> horizon;
    /// Grid step for the drift/diffusion part. A model with neither is simulated
    /// jump by jump and ignores dt.
    double dt = 1e-3;
    std::uint64_t paths = 10000;
    std::uint64_t seed = 20240601;
    double start_x = 0.0;
    double barrier = 0.0;
    /// Growth exponent used in the truncation bound.
    double theta = 1.0;
    /// estimate_cost refuses to run when the truncation bound exceeds this.
    double tail_tolerance = 1e-6;
    /// Worker threads; 0 means LSC_THREADS or the hardware concurrency.
    unsigned threads = 0;
};

inline double resolved_horizon(const SimConfig& config, double delta) {
    return config.horizon ? *config.horizon : 40.0 / delta;
}

inline void validate_config(const SimConfig& config, double delta) {
    const double T = resolved_horizon(config, delta);
    if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("SimConfig: horizon must be positive and finite");
    if (!(config.dt > 0.0) || config.dt > T) throw ConfigError("SimConfig: need 0 < dt <= horizon");
    if (config.paths < 1) throw ConfigError("SimConfig: paths must be >= 1");
    if (!std::isfinite(config.start_x)) throw ConfigError("SimConfig: start_x must be finite");
    if (std::isnan(config.barrier)) throw ConfigError("SimConfig: barrier must not be NaN");
}

/// Worker count: LSC_THREADS if set to a positive integer, else the hardware concurrency.
inline unsigned default_thread_count() {
    if (const char* env = std::getenv("LSC_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------
// Path simulation
// ---------------------------------------------------------------------------

/// Increment over (previous epoch, time]: first the continuous part, then a
/// jump at `time` (zero at grid points).
struct PathEvent {
    double time = 0.0;
    double continuous = 0.0;
    double jump = 0.0;
};

struct SamplePath {
    double start = 0.0;
    std::vector<PathEvent> events;  // ascending times; the last one is the horizon
};

/**
 * Fills `path` with one trajectory of the uncontrolled process on [0, T].
 *
 * Jump times come from exponential interarrivals on each side and are merged
 * with the uniform dt grid (no grid for models without drift and diffusion).
 * Brownian increments are exact on every merged segment. The stream is
 * Philox keyed by the seed with the path index as stream id.
 */
inline void simulate_path_into(const LevyModel& model, double horizon, double dt, std::uint64_t seed,
                               std::uint64_t path_index, double start, SamplePath& path) {
    numerics::Philox4x32 rng(seed, path_index);
    path.start = start;
    path.events.clear();
    const double inf = std::numeric_limits<double>::infinity();
    const bool gridded = model.sigma() > 0.0 || model.drift() != 0.0;
    const double sigma = model.sigma();
    const double drift = model.drift();
    double next_up = model.has_up_jumps() ? rng.exponential(model.lambda_up()) : inf;
    double next_down = model.has_down_jumps() ? rng.exponential(model.lambda_down()) : inf;
    std::uint64_t k = 1;
    double next_grid = gridded ? std::min(dt, horizon) : horizon;
    double t = 0.0;
    for (;;) {
        const double jump_time = std::min(next_up, next_down);
        const bool is_jump = jump_time < next_grid;
        const double t1 = is_jump ? jump_time : next_grid;
        const double h = t1 - t;
        PathEvent ev;
        ev.time = t1;
        ev.continuous = drift * h;
        if (sigma > 0.0) ev.continuous += sigma * std::sqrt(h) * rng.normal();
        if (is_jump) {
            if (next_up <= next_down) {
                ev.jump = rng.exponential(model.eta_up());
                next_up += rng.exponential(model.lambda_up());
            } else {
                ev.jump = -rng.exponential(model.eta_down());
                next_down += rng.exponential(model.lambda_down());
            }
        }
        path.events.push_back(ev);
        t = t1;
        if (!is_jump) {
            if (t1 >= horizon) break;
            ++k;
            next_grid = gridded ? std::min(static_cast<double>(k) * dt, horizon) : horizon;
        }
    }
}

inline SamplePath simulate_path(const LevyModel& model, const SimConfig& config, double delta,
                                std::uint64_t path_index) {
    validate_config(config, delta);
    SamplePath path;
    simulate_path_into(model, resolved_horizon(config, delta), config.dt, config.seed, path_index, config.start_x,
                       path);
    return path;
}

// ---------------------------------------------------------------------------
// Reflection
// ---------------------------------------------------------------------------

struct ControlledEpoch {
    double time = 0.0;
    double pre_jump_state = 0.0;      // X^b just before the jump, after continuous reflection
    double state = 0.0;               // X^b at the epoch
    double continuous_control = 0.0;  // dD^c accrued over the segment
    double jump_control = 0.0;        // Delta D at the epoch
    double jump = 0.0;                // Delta X at the epoch
    double cumulative_control = 0.0;  // D at the epoch, including d0
};

struct ControlledPath {
    double barrier = 0.0;
    double initial_state = 0.0;  // X^b_0 = min(x, b)
    double initial_control = 0.0;
    std::vector<ControlledEpoch> epochs;
};

namespace detail {

/// Skorokhod recursion on the reflected state; `visit(previous_state, epoch)`
/// is called once per epoch.
template <typename Visit>
void walk_reflected(const SamplePath& path, double barrier, Visit&& visit) {
    const double d0 = std::max(path.start - barrier, 0.0);
    double state = path.start - d0;
    double cumulative = d0;
    for (const auto& ev : path.events) {
        ControlledEpoch ep;
        ep.time = ev.time;
        double pre = state + ev.continuous;
        if (pre > barrier) {
            ep.continuous_control = pre - barrier;
            pre = barrier;
        }
        ep.pre_jump_state = pre;
        ep.jump = ev.jump;
        double post = pre + ev.jump;
        if (post > barrier) {
            ep.jump_control = post - barrier;
            post = barrier;
        }
        ep.state = post;
        cumulative += ep.continuous_control + ep.jump_control;
        ep.cumulative_control = cumulative;
        visit(state, ep);
        state = post;
    }
}

}  // namespace detail

inline ControlledPath reflect_at_barrier(const SamplePath& path, double barrier) {
    ControlledPath out;
    out.barrier = barrier;
    out.initial_control = std::max(path.start - barrier, 0.0);
    out.initial_state = path.start - out.initial_control;
    out.epochs.reserve(path.events.size());
    detail::walk_reflected(path, barrier, [&](double, const ControlledEpoch& ep) { out.epochs.push_back(ep); });
    return out;
}

// ---------------------------------------------------------------------------
// Cost estimation
// ---------------------------------------------------------------------------

struct CostComponents {
    double running = 0.0;
    double continuous_control = 0.0;
    double jump_control = 0.0;
    double initial_control = 0.0;
};

struct CostEstimate {
    double barrier = 0.0;
    double mean = 0.0;  // sum of the component means
    double std_error = 0.0;
    CostComponents components;
    double tail_bound = 0.0;
    std::uint64_t paths = 0;
};

/// Bound on the discounted running cost beyond the horizon,
/// e^{-delta T} K_f (1 + cosh(theta b)) / delta.
inline double truncation_bound(const CostModel& cm, double delta, double horizon, double theta, double barrier) {
    const double K = running_cost_growth_constant(cm, theta);
    return std::exp(-delta * horizon) * K * (1.0 + std::cosh(theta * barrier)) / delta;
}

namespace detail {

/// Per-segment weights of int e^{-delta s} g(s) ds for g linear between the
/// segment ends: w0 multiplies g(t0), w1 multiplies g(t1).
struct SegmentWeights {
    double w0 = 0.0;
    double w1 = 0.0;
    double discount = 0.0;       // e^{-delta t1}
    double mean_discount = 0.0;  // average of e^{-delta s} over the segment
};

inline void segment_weights(const SamplePath& path, double delta, std::vector<SegmentWeights>& out) {
    out.resize(path.events.size());
    double t0 = 0.0;
    double e0 = 1.0;
    for (std::size_t i = 0; i < path.events.size(); ++i) {
        const double t1 = path.events[i].time;
        const double h = t1 - t0;
        const double e1 = std::exp(-delta * t1);
        SegmentWeights& w = out[i];
        w.discount = e1;
        w.mean_discount = e1;
        if (h > 0.0) {
            const double dh = delta * h;
            const double total = -e0 * std::expm1(-dh) / delta;
            // int_{t0}^{t1} e^{-delta s} (s - t0)/h ds; the series avoids cancellation for small dh.
            double right = 0.0;
            if (dh < 1e-3) {
                right = e0 * h * (0.5 - dh / 3.0 + dh * dh / 8.0 - dh * dh * dh / 30.0);
            } else {
                right = total / dh - e1 / delta;
            }
            w.w1 = right;
            w.w0 = total - right;
            w.mean_discount = total / h;
        }
        t0 = t1;
        e0 = e1;
    }
}

/// Discounted cost components of one path reflected at `barrier`.
inline CostComponents path_cost(const SamplePath& path, const std::vector<SegmentWeights>& weights,
                                const CostModel& cm, const ExpPoly& f, double c_at_barrier, double barrier) {
    CostComponents out;
    const double d0 = std::max(path.start - barrier, 0.0);
    if (d0 > 0.0) out.initial_control = cm.control_cost_integral(barrier, path.start);
    numerics::CompensatedSum running, continuous, jumps;
    std::size_t i = 0;
    double f_prev = f(std::min(path.start, barrier));
    walk_reflected(path, barrier, [&](double, const ControlledEpoch& ep) {
        const SegmentWeights& w = weights[i++];
        const double f_pre = f(ep.pre_jump_state);
        running += w.w0 * f_prev + w.w1 * f_pre;
        if (ep.continuous_control > 0.0) continuous += w.mean_discount * c_at_barrier * ep.continuous_control;
        if (ep.jump_control > 0.0) jumps += w.discount * cm.control_cost_integral(barrier, barrier + ep.jump_control);
        f_prev = ep.jump != 0.0 ? f(ep.state) : f_pre;
    });
    out.running = running.value();
    out.continuous_control = continuous.value();
    out.jump_control = jumps.value();
    return out;
}

/// Welford accumulator for path totals plus compensated component sums.
struct ChunkStats {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    numerics::CompensatedSum running, continuous, jumps, initial;

    void add(const CostComponents& c) {
        const double total = c.running + c.continuous_control + c.jump_control + c.initial_control;
        ++n;
        const double d = total - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (total - mean);
        running += c.running;
        continuous += c.continuous_control;
        jumps += c.jump_control;
        initial += c.initial_control;
    }

    void merge(const ChunkStats& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
        const double d = o.mean - mean;
        const double nt = na + nb;
        mean += d * nb / nt;
        m2 += o.m2 + d * d * na * nb / nt;
        n += o.n;
        running.merge(o.running);
        continuous.merge(o.continuous);
        jumps.merge(o.jumps);
        initial.merge(o.initial);
    }
};

inline constexpr std::uint64_t kChunkPaths = 1024;

}  // namespace detail

struct SweepPoint {
    double barrier = 0.0;
    CostEstimate estimate;
};

struct BarrierSweep {
    std::vector<SweepPoint> points;
    std::size_t argmin = 0;
    /// Estimates fall up to the argmin and rise after it, up to the sum of the
    /// neighbouring standard errors.
    bool unimodal_within_ci = false;
};

/**
 * Estimates J(x, D^b) for every barrier with common random numbers: each
 * path is simulated once and reflected at all barriers. Paths are processed
 * in fixed chunks whose statistics merge in chunk order, so the result does
 * not depend on the number of threads.
 */
inline BarrierSweep barrier_sweep(const LevyModel& model, const CostModel& cm, double delta, const SimConfig& config,
                                  const std::vector<double>& barriers) {
    validate_config(config, delta);
    if (!(delta > 0.0)) throw ConfigError("barrier_sweep: delta must be > 0");
    if (barriers.empty()) throw ConfigError("barrier_sweep: no barriers");
    const double T = resolved_horizon(config, delta);
    std::vector<double> tails;
    for (double b : barriers) {
        if (std::isnan(b)) throw ConfigError("barrier_sweep: barrier must not be NaN");
        const double tail = truncation_bound(cm, delta, T, config.theta, b);
        if (!(tail <= config.tail_tolerance)) {
            std::ostringstream os;
            os << "horizon " << T << " leaves a truncation bound " << tail << " above tolerance "
               << config.tail_tolerance << " at barrier " << b;
            throw ConfigError(os.str());
        }
        tails.push_back(tail);
    }

    const auto f = cm.running_cost();
    std::vector<double> c_at;
    for (double b : barriers) c_at.push_back(std::isfinite(b) ? cm.c(b) : 0.0);

    const std::uint64_t chunks = (config.paths + detail::kChunkPaths - 1) / detail::kChunkPaths;
    const std::size_t nb = barriers.size();
    std::vector<detail::ChunkStats> stats(static_cast<std::size_t>(chunks) * nb);

    auto run_chunk = [&](std::uint64_t chunk) {
        SamplePath path;
        std::vector<detail::SegmentWeights> weights;
        const std::uint64_t first = chunk * detail::kChunkPaths;
        const std::uint64_t last = std::min(config.paths, first + detail::kChunkPaths);
        for (std::uint64_t p = first; p < last; ++p) {
            simulate_path_into(model, T, config.dt, config.seed, p, config.start_x, path);
            detail::segment_weights(path, delta, weights);
            for (std::size_t j = 0; j < nb; ++j) {
                stats[chunk * nb + j].add(detail::path_cost(path, weights, cm, f, c_at[j], barriers[j]));
            }
        }
    };

    const unsigned wanted = config.threads > 0 ? config.threads : default_thread_count();
    const auto workers = static_cast<unsigned>(std::min<std::uint64_t>(wanted, chunks));
    if (workers <= 1) {
        for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::uint64_t c = next++; c < chunks; c = next++) run_chunk(c);
            });
        }
    }

    BarrierSweep sweep;
    for (std::size_t j = 0; j < nb; ++j) {
        detail::ChunkStats total;
        for (std::uint64_t c = 0; c < chunks; ++c) total.merge(stats[c * nb + j]);
        const double n = static_cast<double>(total.n);
        CostEstimate est;
        est.barrier = barriers[j];
        est.paths = total.n;
        est.components.running = total.running.value() / n;
        est.components.continuous_control = total.continuous.value() / n;
        est.components.jump_control = total.jumps.value() / n;
        est.components.initial_control = total.initial.value() / n;
        est.mean = est.components.running + est.components.continuous_control + est.components.jump_control +
                   est.components.initial_control;
        est.std_error = total.n > 1 ? std::sqrt(total.m2 / (n - 1.0) / n) : 0.0;
        est.tail_bound = tails[j];
        sweep.points.push_back({barriers[j], est});
    }

    for (std::size_t j = 1; j < nb; ++j) {
        if (sweep.points[j].estimate.mean < sweep.points[sweep.argmin].estimate.mean) sweep.argmin = j;
    }
    sweep.unimodal_within_ci = true;
    for (std::size_t j = 0; j + 1 < nb; ++j) {
        const auto& a = sweep.points[j].estimate;
        const auto& b = sweep.points[j + 1].estimate;
        const double slack = a.std_error + b.std_error;
        if (j < sweep.argmin && b.mean > a.mean + slack) sweep.unimodal_within_ci = false;
        if (j >= sweep.argmin && b.mean < a.mean - slack) sweep.unimodal_within_ci = false;
    }
    return sweep;
}

/// Monte Carlo estimate of the discounted cost of reflecting at config.barrier
/// from config.start_x.
inline CostEstimate estimate_cost(const LevyModel& model, const CostModel& cm, double delta, const SimConfig& config) {
    return barrier_sweep(model, cm, delta, config, {config.barrier}).points.front().estimate;
}

}  // namespace lsc
