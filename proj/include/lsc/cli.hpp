#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lsc/cost_model.hpp"
#include "lsc/errors.hpp"
#include "lsc/fluctuation.hpp"
#include "lsc/levy_model.hpp"
#include "lsc/mc_simulator.hpp"
#include "lsc/scenario.hpp"
#include "lsc/threshold_solver.hpp"

namespace lsc::cli {

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kSolverFailure = 2, kIoFailure = 3 };

/// Exit code for an exception escaping a command.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const IoError*>(&e)) return kIoFailure;
    if (dynamic_cast<const NoRootError*>(&e) || dynamic_cast<const Assumption4Violation*>(&e) ||
        dynamic_cast<const ConvergenceError*>(&e) || dynamic_cast<const DegenerateError*>(&e)) {
        return kSolverFailure;
    }
    return kValidationFailure;
}

struct Options {
    std::string scenario;
    std::string out = "-";
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> paths;
    std::optional<double> dt;
    std::optional<double> horizon;
    std::optional<double> lo;
    std::optional<double> hi;
    std::optional<int> points;
    std::optional<double> start_x;
    std::optional<double> barrier;
};

struct CommandResult {
    std::string text;
    int code = kOk;
};

namespace detail {

inline json report_json(const ValidationReport& r) {
    return {{"passed", r.passed},     {"theta_in_domain", r.theta_in_domain},
            {"theta", r.theta},       {"delta", r.delta},
            {"phi_plus", r.phi_plus}, {"phi_minus", r.phi_minus},
            {"reason", r.reason}};
}

inline json report_json(const GrowthScan& g) {
    return {{"K", g.K}, {"bounded", g.bounded}, {"lo", g.lo}, {"hi", g.hi}};
}

inline json report_json(const Assumption4Report& r) {
    return {{"passed", r.passed},
            {"left_grid_max_Q", r.left_grid_max_Q},
            {"right_grid_monotone", r.right_grid_monotone},
            {"left_lo", r.left_lo},
            {"right_hi", r.right_hi},
            {"points", r.points},
            {"tolerance", r.tolerance},
            {"flat_zero_segment", r.flat_zero_segment}};
}

inline json report_json(const HjbReport& r) {
    return {{"passed", r.passed},
            {"x_star", r.x_star},
            {"tolerance", r.tolerance},
            {"max_abs_residual_left", r.max_abs_residual_left},
            {"min_residual", r.min_residual},
            {"min_residual_right", r.min_residual_right},
            {"max_control_gap", r.max_control_gap},
            {"max_abs_control_gap_right", r.max_abs_control_gap_right},
            {"left_points", r.left_points},
            {"right_points", r.right_points},
            {"grid",
             {{"left_width", r.grid.left_width}, {"right_width", r.grid.right_width}, {"points", r.grid.points}}}};
}

inline json law_json(const ExtremumLaw& law) {
    json mixture = json::array();
    for (const auto& c : law.mixture) mixture.push_back({{"weight", c.weight}, {"rate", c.rate}});
    const auto m = moments(law);
    return {{"atom", law.atom_at_zero}, {"mixture", mixture}, {"first_moment", m.first}, {"second_moment", m.second}};
}

inline json header(const Scenario& s, const char* command) {
    return {{"schema", kScenarioSchema}, {"command", command}, {"scenario", s.name}};
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Commands past `validate` refuse scenarios that fail the exponential-moment check.
inline void require_assumption1(const Scenario& s) {
    const auto report = check_assumption1(s.model, s.delta, s.theta);
    if (!report.passed) throw ParameterError("scenario fails the exponential-moment check: " + report.reason);
}

inline SimConfig sim_config(const Scenario& s, const Options& o) {
    SimConfig cfg = s.sim;
    if (o.seed) cfg.seed = *o.seed;
    if (o.paths) cfg.paths = *o.paths;
    if (o.dt) cfg.dt = *o.dt;
    if (o.horizon) cfg.horizon = *o.horizon;
    return cfg;
}

inline std::vector<double> linspace(double lo, double hi, int points) {
    if (points < 1) throw ParameterError("--points must be >= 1");
    if (points == 1) return {lo};
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) xs.push_back(lo + (hi - lo) * i / (points - 1));
    return xs;
}

}  // namespace detail

inline CommandResult cmd_validate(const Scenario& s) {
    const auto a1 = check_assumption1(s.model, s.delta, s.theta);
    const auto growth = cost_growth_scan(s.cost, s.theta);
    json smooth_json;
    bool smooth_ok = true;
    try {
        const auto smooth = smoothness_growth_scan(s.cost, s.model, s.delta, s.theta);
        smooth_json = detail::report_json(smooth);
        // The smoothness bound only matters under unbounded variation.
        if (s.model.unbounded_variation()) smooth_ok = smooth.bounded;
    } catch (const DomainError& e) {
        smooth_json = {{"error", e.what()}};
        smooth_ok = false;
    }
    const auto family = check_family_preconditions(s.cost, s.model);
    const bool passed = a1.passed && growth.bounded && smooth_ok && family.monotonicity_guaranteed;
    json doc = detail::header(s, "validate");
    doc["passed"] = passed;
    doc["assumption1"] = detail::report_json(a1);
    doc["cost_growth"] = detail::report_json(growth);
    doc["smoothness_growth"] = smooth_json;
    doc["family"] = {{"monotonicity_guaranteed", family.monotonicity_guaranteed}, {"warnings", family.warnings}};
    return {detail::dump(doc), passed ? kOk : kValidationFailure};
}

inline CommandResult cmd_solve(const Scenario& s) {
    detail::require_assumption1(s);
    const auto problem = ControlProblem::build(s.model, s.cost, s.delta, s.theta);
    const auto threshold = find_threshold(problem);
    const auto closed = closed_form_threshold(s.cost, s.model, s.delta, problem.roots);
    json doc = detail::header(s, "solve");
    doc["x_star"] = threshold.x_star;
    doc["closed_form_x_star"] = closed ? json(*closed) : json(nullptr);
    doc["assumption4"] = detail::report_json(threshold.assumption4);
    return {detail::dump(doc), kOk};
}

inline CommandResult cmd_factors(const Scenario& s) {
    detail::require_assumption1(s);
    const auto roots = solve_phi_equals_delta(s.model, s.delta);
    json doc = detail::header(s, "factors");
    doc["delta"] = s.delta;
    doc["roots"] = {{"positive", roots.positive_roots}, {"negative", roots.negative_roots}};
    doc["sup"] = detail::law_json(extremum_law(roots, s.model, Extremum::Sup));
    doc["inf"] = detail::law_json(extremum_law(roots, s.model, Extremum::Inf));
    return {detail::dump(doc), kOk};
}

/// CSV of x, Q, v, c, u and the HJB residual; default range x* -/+ 3 with 100 points.
inline CommandResult cmd_value(const Scenario& s, const Options& o) {
    detail::require_assumption1(s);
    const auto sol = solve_control_problem(s.model, s.cost, s.delta, s.theta);
    const auto gen = generator_options_for(sol.problem);
    std::ostringstream os;
    os << csv_header(value_csv_header()) << '\n';
    for (double x : detail::linspace(o.lo.value_or(sol.x_star - 3.0), o.hi.value_or(sol.x_star + 3.0),
                                     o.points.value_or(100))) {
        os << csv_row({x, sol.problem.Q(x), sol.v(x), s.cost.c(x), sol.u(x),
                       hjb_residual(sol.u, s.cost, s.model, s.delta, x, gen)})
           << '\n';
    }
    return {os.str(), kOk};
}

/// CSV per barrier; default 11 barriers on x* -/+ 1, started from x*.
inline CommandResult cmd_sweep(const Scenario& s, const Options& o) {
    detail::require_assumption1(s);
    const auto problem = ControlProblem::build(s.model, s.cost, s.delta, s.theta);
    const double x_star = find_threshold(problem).x_star;
    SimConfig cfg = detail::sim_config(s, o);
    cfg.start_x = o.start_x.value_or(x_star);
    const auto barriers =
        detail::linspace(o.lo.value_or(x_star - 1.0), o.hi.value_or(x_star + 1.0), o.points.value_or(11));
    const auto sweep = barrier_sweep(s.model, s.cost, s.delta, cfg, barriers);
    std::ostringstream os;
    os << csv_header(sweep_csv_header()) << '\n';
    for (const auto& p : sweep.points) {
        const auto& e = p.estimate;
        os << csv_row({p.barrier, e.mean, e.std_error, e.components.running, e.components.continuous_control,
                       e.components.jump_control, e.components.initial_control, e.tail_bound})
           << '\n';
    }
    return {os.str(), kOk};
}

/// HJB report at x* (or at --barrier); exit code 0 iff it passes.
inline CommandResult cmd_certify(const Scenario& s, const Options& o) {
    detail::require_assumption1(s);
    const auto problem = ControlProblem::build(s.model, s.cost, s.delta, s.theta);
    const double barrier = o.barrier ? *o.barrier : find_threshold(problem).x_star;
    const auto analysis = analyze_barrier(problem, barrier);
    json doc = detail::header(s, "certify");
    doc.update(detail::report_json(analysis.hjb_report));
    return {detail::dump(doc), analysis.hjb_report.passed ? kOk : kValidationFailure};
}

inline void write_output(const std::string& target, const std::string& text, std::ostream& out) {
    if (target == "-") {
        out << text;
        out.flush();
        return;
    }
    std::ofstream file(target, std::ios::binary);
    if (!file) throw IoError("cannot open output file: " + target);
    file << text;
    if (!file) throw IoError("failed writing output file: " + target);
}

/// Entry point of the command-line tool; returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Reflecting-barrier singular control of Levy processes"};
    app.require_subcommand(1);
    Options opts;

    struct Spec {
        const char* name;
        const char* help;
        bool sim;
        bool range;
        bool barrier;
    };
    const Spec specs[] = {
        {"validate", "Check the exponential-moment condition, growth bounds and family preconditions", false, false,
         false},
        {"solve", "Optimal barrier x* with its structural check", false, false, false},
        {"factors", "Roots of phi = delta, Wiener-Hopf extremum laws and moments", false, false, false},
        {"value", "CSV of Q, v, c, u and the HJB residual on a grid", false, true, false},
        {"sweep", "Monte Carlo cost of reflecting at a range of barriers", true, true, false},
        {"certify", "HJB residual certificate", false, false, true},
    };
    std::vector<CLI::App*> subs;
    for (const auto& spec : specs) {
        CLI::App* sub = app.add_subcommand(spec.name, spec.help);
        sub->add_option("--scenario", opts.scenario, "Scenario JSON file")->required();
        sub->add_option("--out", opts.out, "Output path, '-' for standard output")->capture_default_str();
        sub->add_option("--seed", opts.seed, "Master seed");
        sub->add_option("--paths", opts.paths, "Monte Carlo paths");
        sub->add_option("--dt", opts.dt, "Simulation grid step");
        sub->add_option("--horizon", opts.horizon, "Simulation horizon");
        if (spec.range) {
            sub->add_option("--lo", opts.lo, "Left end of the grid");
            sub->add_option("--hi", opts.hi, "Right end of the grid");
            sub->add_option("--points", opts.points, "Number of grid points");
        }
        if (spec.sim) sub->add_option("--x", opts.start_x, "Starting state (default x*)");
        if (spec.barrier) sub->add_option("--barrier", opts.barrier, "Barrier to certify (default x*)");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidationFailure;
    }

    try {
        const Scenario scenario = load_scenario(opts.scenario);
        CommandResult result;
        if (subs[0]->parsed()) result = cmd_validate(scenario);
        else if (subs[1]->parsed()) result = cmd_solve(scenario);
        else if (subs[2]->parsed()) result = cmd_factors(scenario);
        else if (subs[3]->parsed()) result = cmd_value(scenario, opts);
        else if (subs[4]->parsed()) result = cmd_sweep(scenario, opts);
        else result = cmd_certify(scenario, opts);
        write_output(opts.out, result.text, out);
        return result.code;
    } catch (const std::exception& e) {
        const int code = exit_code_for(e);
        const json doc{{"schema", kScenarioSchema},
                       {"command", "error"},
                       {"scenario", opts.scenario},
                       {"error", e.what()},
                       {"exit_code", code}};
        err << doc.dump() << '\n';
        return code;
    }
}

}  // namespace lsc::cli
