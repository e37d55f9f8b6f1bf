#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "lsc/cost_model.hpp"
#include "lsc/errors.hpp"
#include "lsc/levy_model.hpp"
#include "lsc/mc_simulator.hpp"

namespace lsc {

using json = nlohmann::json;

inline constexpr int kScenarioSchema = 1;

/// One problem instance as stored in a scenario file.
struct Scenario {
    std::string name;
    LevyModel model;
    CostModel cost;
    double delta = 1.0;
    double theta = 1.0;
    SimConfig sim;
    std::vector<std::string> outputs;
};

namespace detail {

inline const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw ParameterError(where + ": missing \"" + key + "\"");
    return obj.at(key);
}

inline double number(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number()) throw ParameterError(where + ": \"" + key + "\" must be a number");
    return v.get<double>();
}

inline double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
    return obj.contains(key) ? number(obj, key, where) : fallback;
}

inline LevyModel parse_model(const json& j) {
    const std::string where = "model";
    const json& kind = require(j, "kind", where);
    if (!kind.is_string()) throw ParameterError("model: \"kind\" must be a string");
    const auto k = kind.get<std::string>();
    if (k == "jump_diffusion") {
        return LevyModel::jump_diffusion(number(j, "drift", where), number(j, "sigma", where),
                                         number_or(j, "lambda_up", 0.0, where), number_or(j, "eta_up", 1.0, where),
                                         number_or(j, "lambda_down", 0.0, where),
                                         number_or(j, "eta_down", 1.0, where));
    }
    if (k == "compound_poisson") {
        return LevyModel::compound_poisson(number_or(j, "lambda_up", 0.0, where), number_or(j, "eta_up", 1.0, where),
                                           number_or(j, "lambda_down", 0.0, where),
                                           number_or(j, "eta_down", 1.0, where));
    }
    throw ParameterError("model: unknown kind \"" + k + "\"");
}

inline CostModel parse_cost(const json& j) {
    const std::string where = "cost";
    const json& family = require(j, "family", where);
    if (!family.is_string()) throw ParameterError("cost: \"family\" must be a string");
    const auto f = family.get<std::string>();
    if (f == "exp_exp") {
        return CostModel(ExpExpCost{number(j, "A", where), number(j, "alpha", where), number(j, "B", where),
                                    number(j, "beta", where)});
    }
    if (f == "monomial_linear") {
        const json& n = require(j, "n", where);
        if (!n.is_number_integer()) throw ParameterError("cost: \"n\" must be an integer");
        return CostModel(MonomialLinearCost{number(j, "A", where), n.get<int>(), number_or(j, "B", 0.0, where)});
    }
    if (f == "exp_quadratic") {
        return CostModel(ExpQuadraticCost{number(j, "A", where), number_or(j, "B", 0.0, where)});
    }
    throw ParameterError("cost: unknown family \"" + f + "\"");
}

inline json model_to_json(const LevyModel& m) {
    json j;
    if (m.kind() == ProcessKind::JumpDiffusion) {
        j["kind"] = "jump_diffusion";
        j["drift"] = m.drift();
        j["sigma"] = m.sigma();
    } else {
        j["kind"] = "compound_poisson";
    }
    j["lambda_up"] = m.lambda_up();
    j["eta_up"] = m.eta_up();
    j["lambda_down"] = m.lambda_down();
    j["eta_down"] = m.eta_down();
    return j;
}

inline json cost_to_json(const CostModel& cm) {
    json j;
    j["family"] = cm.family_name();
    std::visit(
        [&j](const auto& fam) {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, ExpExpCost>) {
                j["A"] = fam.A;
                j["alpha"] = fam.alpha;
                j["B"] = fam.B;
                j["beta"] = fam.beta;
            } else if constexpr (std::is_same_v<T, MonomialLinearCost>) {
                j["A"] = fam.A;
                j["n"] = fam.n;
                j["B"] = fam.B;
            } else {
                j["A"] = fam.A;
                j["B"] = fam.B;
            }
        },
        cm.family());
    return j;
}

}  // namespace detail

/// Throws ParameterError (or the model/cost constructors' errors) on bad input.
inline Scenario parse_scenario(const json& j) {
    if (!j.is_object()) throw ParameterError("scenario: top level must be an object");
    const json& schema = detail::require(j, "schema", "scenario");
    if (!schema.is_number_integer() || schema.get<int>() != kScenarioSchema) {
        throw ParameterError("scenario: unsupported schema version (expected 1)");
    }
    Scenario s{j.value("name", std::string{}), detail::parse_model(detail::require(j, "model", "scenario")),
               detail::parse_cost(detail::require(j, "cost", "scenario")),
               detail::number(j, "delta", "scenario"),
               detail::number(j, "theta", "scenario"),
               SimConfig{},
               {}};
    if (!(s.delta > 0.0) || !std::isfinite(s.delta)) throw ParameterError("scenario: delta must be > 0");
    if (!(s.theta > 0.0) || !std::isfinite(s.theta)) throw ParameterError("scenario: theta must be > 0");
    s.sim.theta = s.theta;
    if (j.contains("sim")) {
        const json& sim = j.at("sim");
        if (!sim.is_object()) throw ParameterError("scenario: \"sim\" must be an object");
        if (sim.contains("horizon")) s.sim.horizon = detail::number(sim, "horizon", "sim");
        s.sim.dt = detail::number_or(sim, "dt", s.sim.dt, "sim");
        if (sim.contains("paths")) {
            if (!sim.at("paths").is_number_unsigned()) throw ParameterError("sim: \"paths\" must be a positive integer");
            s.sim.paths = sim.at("paths").get<std::uint64_t>();
        }
        if (sim.contains("seed")) {
            if (!sim.at("seed").is_number_unsigned()) throw ParameterError("sim: \"seed\" must be an unsigned integer");
            s.sim.seed = sim.at("seed").get<std::uint64_t>();
        }
        s.sim.tail_tolerance = detail::number_or(sim, "tail_tolerance", s.sim.tail_tolerance, "sim");
    }
    if (j.contains("outputs")) {
        if (!j.at("outputs").is_array()) throw ParameterError("scenario: \"outputs\" must be an array");
        for (const auto& o : j.at("outputs")) {
            if (!o.is_string()) throw ParameterError("scenario: \"outputs\" entries must be strings");
            s.outputs.push_back(o.get<std::string>());
        }
    }
    return s;
}

inline json to_json(const Scenario& s) {
    json j;
    j["schema"] = kScenarioSchema;
    j["name"] = s.name;
    j["model"] = detail::model_to_json(s.model);
    j["cost"] = detail::cost_to_json(s.cost);
    j["delta"] = s.delta;
    j["theta"] = s.theta;
    json sim;
    if (s.sim.horizon) sim["horizon"] = *s.sim.horizon;
    sim["dt"] = s.sim.dt;
    sim["paths"] = s.sim.paths;
    sim["seed"] = s.sim.seed;
    sim["tail_tolerance"] = s.sim.tail_tolerance;
    j["sim"] = sim;
    j["outputs"] = s.outputs;
    return j;
}

/// Reads and parses a scenario file. IoError if unreadable, ParameterError on
/// malformed JSON or content.
inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParameterError("scenario " + path + ": " + e.what());
    }
    return parse_scenario(j);
}

// ---------------------------------------------------------------------------
// Number formatting
// ---------------------------------------------------------------------------

/// 17 significant digits, locale-independent; "nan", "inf" and "-inf" for non-finite values.
inline std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 40> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

/// Joins the values of one CSV row.
inline std::string csv_row(const std::vector<double>& values) {
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) line += ',';
        line += format_double(values[i]);
    }
    return line;
}

inline const std::vector<std::string>& value_csv_header() {
    static const std::vector<std::string> header{"x", "Q", "v", "c", "u", "hjb_residual"};
    return header;
}

inline const std::vector<std::string>& sweep_csv_header() {
    static const std::vector<std::string> header{"barrier",      "mean",         "stderr",
                                                 "running",      "continuous_control",
                                                 "jump_control", "initial_control", "tail_bound"};
    return header;
}

inline std::string csv_header(const std::vector<std::string>& columns) {
    std::string line;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i > 0) line += ',';
        line += columns[i];
    }
    return line;
}

// ---------------------------------------------------------------------------
// Result documents
// ---------------------------------------------------------------------------

/**
 * Checks that a result document emitted by the command-line tool has the
 * fields its command promises. Returns an empty string when it conforms,
 * otherwise a description of the first problem.
 */
inline std::string check_result_schema(const json& doc) {
    auto need = [](const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
        for (const char* k : keys) {
            if (!obj.is_object() || !obj.contains(k)) return where + ": missing \"" + k + "\"";
        }
        return std::string{};
    };
    auto numbers = [](const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
        for (const char* k : keys) {
            const json& v = obj.at(k);
            if (!v.is_number() && !v.is_null()) return where + ": \"" + k + "\" must be a number";
        }
        return std::string{};
    };
    std::string err = need(doc, {"schema", "command", "scenario"}, "result");
    if (!err.empty()) return err;
    if (doc.at("schema") != kScenarioSchema) return "result: schema must be 1";
    if (!doc.at("command").is_string()) return "result: command must be a string";
    const auto cmd = doc.at("command").get<std::string>();
    if (cmd == "validate") {
        if (!(err = need(doc, {"passed", "assumption1", "cost_growth", "smoothness_growth", "family"}, cmd)).empty())
            return err;
        if (!doc.at("passed").is_boolean()) return "validate: passed must be a boolean";
        const json& a1 = doc.at("assumption1");
        if (!(err = need(a1, {"passed", "theta", "delta", "phi_plus", "phi_minus"}, "assumption1")).empty()) return err;
        return numbers(a1, {"theta", "delta", "phi_plus", "phi_minus"}, "assumption1");
    }
    if (cmd == "solve") {
        if (!(err = need(doc, {"x_star", "closed_form_x_star", "assumption4"}, cmd)).empty()) return err;
        if (!doc.at("x_star").is_number()) return "solve: x_star must be a number";
        if (!(err = numbers(doc, {"closed_form_x_star"}, cmd)).empty()) return err;
        const json& a4 = doc.at("assumption4");
        if (!(err = need(a4, {"passed", "left_grid_max_Q", "right_grid_monotone", "tolerance"}, "assumption4")).empty())
            return err;
        return {};
    }
    if (cmd == "factors") {
        if (!(err = need(doc, {"delta", "roots", "sup", "inf"}, cmd)).empty()) return err;
        if (!(err = need(doc.at("roots"), {"positive", "negative"}, "roots")).empty()) return err;
        for (const char* side : {"sup", "inf"}) {
            const json& law = doc.at(side);
            if (!(err = need(law, {"atom", "mixture", "first_moment", "second_moment"}, side)).empty()) return err;
            if (!law.at("mixture").is_array()) return std::string(side) + ": mixture must be an array";
            for (const auto& c : law.at("mixture")) {
                if (!(err = need(c, {"weight", "rate"}, side)).empty()) return err;
            }
        }
        return {};
    }
    if (cmd == "certify") {
        if (!(err = need(doc, {"passed", "x_star", "tolerance", "max_abs_residual_left", "min_residual",
                               "max_control_gap", "max_abs_control_gap_right", "grid"},
                         cmd))
                 .empty())
            return err;
        if (!doc.at("passed").is_boolean()) return "certify: passed must be a boolean";
        return numbers(doc, {"x_star", "tolerance", "max_abs_residual_left", "min_residual", "max_control_gap",
                             "max_abs_control_gap_right"},
                       cmd);
    }
    if (cmd == "error") return need(doc, {"error", "exit_code"}, cmd);
    return "result: unknown command \"" + cmd + "\"";
}

}  // namespace lsc
