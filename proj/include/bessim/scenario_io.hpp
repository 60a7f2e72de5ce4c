#pragma once

#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bessim/errors.hpp"
#include "bessim/scenario.hpp"

namespace bessim {

namespace detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

/// Rejects unknown keys, suggesting the closest allowed key. Typos in
/// observer parameters would otherwise silently fall back to defaults and
/// fake a convergence failure.
inline void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                       const std::string& where) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed) known = known || item.key() == k;
        if (known) continue;
        // Suggest within 3 edits, or on prefix containment ("alpha_gain" ->
        // "alpha"); prefer the longer containment match.
        std::string best;
        std::size_t best_score = 0;
        for (const char* k : allowed) {
            const std::string key(k);
            std::size_t score = 0;
            if (item.key().starts_with(key) || key.starts_with(item.key()))
                score = 100 + key.size();
            else if (const std::size_t d = edit_distance(item.key(), key); d <= 3)
                score = 10 - d;
            if (score > best_score) {
                best_score = score;
                best = key;
            }
        }
        std::string msg = where + ": unknown key \"" + item.key() + "\"";
        if (!best.empty()) msg += " (did you mean \"" + best + "\"?)";
        throw ParseError(msg);
    }
}

inline const json& require(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + ": missing required key \"" + key + "\"");
    return *it;
}

inline double require_number(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number()) throw ParseError(where + "." + key + ": expected a number");
    return v.get<double>();
}

inline double optional_number(const json& obj, const char* key, double fallback,
                              const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number()) throw ParseError(where + "." + key + ": expected a number");
    return it->get<double>();
}

inline bool optional_bool(const json& obj, const char* key, bool fallback,
                          const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_boolean()) throw ParseError(where + "." + key + ": expected true/false");
    return it->get<bool>();
}

inline std::string require_string(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_string()) throw ParseError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

inline Vector optional_vector(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) return {};
    if (!it->is_array()) throw ParseError(where + "." + key + ": expected an array of numbers");
    Vector out;
    for (const json& v : *it) {
        if (!v.is_number()) throw ParseError(where + "." + key + ": expected numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline Segment parse_segment(const json& j, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    check_keys(j, {"t_start", "t_end", "shape", "value", "intercept", "slope", "offset",
                   "amplitude", "omega", "phase"},
               where);
    Segment s;
    s.t_start = require_number(j, "t_start", where);
    s.t_end = require_number(j, "t_end", where);
    const std::string shape = require_string(j, "shape", where);
    if (shape == "constant") {
        s.shape = Segment::Shape::Constant;
        s.value = require_number(j, "value", where);
    } else if (shape == "linear") {
        s.shape = Segment::Shape::Linear;
        s.intercept = require_number(j, "intercept", where);
        s.slope = require_number(j, "slope", where);
    } else if (shape == "sinusoid") {
        s.shape = Segment::Shape::Sinusoid;
        s.offset = require_number(j, "offset", where);
        s.amplitude = require_number(j, "amplitude", where);
        s.omega = require_number(j, "omega", where);
        s.phase = optional_number(j, "phase", 0.0, where);
    } else {
        throw ParseError(where + ".shape: expected \"constant\", \"linear\" or \"sinusoid\"");
    }
    return s;
}

inline PowerProfile parse_profile(const json& j, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    check_keys(j, {"kind", "amplitude", "offset", "omega", "watts", "segments", "replay",
                   "hold_after_end"},
               where);
    const std::string kind = require_string(j, "kind", where);
    if (kind == "case1_sinusoid") {
        return case1_sinusoid(optional_number(j, "amplitude", 4200.0, where),
                              optional_number(j, "offset", 4200.0, where),
                              optional_number(j, "omega", 1.0, where));
    }
    if (kind == "constant") {
        return constant_profile(require_number(j, "watts", where));
    }
    if (kind == "case2_piecewise") {
        return case2_piecewise(optional_bool(j, "replay", false, where),
                               optional_bool(j, "hold_after_end", true, where));
    }
    if (kind == "piecewise") {
        const json& seg = require(j, "segments", where);
        if (!seg.is_array() || seg.empty())
            throw ParseError(where + ".segments: expected a non-empty array");
        std::vector<Segment> segments;
        for (std::size_t k = 0; k < seg.size(); ++k)
            segments.push_back(
                parse_segment(seg[k], where + ".segments[" + std::to_string(k) + "]"));
        try {
            return piecewise_custom(std::move(segments),
                                    optional_bool(j, "replay", false, where),
                                    optional_bool(j, "hold_after_end", true, where));
        } catch (const Error& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    throw ParseError(where + ".kind: unknown profile kind \"" + kind + "\"");
}

inline ordered_json emit_profile(const PowerProfile& p) {
    ordered_json j;
    j["kind"] = to_string(p.kind);
    switch (p.kind) {
        case ProfileKind::Case1Sinusoid:
            j["amplitude"] = p.amplitude;
            j["offset"] = p.offset;
            j["omega"] = p.omega;
            break;
        case ProfileKind::Constant:
            j["watts"] = p.offset;
            break;
        case ProfileKind::Case2Piecewise:
            j["replay"] = p.replay;
            j["hold_after_end"] = p.hold_after_end;
            break;
        case ProfileKind::PiecewiseCustom: {
            ordered_json segs = ordered_json::array();
            for (const Segment& s : p.segments) {
                ordered_json js;
                js["t_start"] = s.t_start;
                js["t_end"] = s.t_end;
                switch (s.shape) {
                    case Segment::Shape::Constant:
                        js["shape"] = "constant";
                        js["value"] = s.value;
                        break;
                    case Segment::Shape::Linear:
                        js["shape"] = "linear";
                        js["intercept"] = s.intercept;
                        js["slope"] = s.slope;
                        break;
                    case Segment::Shape::Sinusoid:
                        js["shape"] = "sinusoid";
                        js["offset"] = s.offset;
                        js["amplitude"] = s.amplitude;
                        js["omega"] = s.omega;
                        js["phase"] = s.phase;
                        break;
                }
                segs.push_back(std::move(js));
            }
            j["segments"] = std::move(segs);
            j["replay"] = p.replay;
            j["hold_after_end"] = p.hold_after_end;
            break;
        }
    }
    return j;
}

} // namespace detail

/// Parses a scenario document (JSON, // comments allowed). Structural
/// problems raise ParseError naming the offending field; semantic violations
/// are collected and raised together as one ValidationError. Warnings, when
/// requested, receive non-fatal advisories.
inline Scenario parse_scenario_text(const std::string& text,
                                    std::vector<std::string>* warnings = nullptr) {
    using detail::json;
    json doc;
    try {
        doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("scenario: top level must be an object");
    detail::check_keys(doc,
                       {"name", "mode", "units", "topology", "observers", "controller",
                        "profile", "integration", "state_bounds", "acceptance", "initial",
                        "override_validation"},
                       "scenario");

    Scenario s;
    std::vector<std::string> problems;

    if (doc.contains("name")) s.name = detail::require_string(doc, "name", "scenario");

    const std::string mode = detail::require_string(doc, "mode", "scenario");
    if (mode == "discharging")
        s.mode = Mode::Discharging;
    else if (mode == "charging")
        s.mode = Mode::Charging;
    else
        throw ParseError("scenario.mode: expected \"discharging\" or \"charging\"");

    // Units.
    const json& units = detail::require(doc, "units", "scenario");
    if (!units.is_array() || units.empty())
        throw ParseError("scenario.units: expected a non-empty array");
    for (std::size_t i = 0; i < units.size(); ++i) {
        const std::string where = "units[" + std::to_string(i) + "]";
        if (!units[i].is_object()) throw ParseError(where + ": expected an object");
        detail::check_keys(units[i], {"capacity_ah", "voltage_v", "soc"}, where);
        const double cap = detail::require_number(units[i], "capacity_ah", where);
        const double volt = detail::require_number(units[i], "voltage_v", where);
        const double soc = detail::require_number(units[i], "soc", where);
        try {
            s.units.push_back(unit_from_config(cap, volt, soc, s.mode));
        } catch (const Error& e) {
            problems.push_back("unit " + std::to_string(i + 1) + ": " + e.what());
        }
    }

    // Topology.
    {
        const json& topo = detail::require(doc, "topology", "scenario");
        if (!topo.is_object()) throw ParseError("scenario.topology: expected an object");
        detail::check_keys(topo, {"edges", "access"}, "topology");
        const json& edges = detail::require(topo, "edges", "topology");
        if (!edges.is_array()) throw ParseError("topology.edges: expected an array of pairs");
        std::vector<std::pair<int, int>> edge_list;
        for (const json& e : edges) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
                !e[1].is_number_integer())
                throw ParseError("topology.edges: each edge must be a pair of unit ids");
            edge_list.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
        const json& access = detail::require(topo, "access", "topology");
        if (!access.is_array())
            throw ParseError("topology.access: expected an array of 0/1 flags");
        std::vector<int> flags;
        for (const json& f : access) {
            if (!f.is_number_integer())
                throw ParseError("topology.access: expected integer flags");
            flags.push_back(f.get<int>());
        }
        try {
            s.topology = build_topology(units.size(), edge_list, flags);
        } catch (const Error& e) {
            problems.push_back(std::string("topology: ") + e.what());
        }
    }

    // Observers.
    {
        const json& obs = detail::require(doc, "observers", "scenario");
        if (!obs.is_object()) throw ParseError("scenario.observers: expected an object");
        detail::check_keys(obs,
                           {"alpha", "beta", "psi", "r", "t0", "tb", "sign_layer_power",
                            "sign_layer_state", "omega_cap", "omega_cap_power",
                            "omega_cap_state"},
                           "observers");
        GainSchedule g;
        g.t0 = detail::optional_number(obs, "t0", 0.0, "observers");
        g.tb = detail::require_number(obs, "tb", "observers");
        g.psi = detail::require_number(obs, "psi", "observers");
        g.r = detail::require_number(obs, "r", "observers");
        const double cap_both = detail::optional_number(obs, "omega_cap", -1.0, "observers");
        s.power_params.schedule = g;
        s.state_params.schedule = g;
        s.power_params.schedule.omega_cap =
            detail::optional_number(obs, "omega_cap_power", cap_both, "observers");
        s.state_params.schedule.omega_cap =
            detail::optional_number(obs, "omega_cap_state", cap_both, "observers");
        s.power_params.alpha = detail::require_number(obs, "alpha", "observers");
        s.state_params.beta = detail::require_number(obs, "beta", "observers");
        s.power_params.sign_layer =
            detail::optional_number(obs, "sign_layer_power", -1.0, "observers");
        s.state_params.sign_layer =
            detail::optional_number(obs, "sign_layer_state", -1.0, "observers");
    }

    // Controller.
    s.controller.denominator_floor = -1.0;
    if (doc.contains("controller")) {
        const json& ctl = doc["controller"];
        if (!ctl.is_object()) throw ParseError("scenario.controller: expected an object");
        detail::check_keys(ctl, {"denominator_floor"}, "controller");
        s.controller.denominator_floor =
            detail::optional_number(ctl, "denominator_floor", -1.0, "controller");
    }

    s.profile = detail::parse_profile(detail::require(doc, "profile", "scenario"), "profile");

    // Integration.
    {
        const json& integ = detail::require(doc, "integration", "scenario");
        if (!integ.is_object()) throw ParseError("scenario.integration: expected an object");
        detail::check_keys(integ, {"dt", "horizon", "output_stride"}, "integration");
        s.dt = detail::require_number(integ, "dt", "integration");
        s.horizon = detail::require_number(integ, "horizon", "integration");
        s.output_stride = int(detail::optional_number(integ, "output_stride", 1.0, "integration"));
    }

    if (doc.contains("state_bounds")) {
        const json& sb = doc["state_bounds"];
        if (!sb.is_object()) throw ParseError("scenario.state_bounds: expected an object");
        detail::check_keys(sb, {"a1_joules", "a2_joules"}, "state_bounds");
        double max_energy = 0.0, min_energy = std::numeric_limits<double>::infinity();
        for (const BatteryUnit& u : s.units) {
            max_energy = std::max(max_energy, u.energy_capacity());
            min_energy = std::min(min_energy, u.energy_capacity());
        }
        StateBounds b;
        b.a1 = detail::optional_number(sb, "a1_joules", 0.05 * min_energy, "state_bounds");
        b.a2 = detail::optional_number(sb, "a2_joules", 0.95 * max_energy, "state_bounds");
        s.state_bounds = b;
    }

    {
        const json& acc = detail::require(doc, "acceptance", "scenario");
        if (!acc.is_object()) throw ParseError("scenario.acceptance: expected an object");
        detail::check_keys(acc, {"eps_soc", "eps_power"}, "acceptance");
        s.acceptance.eps_soc = detail::require_number(acc, "eps_soc", "acceptance");
        s.acceptance.eps_power = detail::require_number(acc, "eps_power", "acceptance");
    }

    if (doc.contains("initial")) {
        const json& init = doc["initial"];
        if (!init.is_object()) throw ParseError("scenario.initial: expected an object");
        detail::check_keys(init, {"p_hat", "q"}, "initial");
        s.initial_p_hat = detail::optional_vector(init, "p_hat", "initial");
        s.initial_q = detail::optional_vector(init, "q", "initial");
    }

    s.override_validation = detail::optional_bool(doc, "override_validation", false, "scenario");

    if (!problems.empty()) {
        std::string what = "scenario is invalid:";
        for (const auto& p : problems) what += "\n  - " + p;
        throw ValidationError(what);
    }

    resolve_scenario_defaults(s);

    const auto structural = scenario_structural_errors(s);
    if (!structural.empty()) {
        std::string what = "scenario is invalid:";
        for (const auto& p : structural) what += "\n  - " + p;
        throw ValidationError(what);
    }

    if (warnings) {
        if (s.horizon <= s.power_params.schedule.tb)
            warnings->push_back("horizon " + std::to_string(s.horizon) +
                                " does not extend past tb=" +
                                std::to_string(s.power_params.schedule.tb));
    }
    return s;
}

inline Scenario parse_scenario(const std::string& path,
                               std::vector<std::string>* warnings = nullptr) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open scenario file " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_scenario_text(buf.str(), warnings);
}

/// Serializes a resolved scenario. parse(emit(s)) == s for every valid s:
/// derived defaults are written as their concrete values.
inline std::string emit_scenario(const Scenario& s) {
    using detail::ordered_json;
    ordered_json doc;
    doc["name"] = s.name;
    doc["mode"] = to_string(s.mode);

    ordered_json units = ordered_json::array();
    for (const BatteryUnit& u : s.units) {
        ordered_json ju;
        ju["capacity_ah"] = u.capacity_coulombs / 3600.0;
        ju["voltage_v"] = u.voltage;
        ju["soc"] = u.soc;
        units.push_back(std::move(ju));
    }
    doc["units"] = std::move(units);

    ordered_json topo;
    ordered_json edges = ordered_json::array();
    for (const auto& [a, b] : s.topology.edges()) edges.push_back(ordered_json::array({a, b}));
    topo["edges"] = std::move(edges);
    topo["access"] = s.topology.access_flags();
    doc["topology"] = std::move(topo);

    ordered_json obs;
    obs["alpha"] = s.power_params.alpha;
    obs["beta"] = s.state_params.beta;
    obs["psi"] = s.power_params.schedule.psi;
    obs["r"] = s.power_params.schedule.r;
    obs["t0"] = s.power_params.schedule.t0;
    obs["tb"] = s.power_params.schedule.tb;
    obs["sign_layer_power"] = s.power_params.sign_layer;
    obs["sign_layer_state"] = s.state_params.sign_layer;
    obs["omega_cap_power"] = s.power_params.schedule.omega_cap;
    obs["omega_cap_state"] = s.state_params.schedule.omega_cap;
    doc["observers"] = std::move(obs);

    ordered_json ctl;
    ctl["denominator_floor"] = s.controller.denominator_floor;
    doc["controller"] = std::move(ctl);

    doc["profile"] = detail::emit_profile(s.profile);

    ordered_json integ;
    integ["dt"] = s.dt;
    integ["horizon"] = s.horizon;
    integ["output_stride"] = s.output_stride;
    doc["integration"] = std::move(integ);

    if (s.state_bounds) {
        ordered_json sb;
        sb["a1_joules"] = s.state_bounds->a1;
        sb["a2_joules"] = s.state_bounds->a2;
        doc["state_bounds"] = std::move(sb);
    }

    ordered_json acc;
    acc["eps_soc"] = s.acceptance.eps_soc;
    acc["eps_power"] = s.acceptance.eps_power;
    doc["acceptance"] = std::move(acc);

    ordered_json init;
    init["p_hat"] = s.initial_p_hat;
    init["q"] = s.initial_q;
    doc["initial"] = std::move(init);

    doc["override_validation"] = s.override_validation;
    return doc.dump(2) + "\n";
}

} // namespace bessim
