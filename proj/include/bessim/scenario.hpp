#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bessim/battery.hpp"
#include "bessim/controller.hpp"
#include "bessim/errors.hpp"
#include "bessim/graph.hpp"
#include "bessim/observers.hpp"
#include "bessim/profile.hpp"

namespace bessim {

/// Pass/fail thresholds a finished run is judged against: eps_soc bounds the
/// drift of pairwise unit-state ratios (dimensionless), eps_power bounds the
/// total-power tracking error after tb (watts).
struct AcceptanceThresholds {
    double eps_soc = 1e-4;
    double eps_power = 84.0;

    bool operator==(const AcceptanceThresholds&) const = default;
};

/// A fully resolved simulation scenario. Construction helpers leave derived
/// quantities (gain caps, sign layers, denominator floor) negative, meaning
/// "derive from the scenario"; resolve_scenario_defaults fills them in.
struct Scenario {
    std::string name = "scenario";
    Mode mode = Mode::Discharging;
    std::vector<BatteryUnit> units;
    Topology topology;
    PowerObserverParams power_params;
    StateObserverParams state_params;
    ControllerConfig controller{-1.0, +1};
    PowerProfile profile;
    double dt = 1e-4;          // seconds
    double horizon = 20.0;     // seconds
    int output_stride = 10;    // steps per sampled row
    std::optional<StateBounds> state_bounds;
    AcceptanceThresholds acceptance;
    Vector initial_p_hat; // empty = zeros
    Vector initial_q;     // empty = zeros
    bool override_validation = false;

    std::size_t unit_count() const { return units.size(); }

    bool operator==(const Scenario&) const = default;
};

/// Largest stable omega clamp for an explicit-Euler step of a consensus flow
/// whose stiffest mode has the given spectral gain.
inline double derive_omega_cap(const GainSchedule& g, double dt, double spectral_gain) {
    if (spectral_gain <= 0.0) return 1.0;
    return std::max(1.0, g.span() / (g.psi * g.r * dt * spectral_gain));
}

/// Fills every derived default in place:
///  - omega caps from dt and the graph spectrum (power observer: lambda_max(H);
///    state observer: lambda_max(L)^2, the stiffness of the L*L estimate flow),
///  - sign-layer half-widths at 1e-6 of the typical signal scale,
///  - denominator floor at the state lower bound a1 (or 5% of the smallest
///    unit energy when no bounds are configured),
///  - the controller reference sign from the scenario mode,
///  - zero initial observer states when none are given.
/// Explicitly set values (>= 0 for layers, > 0 for caps/floor) are kept.
inline void resolve_scenario_defaults(Scenario& s) {
    const std::size_t n = s.unit_count();
    s.controller.reference_sign = s.mode == Mode::Discharging ? +1 : -1;
    for (BatteryUnit& u : s.units) u.mode = s.mode;

    const SpectralSummary spectrum = spectral_summary(s.topology);
    if (s.power_params.schedule.omega_cap <= 0.0)
        s.power_params.schedule.omega_cap =
            derive_omega_cap(s.power_params.schedule, s.dt, spectrum.lambda_max_H);
    if (s.state_params.schedule.omega_cap <= 0.0)
        s.state_params.schedule.omega_cap = derive_omega_cap(
            s.state_params.schedule, s.dt, spectrum.lambda_max_L * spectrum.lambda_max_L);

    const ProfileBounds bounds = profile_bounds(s.profile, s.horizon);
    if (s.power_params.sign_layer < 0.0)
        s.power_params.sign_layer = 1e-6 * bounds.p_high / double(n);

    double max_energy = 0.0;
    double min_energy = std::numeric_limits<double>::infinity();
    for (const BatteryUnit& u : s.units) {
        max_energy = std::max(max_energy, u.energy_capacity());
        min_energy = std::min(min_energy, u.energy_capacity());
    }
    const double a2_scale = s.state_bounds ? s.state_bounds->a2 : 0.95 * max_energy;
    if (s.state_params.sign_layer < 0.0) s.state_params.sign_layer = 1e-6 * a2_scale;

    if (s.controller.denominator_floor <= 0.0)
        s.controller.denominator_floor =
            s.state_bounds ? s.state_bounds->a1 : 0.05 * min_energy;

    if (s.initial_p_hat.empty()) s.initial_p_hat.assign(n, 0.0);
    if (s.initial_q.empty()) s.initial_q.assign(n, 0.0);
}

/// Structural sanity of a scenario (sizes, positivity, profile coverage).
/// Returns every violation found; empty means well-formed. Distinct from the
/// observer gain-bound validation, which lives in simulation.hpp.
inline std::vector<std::string> scenario_structural_errors(const Scenario& s) {
    std::vector<std::string> errors;
    const std::size_t n = s.unit_count();
    if (n == 0) errors.push_back("scenario has no units");
    if (!s.topology.valid())
        errors.push_back("scenario has no topology");
    else if (s.topology.size() != n)
        errors.push_back("unit count " + std::to_string(n) + " does not match topology size " +
                         std::to_string(s.topology.size()));
    for (std::size_t i = 0; i < n; ++i) {
        const BatteryUnit& u = s.units[i];
        if (!(u.capacity_coulombs > 0.0))
            errors.push_back("unit " + std::to_string(i + 1) + ": capacity must be positive");
        if (!(u.voltage > 0.0))
            errors.push_back("unit " + std::to_string(i + 1) + ": voltage must be positive");
        if (!(u.soc >= 0.0 && u.soc <= 1.0))
            errors.push_back("unit " + std::to_string(i + 1) + ": soc " + std::to_string(u.soc) +
                             " outside [0,1]");
    }
    if (!(s.dt > 0.0)) errors.push_back("dt must be positive");
    if (!(s.horizon > 0.0)) errors.push_back("horizon must be positive");
    if (s.output_stride < 1) errors.push_back("output_stride must be >= 1");
    const GainSchedule& gp = s.power_params.schedule;
    const GainSchedule& gs = s.state_params.schedule;
    if (!(gp.tb > gp.t0)) errors.push_back("observers: tb must exceed t0");
    if (!(gp.psi > 0.0)) errors.push_back("observers: psi must be positive");
    if (!(gp.r > 0.0)) errors.push_back("observers: r must be positive");
    if (!(s.power_params.alpha >= 0.0)) errors.push_back("observers: alpha must be nonnegative");
    if (!(s.state_params.beta >= 0.0)) errors.push_back("observers: beta must be nonnegative");
    if (gs.t0 != gp.t0 || gs.tb != gp.tb || gs.psi != gp.psi || gs.r != gp.r)
        errors.push_back("observers: power and state schedules must share t0, tb, psi, r");
    if (s.power_params.sign_layer < 0.0 || s.state_params.sign_layer < 0.0)
        errors.push_back("observers: sign layers must be resolved and nonnegative");
    if (s.state_bounds && !(s.state_bounds->a1 > 0.0 && s.state_bounds->a1 < s.state_bounds->a2))
        errors.push_back("state_bounds: need 0 < a1 < a2");
    if (!s.initial_p_hat.empty() && s.initial_p_hat.size() != n)
        errors.push_back("initial p_hat has wrong length");
    if (!s.initial_q.empty() && s.initial_q.size() != n)
        errors.push_back("initial q has wrong length");
    if (!(s.acceptance.eps_soc >= 0.0) || !(s.acceptance.eps_power >= 0.0))
        errors.push_back("acceptance thresholds must be nonnegative");
    // The profile must cover the horizon.
    if ((s.profile.kind == ProfileKind::Case2Piecewise ||
         s.profile.kind == ProfileKind::PiecewiseCustom)) {
        try {
            validate_segments(s.profile.segments);
            if (!s.profile.replay && !s.profile.hold_after_end &&
                s.horizon > s.profile.pattern_end())
                errors.push_back("profile ends at " + std::to_string(s.profile.pattern_end()) +
                                 " before the horizon and hold_after_end is off");
        } catch (const Error& e) {
            errors.push_back(e.what());
        }
    }
    return errors;
}

} // namespace bessim
