#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bessim/controller.hpp"
#include "bessim/errors.hpp"
#include "bessim/observers.hpp"
#include "bessim/profile.hpp"
#include "bessim/scenario.hpp"

namespace bessim {

// ---------------------------------------------------------------------------
// Parameter validation against the observer feasibility conditions
// ---------------------------------------------------------------------------

struct ValidationCheck {
    std::string name;
    bool pass = false;
    double margin = 0.0; // attained value minus required bound
    std::string detail;
};

struct ValidationReport {
    bool pass = false;
    std::vector<ValidationCheck> checks;
    SpectralSummary spectrum;
    ProfileBounds bounds;
    std::vector<std::string> warnings;

    const ValidationCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }
};

/// Checks the four feasibility conditions the observer convergence guarantees
/// rest on: the sign gains must dominate the demand rate (alpha) and the
/// state drift (beta), and psi*r must exceed 2 against both graph spectra.
/// Report-only; the simulate entry points refuse to run on failure unless the
/// scenario or caller overrides.
inline ValidationReport validate_parameters(const Scenario& s) {
    ValidationReport rep;
    rep.spectrum = spectral_summary(s.topology);
    rep.bounds = profile_bounds(s.profile, s.horizon);

    const std::size_t n = s.unit_count();
    const double psi = s.power_params.schedule.psi;
    const double r = s.power_params.schedule.r;

    {
        ValidationCheck c;
        c.name = "alpha_vs_rate_bound";
        const double bound = rep.bounds.eps / double(n);
        c.margin = s.power_params.alpha - bound;
        c.pass = s.power_params.alpha >= bound;
        c.detail = "alpha=" + std::to_string(s.power_params.alpha) +
                   " vs eps/N=" + std::to_string(bound);
        if (rep.bounds.has_jumps())
            c.detail += " (profile has jump discontinuities; eps is unbounded)";
        rep.checks.push_back(std::move(c));
    }
    {
        ValidationCheck c;
        c.name = "beta_vs_power_bound";
        if (n == 1) {
            c.pass = true;
            c.margin = std::numeric_limits<double>::infinity();
            c.detail = "single unit: state consensus is trivial";
        } else {
            const double bound =
                rep.bounds.p_high / (std::sqrt(double(n)) * rep.spectrum.lambda2_L);
            c.margin = s.state_params.beta - bound;
            c.pass = s.state_params.beta >= bound;
            c.detail = "beta=" + std::to_string(s.state_params.beta) +
                       " vs P_high/(sqrt(N)*lambda2)=" + std::to_string(bound);
        }
        rep.checks.push_back(std::move(c));
    }
    {
        ValidationCheck c;
        c.name = "psi_r_power_margin";
        const double value = psi * r * rep.spectrum.lambda_min_H;
        c.margin = value - 2.0;
        c.pass = value > 2.0;
        c.detail = "psi*r*lambda_min(H)=" + std::to_string(value) + " vs 2";
        rep.checks.push_back(std::move(c));
    }
    {
        ValidationCheck c;
        c.name = "psi_r_state_margin";
        if (n == 1) {
            c.pass = true;
            c.margin = std::numeric_limits<double>::infinity();
            c.detail = "single unit: state consensus is trivial";
        } else {
            const double value = psi * r * rep.spectrum.lambda2_L * rep.spectrum.lambda2_L;
            c.margin = value - 2.0;
            c.pass = value > 2.0;
            c.detail = "psi*r*lambda2(L)^2=" + std::to_string(value) + " vs 2";
        }
        rep.checks.push_back(std::move(c));
    }

    rep.pass = true;
    for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;

    if (s.horizon <= s.power_params.schedule.tb)
        rep.warnings.push_back("horizon does not extend past tb; nothing to observe after the "
                               "prespecified time");
    return rep;
}

// ---------------------------------------------------------------------------
// Time series and metrics
// ---------------------------------------------------------------------------

struct TimeSeriesRow {
    double t = 0.0;
    Vector soc;   // s_i
    Vector p;     // allocated unit powers, watts
    Vector p_hat; // power-observer estimates, watts
    Vector x_hat; // state-observer estimates, joules
    double p_star = 0.0; // signed total desired power
    double p_sum = 0.0;  // sum of allocated powers
    double v1 = 0.0;     // power-observer Lyapunov diagnostic
    double v2 = 0.0;     // state-observer Lyapunov diagnostic
    int floor_active = 0; // units whose allocation hit the denominator floor

    bool operator==(const TimeSeriesRow&) const = default;
};

struct TimeSeries {
    std::size_t n = 0;
    std::vector<TimeSeriesRow> rows;

    bool operator==(const TimeSeries&) const = default;
};

struct RunMetrics {
    double max_power_obs_err_after_tb = 0.0; // watts
    double max_state_obs_err_after_tb = 0.0; // joules
    double tracking_err_after_tb = 0.0;      // watts
    double soc_spread_initial = 0.0;
    double soc_spread_final = 0.0;
    double max_ratio_drift_after_tb = 0.0;   // pairwise x_i/x_j drift vs t=0
    double power_obs_err_at_tb = 0.0;        // residual at the first sample >= tb
    double state_obs_err_at_tb = 0.0;
    std::optional<double> first_power_obs_within_tol; // earliest sample meeting eps gate
    bool lyapunov_monotone = true;
    int lyapunov_violations = 0;
    std::optional<double> state_bounds_violated_at;
};

/// Everything metric extraction needs beyond the sampled rows themselves.
/// Derived from a Scenario; the CSV report path rebuilds it from the scenario
/// snapshot written next to the time series, so both paths agree exactly.
struct MetricsContext {
    double tb = 0.0;
    Mode mode = Mode::Discharging;
    std::vector<double> unit_energy; // C_i * V_i, joules
    std::optional<StateBounds> state_bounds;
    double power_tolerance = 0.0; // watts; used for first-within-tolerance time
};

inline MetricsContext metrics_context(const Scenario& s) {
    MetricsContext ctx;
    ctx.tb = s.power_params.schedule.tb;
    ctx.mode = s.mode;
    for (const BatteryUnit& u : s.units) ctx.unit_energy.push_back(u.energy_capacity());
    ctx.state_bounds = s.state_bounds;
    ctx.power_tolerance = s.acceptance.eps_power / double(s.unit_count());
    return ctx;
}

namespace detail {

inline double unit_state_from_soc(double energy, double soc, Mode mode) {
    return mode == Mode::Discharging ? energy * soc : energy * (1.0 - soc);
}

/// Count of sample-to-sample increases beyond 10*dt_sample*max|dV/dt|, the
/// discretization allowance for a quantity that should be nonincreasing.
inline int lyapunov_violation_count(const std::vector<double>& v,
                                    const std::vector<double>& t) {
    if (v.size() < 2) return 0;
    double max_rate = 0.0;
    for (std::size_t k = 1; k < v.size(); ++k)
        max_rate = std::max(max_rate, std::abs(v[k] - v[k - 1]) / (t[k] - t[k - 1]));
    int violations = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
        const double tol = 10.0 * (t[k] - t[k - 1]) * max_rate;
        if (v[k] - v[k - 1] > tol) ++violations;
    }
    return violations;
}

} // namespace detail

/// Extracts RunMetrics from sampled rows. Used both by run() and by the CSV
/// report path; the two must stay byte-for-byte consistent.
inline RunMetrics compute_metrics(const TimeSeries& series, const MetricsContext& ctx) {
    RunMetrics m;
    if (series.rows.empty()) return m;
    const std::size_t n = series.n;

    const auto spread = [](const Vector& soc) {
        double lo = soc[0], hi = soc[0];
        for (double s : soc) {
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        return hi - lo;
    };
    m.soc_spread_initial = spread(series.rows.front().soc);
    m.soc_spread_final = spread(series.rows.back().soc);

    // Reference state ratios at t=0 from the true unit states.
    Vector x0(n);
    for (std::size_t i = 0; i < n; ++i)
        x0[i] = detail::unit_state_from_soc(ctx.unit_energy[i], series.rows.front().soc[i],
                                            ctx.mode);

    bool tb_seen = false;
    std::vector<double> v1_series, v2_series, t_series;
    v1_series.reserve(series.rows.size());
    v2_series.reserve(series.rows.size());
    t_series.reserve(series.rows.size());

    for (const TimeSeriesRow& row : series.rows) {
        v1_series.push_back(row.v1);
        v2_series.push_back(row.v2);
        t_series.push_back(row.t);

        Vector x(n);
        double x_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = detail::unit_state_from_soc(ctx.unit_energy[i], row.soc[i], ctx.mode);
            x_sum += x[i];
        }
        const double x_a = x_sum / double(n);
        const double p_a = row.p_star / double(n);

        double power_err = 0.0;
        double state_err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            power_err = std::max(power_err, std::abs(row.p_hat[i] - p_a));
            state_err = std::max(state_err, std::abs(row.x_hat[i] - x_a));
        }
        if (ctx.power_tolerance > 0.0 && !m.first_power_obs_within_tol &&
            power_err <= ctx.power_tolerance)
            m.first_power_obs_within_tol = row.t;

        if (ctx.state_bounds && !m.state_bounds_violated_at) {
            for (std::size_t i = 0; i < n; ++i)
                if (x[i] < ctx.state_bounds->a1 || x[i] > ctx.state_bounds->a2) {
                    m.state_bounds_violated_at = row.t;
                    break;
                }
        }

        if (row.t >= ctx.tb - 1e-9) {
            if (!tb_seen) {
                tb_seen = true;
                m.power_obs_err_at_tb = power_err;
                m.state_obs_err_at_tb = state_err;
            }
            m.max_power_obs_err_after_tb = std::max(m.max_power_obs_err_after_tb, power_err);
            m.max_state_obs_err_after_tb = std::max(m.max_state_obs_err_after_tb, state_err);
            m.tracking_err_after_tb =
                std::max(m.tracking_err_after_tb, std::abs(row.p_sum - row.p_star));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    if (i == j) continue;
                    const double drift = std::abs(x[i] / x[j] - x0[i] / x0[j]);
                    m.max_ratio_drift_after_tb = std::max(m.max_ratio_drift_after_tb, drift);
                }
        }
    }

    m.lyapunov_violations = detail::lyapunov_violation_count(v1_series, t_series) +
                            detail::lyapunov_violation_count(v2_series, t_series);
    m.lyapunov_monotone = m.lyapunov_violations == 0;
    return m;
}

// ---------------------------------------------------------------------------
// Lyapunov diagnostics
// ---------------------------------------------------------------------------

struct LyapunovDiagnostics {
    double v1 = 0.0;
    double v2 = 0.0;
};

/// V1 = (1/2) v' H^{-1} v and V2 = (1/2) |x_hat - x_a*1|^2 where x_a is the
/// true average state. Diagnostics only: the control path never sees x_a.
inline LyapunovDiagnostics lyapunov_diagnostics(std::span<const double> v,
                                                std::span<const double> x_hat,
                                                std::span<const double> x,
                                                const CholeskyFactor& h_factor) {
    LyapunovDiagnostics d;
    const Vector h_inv_v = h_factor.solve(v);
    d.v1 = 0.5 * dot(v, h_inv_v);
    double x_a = 0.0;
    for (double xi : x) x_a += xi;
    x_a /= double(x.size());
    for (std::size_t i = 0; i < x_hat.size(); ++i)
        d.v2 += 0.5 * (x_hat[i] - x_a) * (x_hat[i] - x_a);
    return d;
}

// ---------------------------------------------------------------------------
// The synchronous fixed-step run loop
// ---------------------------------------------------------------------------

struct AbortInfo {
    std::string reason;
    double t = 0.0;
};

struct RunResult {
    TimeSeries series;
    RunMetrics metrics;
    std::optional<AbortInfo> abort;

    bool aborted() const { return abort.has_value(); }
};

/// Runs one scenario to its horizon. Per step, every node reads the previous
/// round's snapshot, the controller allocates from local estimates, and
/// plant + observers advance one explicit-Euler step together. Deterministic:
/// identical scenarios produce bit-identical series. SoC or state-bound
/// violations stop the run and return the partial series with the violation
/// timestamp.
inline RunResult run(const Scenario& scenario) {
    {
        const auto errors = scenario_structural_errors(scenario);
        if (!errors.empty()) {
            std::string what = "run: scenario is not well-formed:";
            for (const auto& e : errors) what += "\n  - " + e;
            throw ValidationError(what);
        }
    }

    const std::size_t n = scenario.unit_count();
    const Topology& topology = scenario.topology;
    const double dt = scenario.dt;
    const double t0 = scenario.power_params.schedule.t0;
    const double sign = double(scenario.controller.reference_sign);
    const long long total_steps = std::llround(scenario.horizon / dt);
    const int stride = scenario.output_stride;

    const CholeskyFactor h_factor(h_matrix(topology));

    std::vector<BatteryUnit> units = scenario.units;
    PowerObserverState power_obs{scenario.initial_p_hat.empty() ? Vector(n, 0.0)
                                                                : scenario.initial_p_hat};
    StateObserverState state_obs{
        scenario.initial_q.empty() ? Vector(n, 0.0) : scenario.initial_q, Vector(n, 0.0)};

    RunResult result;
    result.series.n = n;
    result.series.rows.reserve(std::size_t(total_steps / stride) + 2);
    std::optional<double> bounds_violation_t;

    Vector x(n), xi(n), v(n), p_alloc(n);

    for (long long k = 0; k <= total_steps; ++k) {
        const double t = t0 + double(k) * dt;

        for (std::size_t i = 0; i < n; ++i) x[i] = unit_state(units[i]);
        state_obs.x_hat = state_estimates(state_obs.q, x, topology);
        const Vector& x_hat = state_obs.x_hat;
        const Vector& p_hat = power_obs.p_hat;
        for (std::size_t i = 0; i < n; ++i) xi[i] = state_consensus_signal(i, x_hat, topology);

        const double p_star = sign * desired_power(scenario.profile, t - t0);
        const double p_a = p_star / double(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = power_consensus_signal(
                i, p_hat, topology,
                topology.pinned(i) ? std::optional<double>(p_a) : std::nullopt);

        int floor_count = 0;
        double p_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Allocation a = allocate_power(x[i], x_hat[i], p_hat[i], scenario.controller);
            p_alloc[i] = a.watts;
            p_sum += a.watts;
            if (a.floor_active) ++floor_count;
        }

        if (k % stride == 0 || k == total_steps) {
            const LyapunovDiagnostics lyap = lyapunov_diagnostics(v, x_hat, x, h_factor);
            TimeSeriesRow row;
            row.t = t;
            row.soc.resize(n);
            for (std::size_t i = 0; i < n; ++i) row.soc[i] = units[i].soc;
            row.p = p_alloc;
            row.p_hat = p_hat;
            row.x_hat = x_hat;
            row.p_star = p_star;
            row.p_sum = p_sum;
            row.v1 = lyap.v1;
            row.v2 = lyap.v2;
            row.floor_active = floor_count;
            result.series.rows.push_back(std::move(row));
        }

        if (scenario.state_bounds) {
            for (std::size_t i = 0; i < n; ++i) {
                if (x[i] < scenario.state_bounds->a1 || x[i] > scenario.state_bounds->a2) {
                    bounds_violation_t = t;
                    result.abort = AbortInfo{"unit state left [a1,a2] at unit " +
                                                 std::to_string(i + 1),
                                             t};
                    break;
                }
            }
            if (result.abort) break;
        }

        if (k == total_steps) break;

        try {
            for (std::size_t i = 0; i < n; ++i) {
                power_obs.p_hat[i] +=
                    dt * power_observer_derivative(v[i], t, scenario.power_params);
                state_obs.q[i] +=
                    dt * state_observer_q_derivative(xi[i], t, scenario.state_params);
            }
            for (std::size_t i = 0; i < n; ++i)
                units[i] = soc_step(units[i], p_alloc[i], dt);
        } catch (const SocOutOfRange& e) {
            result.abort = AbortInfo{e.what(), t + dt};
            break;
        }

        bool finite = true;
        for (std::size_t i = 0; i < n; ++i)
            finite = finite && std::isfinite(power_obs.p_hat[i]) && std::isfinite(state_obs.q[i]);
        if (!finite) {
            result.abort = AbortInfo{"observer state became non-finite", t + dt};
            break;
        }
    }

    MetricsContext ctx = metrics_context(scenario);
    result.metrics = compute_metrics(result.series, ctx);
    if (bounds_violation_t && !result.metrics.state_bounds_violated_at)
        result.metrics.state_bounds_violated_at = bounds_violation_t;
    return result;
}

} // namespace bessim
