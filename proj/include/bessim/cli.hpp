#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "bessim/errors.hpp"
#include "bessim/presets.hpp"
#include "bessim/scenario_io.hpp"
#include "bessim/simulation.hpp"
#include "bessim/timeseries_io.hpp"

namespace bessim::cli {

/// A scenario argument is a path when such a file exists, otherwise the name
/// of a bundled preset.
inline std::string load_scenario_document(const std::string& arg) {
    namespace fs = std::filesystem;
    if (fs::exists(arg)) {
        std::ifstream f(arg, std::ios::binary);
        if (!f) throw ParseError("cannot open scenario file " + arg);
        std::ostringstream buf;
        buf << f.rdbuf();
        return buf.str();
    }
    if (const Preset* p = find_preset(arg)) return std::string(p->text);
    throw ParseError("\"" + arg + "\" is neither a scenario file nor a bundled preset");
}

inline Scenario load_scenario(const std::string& arg,
                              std::vector<std::string>* warnings = nullptr) {
    return parse_scenario_text(load_scenario_document(arg), warnings);
}

inline std::string format_validation_report(const ValidationReport& rep) {
    std::ostringstream out;
    out << "spectrum: lambda2(L)=" << rep.spectrum.lambda2_L
        << "  lambda_max(L)=" << rep.spectrum.lambda_max_L
        << "  lambda_min(H)=" << rep.spectrum.lambda_min_H
        << "  lambda_max(H)=" << rep.spectrum.lambda_max_H << "\n";
    out << "profile:  |p*| in [" << rep.bounds.p_low << ", " << rep.bounds.p_high
        << "]  rate bound eps=" << rep.bounds.eps;
    if (rep.bounds.has_jumps()) {
        out << "  (jumps at";
        for (double t : rep.bounds.jump_times) out << " " << t;
        out << ")";
    }
    out << "\n";
    for (const ValidationCheck& c : rep.checks) {
        out << (c.pass ? "  [pass] " : "  [FAIL] ") << std::left << std::setw(22) << c.name
            << " margin " << std::setprecision(10) << c.margin << "  (" << c.detail << ")\n";
    }
    for (const std::string& w : rep.warnings) out << "  [warn] " << w << "\n";
    out << (rep.pass ? "validation: PASS" : "validation: FAIL") << "\n";
    return out.str();
}

namespace detail_cli {

using ordered_json = nlohmann::ordered_json;

inline ordered_json report_json(const ValidationReport& rep, bool overridden) {
    ordered_json v;
    v["pass"] = rep.pass;
    v["overridden"] = overridden;
    ordered_json checks = ordered_json::array();
    for (const ValidationCheck& c : rep.checks) {
        ordered_json jc;
        jc["name"] = c.name;
        jc["pass"] = c.pass;
        jc["margin"] = c.margin;
        jc["detail"] = c.detail;
        checks.push_back(std::move(jc));
    }
    v["checks"] = std::move(checks);
    v["warnings"] = rep.warnings;
    ordered_json spectrum;
    spectrum["lambda2_L"] = rep.spectrum.lambda2_L;
    spectrum["lambda_max_L"] = rep.spectrum.lambda_max_L;
    spectrum["lambda_min_H"] = rep.spectrum.lambda_min_H;
    spectrum["lambda_max_H"] = rep.spectrum.lambda_max_H;
    v["spectrum"] = std::move(spectrum);
    ordered_json b;
    b["p_low"] = rep.bounds.p_low;
    b["p_high"] = rep.bounds.p_high;
    b["eps"] = std::isfinite(rep.bounds.eps) ? ordered_json(rep.bounds.eps)
                                             : ordered_json("inf");
    b["jump_times"] = rep.bounds.jump_times;
    v["profile_bounds"] = std::move(b);
    return v;
}

inline ordered_json metrics_json(const RunMetrics& m) {
    ordered_json j;
    j["max_power_obs_err_after_tb"] = m.max_power_obs_err_after_tb;
    j["max_state_obs_err_after_tb"] = m.max_state_obs_err_after_tb;
    j["tracking_err_after_tb"] = m.tracking_err_after_tb;
    j["power_obs_err_at_tb"] = m.power_obs_err_at_tb;
    j["state_obs_err_at_tb"] = m.state_obs_err_at_tb;
    j["soc_spread_initial"] = m.soc_spread_initial;
    j["soc_spread_final"] = m.soc_spread_final;
    j["max_ratio_drift_after_tb"] = m.max_ratio_drift_after_tb;
    if (m.first_power_obs_within_tol)
        j["first_power_obs_within_tol"] = *m.first_power_obs_within_tol;
    else
        j["first_power_obs_within_tol"] = nullptr;
    j["lyapunov_monotone"] = m.lyapunov_monotone;
    j["lyapunov_violations"] = m.lyapunov_violations;
    if (m.state_bounds_violated_at)
        j["state_bounds_violated_at"] = *m.state_bounds_violated_at;
    else
        j["state_bounds_violated_at"] = nullptr;
    return j;
}

} // namespace detail_cli

/// simulate: validate (unless overridden), run, and write timeseries.csv,
/// scenario.json, summary.json and validation.txt into out_dir.
/// Exit codes: 0 success, 1 validation failure or runtime abort, 2 bad input.
inline int run_simulate(const std::string& scenario_arg, const std::string& out_dir,
                        bool force_override, std::ostream& out, std::ostream& err) {
    namespace fs = std::filesystem;
    Scenario scenario;
    std::vector<std::string> warnings;
    try {
        scenario = load_scenario(scenario_arg, &warnings);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    const ValidationReport rep = validate_parameters(scenario);
    const bool overridden = !rep.pass && (scenario.override_validation || force_override);
    out << format_validation_report(rep);
    for (const std::string& w : warnings) out << "  [warn] " << w << "\n";
    if (!rep.pass && !overridden) {
        err << "error: parameter validation failed; rerun with --override-validation to force\n";
        return 1;
    }
    if (overridden) out << "validation overridden; running anyway\n";

    const RunResult result = run(scenario);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        err << "error: cannot create output directory " << out_dir << ": " << ec.message()
            << "\n";
        return 2;
    }
    const fs::path dir(out_dir);
    write_timeseries_csv((dir / "timeseries.csv").string(), result.series);
    {
        std::ofstream f(dir / "scenario.json", std::ios::binary);
        f << emit_scenario(scenario);
    }
    {
        std::ofstream f(dir / "validation.txt", std::ios::binary);
        f << format_validation_report(rep);
    }
    {
        detail_cli::ordered_json summary;
        summary["name"] = scenario.name;
        summary["aborted"] = result.aborted();
        if (result.abort) {
            detail_cli::ordered_json a;
            a["reason"] = result.abort->reason;
            a["t"] = result.abort->t;
            summary["abort"] = std::move(a);
        } else {
            summary["abort"] = nullptr;
        }
        summary["validation"] = detail_cli::report_json(rep, overridden);
        detail_cli::ordered_json caps;
        caps["power"] = scenario.power_params.schedule.omega_cap;
        caps["state"] = scenario.state_params.schedule.omega_cap;
        summary["omega_caps"] = std::move(caps);
        summary["metrics"] = detail_cli::metrics_json(result.metrics);
        summary["rows"] = result.series.rows.size();
        summary["dt"] = scenario.dt;
        summary["horizon"] = scenario.horizon;
        summary["tb"] = scenario.power_params.schedule.tb;
        std::ofstream f(dir / "summary.json", std::ios::binary);
        f << summary.dump(2) << "\n";
    }

    out << "wrote " << (dir / "timeseries.csv").string() << " (" << result.series.rows.size()
        << " rows)\n";
    out << "residual at tb: power observer " << result.metrics.power_obs_err_at_tb
        << " W, state observer " << result.metrics.state_obs_err_at_tb << " J\n";
    if (result.abort) {
        err << "run aborted at t=" << result.abort->t << ": " << result.abort->reason << "\n";
        return 1;
    }
    return 0;
}

/// validate: print the parameter validation report with numeric margins.
inline int run_validate(const std::string& scenario_arg, std::ostream& out,
                        std::ostream& err) {
    Scenario scenario;
    std::vector<std::string> warnings;
    try {
        scenario = load_scenario(scenario_arg, &warnings);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    const ValidationReport rep = validate_parameters(scenario);
    out << format_validation_report(rep);
    for (const std::string& w : warnings) out << "  [warn] " << w << "\n";
    return rep.pass ? 0 : 1;
}

/// Metric re-derivation used by the report command. Deliberately written
/// against the raw sampled rows, independent of compute_metrics, so the two
/// paths cross-check each other; keep the summation orders in sync or the
/// exact-agreement guarantee degrades to approximate.
inline RunMetrics recompute_metrics(const TimeSeries& series, const MetricsContext& ctx) {
    RunMetrics m;
    if (series.rows.empty()) return m;
    const std::size_t n = series.n;
    const double tb = ctx.tb - 1e-9;

    const auto state_of = [&](const TimeSeriesRow& row, std::size_t i) {
        return ctx.mode == Mode::Discharging ? ctx.unit_energy[i] * row.soc[i]
                                             : ctx.unit_energy[i] * (1.0 - row.soc[i]);
    };

    {
        const TimeSeriesRow& first = series.rows.front();
        const TimeSeriesRow& last = series.rows.back();
        double lo = first.soc[0], hi = first.soc[0];
        for (double v : first.soc) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        m.soc_spread_initial = hi - lo;
        lo = hi = last.soc[0];
        for (double v : last.soc) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        m.soc_spread_final = hi - lo;
    }

    bool tb_seen = false;
    for (const TimeSeriesRow& row : series.rows) {
        double x_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) x_sum += state_of(row, i);
        const double x_a = x_sum / double(n);
        const double p_a = row.p_star / double(n);

        double power_err = 0.0, state_err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            power_err = std::max(power_err, std::abs(row.p_hat[i] - p_a));
            state_err = std::max(state_err, std::abs(row.x_hat[i] - x_a));
        }
        if (ctx.power_tolerance > 0.0 && !m.first_power_obs_within_tol &&
            power_err <= ctx.power_tolerance)
            m.first_power_obs_within_tol = row.t;
        if (ctx.state_bounds && !m.state_bounds_violated_at) {
            for (std::size_t i = 0; i < n; ++i) {
                const double x = state_of(row, i);
                if (x < ctx.state_bounds->a1 || x > ctx.state_bounds->a2) {
                    m.state_bounds_violated_at = row.t;
                    break;
                }
            }
        }
        if (row.t < tb) continue;
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
                const double now = state_of(row, i) / state_of(row, j);
                const double at0 = state_of(series.rows.front(), i) /
                                   state_of(series.rows.front(), j);
                m.max_ratio_drift_after_tb =
                    std::max(m.max_ratio_drift_after_tb, std::abs(now - at0));
            }
    }

    const auto count_upticks = [&](auto&& value_of) {
        double max_rate = 0.0;
        for (std::size_t k = 1; k < series.rows.size(); ++k) {
            const double dv = value_of(series.rows[k]) - value_of(series.rows[k - 1]);
            const double dtime = series.rows[k].t - series.rows[k - 1].t;
            max_rate = std::max(max_rate, std::abs(dv) / dtime);
        }
        int upticks = 0;
        for (std::size_t k = 1; k < series.rows.size(); ++k) {
            const double dv = value_of(series.rows[k]) - value_of(series.rows[k - 1]);
            const double dtime = series.rows[k].t - series.rows[k - 1].t;
            if (dv > 10.0 * dtime * max_rate) ++upticks;
        }
        return upticks;
    };
    m.lyapunov_violations = count_upticks([](const TimeSeriesRow& r) { return r.v1; }) +
                            count_upticks([](const TimeSeriesRow& r) { return r.v2; });
    m.lyapunov_monotone = m.lyapunov_violations == 0;
    return m;
}

/// report: recompute metrics from a timeseries.csv (an independent path from
/// the in-run bookkeeping) and judge them against the scenario thresholds.
/// The scenario defaults to the scenario.json snapshot next to the CSV.
inline int run_report(const std::string& csv_path, std::string scenario_arg, std::ostream& out,
                      std::ostream& err) {
    namespace fs = std::filesystem;
    try {
        if (scenario_arg.empty()) {
            const fs::path sibling = fs::path(csv_path).parent_path() / "scenario.json";
            if (!fs::exists(sibling))
                throw ParseError("no scenario given and " + sibling.string() + " not found");
            scenario_arg = sibling.string();
        }
        const Scenario scenario = load_scenario(scenario_arg);
        const TimeSeries series = read_timeseries_csv(csv_path);
        if (series.n != scenario.unit_count())
            throw MalformedInput("CSV has " + std::to_string(series.n) +
                                 " units but the scenario has " +
                                 std::to_string(scenario.unit_count()));
        const RunMetrics m = recompute_metrics(series, metrics_context(scenario));

        const double eps_power = scenario.acceptance.eps_power;
        const double eps_soc = scenario.acceptance.eps_soc;
        const bool power_ok = m.tracking_err_after_tb <= eps_power;
        const bool soc_ok = m.max_ratio_drift_after_tb <= eps_soc;

        out << "rows: " << series.rows.size() << "  units: " << series.n << "\n";
        out << std::setprecision(10);
        out << "max |p_hat - p*/N| after tb : " << m.max_power_obs_err_after_tb << " W\n";
        out << "max |x_hat - x_a| after tb  : " << m.max_state_obs_err_after_tb << " J\n";
        out << (power_ok ? "[pass] " : "[FAIL] ") << "tracking |sum p - p*| after tb : "
            << m.tracking_err_after_tb << " W  (eps_power " << eps_power << ")\n";
        out << (soc_ok ? "[pass] " : "[FAIL] ") << "state-ratio drift after tb     : "
            << m.max_ratio_drift_after_tb << "  (eps_soc " << eps_soc << ")\n";
        out << "SoC spread: " << m.soc_spread_initial << " -> " << m.soc_spread_final << "\n";
        out << "Lyapunov nonincreasing: " << (m.lyapunov_monotone ? "yes" : "no") << " ("
            << m.lyapunov_violations << " violations)\n";
        if (m.state_bounds_violated_at)
            out << "state bounds violated at t=" << *m.state_bounds_violated_at << "\n";
        return power_ok && soc_ok ? 0 : 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

/// sweep: simulate every *.json scenario under dir concurrently.
inline int run_sweep(const std::string& dir, const std::string& out_root, unsigned jobs,
                     std::ostream& out, std::ostream& err) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        err << "error: " << dir << " is not a directory\n";
        return 2;
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        err << "error: no *.json scenarios under " << dir << "\n";
        return 2;
    }
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());

    struct Job {
        fs::path file;
        int exit_code = 0;
        std::string log;
    };
    std::vector<Job> results(files.size());
    std::size_t next = 0;
    while (next < files.size()) {
        const std::size_t batch = std::min<std::size_t>(jobs, files.size() - next);
        std::vector<std::future<void>> futures;
        for (std::size_t k = 0; k < batch; ++k) {
            Job& job = results[next + k];
            job.file = files[next + k];
            futures.push_back(std::async(std::launch::async, [&job, &out_root] {
                std::ostringstream o, e;
                const std::string dest =
                    (fs::path(out_root) / job.file.stem().string()).string();
                job.exit_code = run_simulate(job.file.string(), dest, false, o, e);
                job.log = e.str();
            }));
        }
        for (auto& f : futures) f.get();
        next += batch;
    }

    int failures = 0;
    for (const Job& job : results) {
        const bool ok = job.exit_code == 0;
        failures += ok ? 0 : 1;
        out << (ok ? "[pass] " : "[FAIL] ") << job.file.filename().string();
        if (!ok) out << " (exit " << job.exit_code << ") " << job.log;
        out << "\n";
    }
    out << (files.size() - std::size_t(failures)) << "/" << files.size() << " scenarios ok\n";
    return failures == 0 ? 0 : 1;
}

} // namespace bessim::cli
