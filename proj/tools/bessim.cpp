// Command-line front end: scenario validation, simulation, report
// recomputation, and directory sweeps.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bessim/cli.hpp"
#include "bessim/presets.hpp"

int main(int argc, char** argv) {
    CLI::App app{"bessim - distributed SoC balancing and power tracking simulator"};
    app.require_subcommand(1);

    std::string scenario_arg;
    std::string out_dir = "out";
    bool override_validation = false;
    auto* simulate = app.add_subcommand("simulate", "run a scenario and write its outputs");
    simulate->add_option("scenario", scenario_arg, "scenario file or bundled preset name")
        ->required();
    simulate->add_option("--out", out_dir, "output directory (default: out)");
    simulate->add_flag("--override-validation", override_validation,
                       "run even when parameter validation fails");

    std::string validate_arg;
    auto* validate = app.add_subcommand("validate", "check observer parameter bounds");
    validate->add_option("scenario", validate_arg, "scenario file or bundled preset name")
        ->required();

    std::string csv_path;
    std::string report_scenario;
    auto* report = app.add_subcommand("report", "recompute metrics from a timeseries.csv");
    report->add_option("csv", csv_path, "timeseries.csv produced by simulate")->required();
    report->add_option("--scenario", report_scenario,
                       "scenario file or preset (default: scenario.json next to the CSV)");

    std::string sweep_dir;
    std::string sweep_out = "sweep_out";
    unsigned jobs = 0;
    auto* sweep = app.add_subcommand("sweep", "simulate every *.json scenario in a directory");
    sweep->add_option("dir", sweep_dir, "directory of scenario files")->required();
    sweep->add_option("--out", sweep_out, "output root (default: sweep_out)");
    sweep->add_option("--jobs", jobs, "concurrent runs (default: hardware threads)");

    std::string dump_dir;
    auto* presets = app.add_subcommand("presets", "list the bundled presets");
    presets->add_option("--dump", dump_dir, "write every preset to <dir>/<name>.json");

    CLI11_PARSE(app, argc, argv);

    if (simulate->parsed())
        return bessim::cli::run_simulate(scenario_arg, out_dir, override_validation, std::cout,
                                         std::cerr);
    if (validate->parsed()) return bessim::cli::run_validate(validate_arg, std::cout, std::cerr);
    if (report->parsed())
        return bessim::cli::run_report(csv_path, report_scenario, std::cout, std::cerr);
    if (sweep->parsed())
        return bessim::cli::run_sweep(sweep_dir, sweep_out, jobs, std::cout, std::cerr);
    if (presets->parsed()) {
        if (!dump_dir.empty()) {
            std::filesystem::create_directories(dump_dir);
            for (const bessim::Preset& p : bessim::presets()) {
                const auto path = std::filesystem::path(dump_dir) / (std::string(p.name) + ".json");
                std::ofstream f(path, std::ios::binary);
                std::string_view text = p.text;
                if (!text.empty() && text.front() == '\n') text.remove_prefix(1);
                f << text;
                std::cout << "wrote " << path.string() << "\n";
            }
            return 0;
        }
        for (const bessim::Preset& p : bessim::presets())
            std::cout << p.name << "\n    " << p.description << "\n";
        return 0;
    }
    return 0;
}
