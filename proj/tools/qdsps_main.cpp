// Copyright 2026 The qdsps Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// qdsps: command-line front end.
//
//   qdsps simulate   --config run.ini --out results/
//   qdsps curves     --config run.ini --out results/ --jobs 4
//   qdsps powerscan | map | polar | budget | calibrate   (same flags)
//   qdsps plot --input results/map.csv --x tau_ps --y delta_lambda_nm --z g2 --output map_g2.svg
//
// Exit codes: 0 success, 1 configuration or input error, 2 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qdsps/config.hpp"
#include "qdsps/csv.hpp"
#include "qdsps/efficiency.hpp"
#include "qdsps/errors.hpp"
#include "qdsps/experiment.hpp"
#include "qdsps/photon_stats.hpp"
#include "qdsps/polarization.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using namespace qdsps;

namespace {

struct Common {
    std::string config_path;
    std::string out_dir = ".";
    unsigned jobs = 1;
    std::string format = "csv";
    bool calibrate = false;
};

struct Run {
    Config config;
    RunManifest manifest;
    fs::path out;
};

std::ofstream open_output(const fs::path& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot write " + path.string());
    return file;
}

Run start(const Common& common, const std::string& command) {
    Run run;
    if (!common.config_path.empty()) run.config = load_config(common.config_path);
    run.out = common.out_dir;
    fs::create_directories(run.out);
    run.manifest.command = command;
    run.manifest.config_path = common.config_path.empty() ? "(defaults)" : common.config_path;
    if (common.calibrate) {
        const auto record = calibrate_bath(run.config.calibration.target_ratio, run.config);
        run.config.bath = record.bath;
        run.manifest.calibration = record;
    }
    run.manifest.config_hash = config_hash(run.config);
    run.manifest.bath = run.config.bath;
    return run;
}

void finish(Run& run) {
    auto file = open_output(run.out / "run_manifest.txt");
    write_manifest(file, run.manifest);
}

void write_table(Run& run, const std::string& name, const SweepResult& table) {
    auto file = open_output(run.out / name);
    write_sweep_csv(file, table);
    run.manifest.outputs.push_back(name);
}

void add_common(CLI::App* sub, Common& common, bool with_calibrate) {
    sub->add_option("--config", common.config_path, "INI configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", common.out_dir, "Output directory");
    sub->add_option("--jobs", common.jobs, "Worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv"}));
    if (with_calibrate) {
        sub->add_flag("--calibrate", common.calibrate, "Calibrate the phonon coupling before running");
    }
}

int cmd_simulate(const Common& common, std::optional<double> area_pi, bool correlations) {
    Run run = start(common, "simulate");
    const SourceModel model = make_source_model(run.config);
    const auto scheme = laser_scheme(run.config);
    const double area = area_pi.value_or(run.config.laser.area_pi) * constants::pi;
    const auto drive = make_drive(model, scheme, area);
    EvolveOptions options = model.evolve;
    if (model.qd.gamma > 0.0) options.t_end = drive.envelope.end() + model.tail_lifetimes / model.qd.gamma;
    const auto trajectory = evolve(drive, model.qd, model.bath, ground_state(model.levels), options);
    {
        auto file = open_output(run.out / "trajectory.csv");
        write_trajectory_csv(file, trajectory);
        run.manifest.outputs.push_back("trajectory.csv");
    }
    {
        auto file = open_output(run.out / "envelope.csv");
        write_envelope_csv(file, drive.envelope);
        run.manifest.outputs.push_back("envelope.csv");
    }
    const auto pulse = emission_point(model, scheme, area);
    {
        auto file = open_output(run.out / "summary.txt");
        file << "area_pi=" << format_number(area / constants::pi) << '\n'
             << "occupation_at_pulse_end=" << format_number(occupation_after_pulse(model, scheme, area)) << '\n'
             << "occupation_at_end=" << format_number(occupation_at_end(trajectory)) << '\n'
             << "emitted_photons=" << format_number(pulse.photons) << '\n'
             << "steps=" << trajectory.stats.steps << '\n'
             << "rejected=" << trajectory.stats.rejected << '\n'
             << "rhs_evaluations=" << trajectory.stats.rhs_evaluations << '\n';
        run.manifest.outputs.push_back("summary.txt");
    }
    if (correlations) {
        const auto options_c = correlation_options(run.config, common.jobs);
        const auto grid = compute_correlations(make_context(model, scheme, area, options_c));
        {
            auto file = open_output(run.out / "correlation.csv");
            write_correlation_csv(file, grid);
            run.manifest.outputs.push_back("correlation.csv");
        }
        SourceFigures figures;
        figures.photons = grid.photon_number();
        figures.purity = purity_from_grid(grid, options_c.etalon);
        figures.indistinguishability = indistinguishability_from_grid(grid, options_c.etalon);
        auto file = open_output(run.out / "statistics.txt");
        write_statistics_report(file, figures);
        run.manifest.outputs.push_back("statistics.txt");
    }
    std::cerr << "simulate: emitted photons " << format_number(pulse.photons, 6) << ", steps "
              << trajectory.stats.steps << ", rejected " << trajectory.stats.rejected << '\n';
    finish(run);
    return 0;
}

int cmd_curves(const Common& common) {
    Run run = start(common, "curves");
    write_table(run, "curves.csv", run_excitation_curves(run.config, common.jobs));
    finish(run);
    return 0;
}

int cmd_powerscan(const Common& common) {
    Run run = start(common, "powerscan");
    write_table(run, "powerscan.csv", run_power_scan(run.config, common.jobs));
    finish(run);
    return 0;
}

int cmd_map(const Common& common) {
    Run run = start(common, "map");
    const auto result = run_fom_map(run.config.map, run.config, common.jobs);
    write_table(run, "map.csv", result);
    std::size_t flagged = 0;
    for (const auto& status : result.text_column("status")) flagged += status != "ok";
    if (flagged) std::cerr << "map: " << flagged << " grid point(s) flagged, see the status column\n";
    finish(run);
    return 0;
}

int cmd_polar(const Common& common) {
    Run run = start(common, "polar");
    const auto& qd = run.config.qd;
    if (!(qd.gamma > 0.0)) throw ConfigError("polar: qd.radiative_rate_gamma must be positive");
    const auto scan = polar_scan(run.config.polar.points, qd.fss_ueV, qd.lifetime(), qd.dipole_angle_offset);
    auto file = open_output(run.out / "polar.csv");
    write_polar_csv(file, scan);
    run.manifest.outputs.push_back("polar.csv");
    finish(run);
    return 0;
}

int cmd_budget(const Common& common) {
    Run run = start(common, "budget");
    const auto& b = run.config.budget;
    const auto report = evaluate_budget(b.chain, b.detector_points, b.detected_rate_MHz,
                                        run.config.laser.repetition_MHz, b.detector_uncertainty);
    {
        auto file = open_output(run.out / "budget_report.txt");
        write_budget_report(file, report);
        file << "expected_brightness=" << format_number(expected_brightness(run.config.cavity.eta_ext, 1.0))
             << " (eta_ext x p_QD at p_QD = 1)\n";
        run.manifest.outputs.push_back("budget_report.txt");
    }
    {
        EfficiencyChain chain = b.chain;
        chain.add("detector", report.detector_eta, b.detector_uncertainty);
        chain.add("total", report.setup.value, report.setup.uncertainty);
        auto file = open_output(run.out / "budget.csv");
        write_chain_csv(file, chain);
        run.manifest.outputs.push_back("budget.csv");
    }
    if (report.brightness.inconsistent) std::cerr << "budget: brightness exceeds 1, calibration suspect\n";
    finish(run);
    return 0;
}

int cmd_calibrate(const Common& common, std::optional<double> target) {
    Common c = common;
    c.calibrate = false;
    Run run = start(c, "calibrate");
    const auto record = calibrate_bath(target.value_or(run.config.calibration.target_ratio), run.config);
    run.manifest.calibration = record;
    run.manifest.bath = record.bath;
    {
        auto file = open_output(run.out / "calibration_scan.csv");
        file << record.trace();
        run.manifest.outputs.push_back("calibration_scan.csv");
    }
    std::cout << "coupling_alpha = " << format_number(record.bath.alpha, 10) << "  ; plateau ratio "
              << format_number(record.achieved.ratio, 6) << '\n';
    finish(run);
    return 0;
}

int cmd_plot(const std::string& input, const std::string& output, const std::string& x, const std::string& y,
             const std::string& z, const std::string& group) {
    std::ifstream in(input);
    if (!in) throw ConfigError("plot: cannot read " + input);
    const auto table = tools::read_table(in);
    auto file = open_output(output);
    if (z.empty()) {
        tools::line_plot_svg(file, table, x, y, group);
    } else {
        tools::heatmap_svg(file, table, x, y, z);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qdsps: quantum-dot single-photon source simulator"};
    app.require_subcommand(1);
    Common common;

    std::optional<double> sim_area;
    bool sim_correlations = false;
    auto* simulate = app.add_subcommand("simulate", "Single trajectory at the configured operating point");
    add_common(simulate, common, true);
    simulate->add_option("--area", sim_area, "Pulse area in units of pi (overrides laser.pulse_area_theta)");
    simulate->add_flag("--correlations", sim_correlations, "Also compute the correlation grid and g2/M_s");

    auto* curves = app.add_subcommand("curves", "Emission versus pulse area, resonant and phonon-assisted");
    add_common(curves, common, true);
    auto* powerscan = app.add_subcommand("powerscan", "Brightness and g2 versus normalized power");
    add_common(powerscan, common, true);
    auto* map = app.add_subcommand("map", "Figures of merit over the configured sweep grid");
    add_common(map, common, true);
    auto* polar = app.add_subcommand("polar", "Cross-polarized intensity versus excitation angle");
    add_common(polar, common, false);
    auto* budget = app.add_subcommand("budget", "Setup efficiency, detector model and brightness");
    add_common(budget, common, false);

    std::optional<double> target;
    auto* calibrate = app.add_subcommand("calibrate", "Fit the phonon coupling to a plateau ratio");
    add_common(calibrate, common, false);
    calibrate->add_option("--target", target, "Target plateau/resonant ratio (default calibration.target_ratio)");

    std::string input, output, x, y, z, group;
    auto* plot = app.add_subcommand("plot", "Render a CSV output as SVG");
    plot->add_option("--input", input, "CSV file")->required()->check(CLI::ExistingFile);
    plot->add_option("--output", output, "SVG file")->required();
    plot->add_option("--x", x, "x column")->required();
    plot->add_option("--y", y, "y column")->required();
    plot->add_option("--z", z, "value column (heatmap)");
    plot->add_option("--group", group, "one line per value of this column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*simulate) return cmd_simulate(common, sim_area, sim_correlations);
        if (*curves) return cmd_curves(common);
        if (*powerscan) return cmd_powerscan(common);
        if (*map) return cmd_map(common);
        if (*polar) return cmd_polar(common);
        if (*budget) return cmd_budget(common);
        if (*calibrate) return cmd_calibrate(common, target);
        if (*plot) return cmd_plot(input, output, x, y, z, group);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const CalibrationError& e) {
        std::cerr << "calibration failed: " << e.what() << '\n' << e.trace();
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
