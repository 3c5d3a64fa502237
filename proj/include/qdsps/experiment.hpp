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


#pragma once

// Figure-style experiments on top of the solver: excitation curves, power
// scans, (pulse duration, detuning) maps of the figures of merit, and the
// phonon-bath calibration. Grid points run concurrently; every output row
// is produced by one task and rows are emitted in grid order.

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qdsps/config.hpp"

namespace qdsps {

struct EmissionPoint {
    double photons = 0.0;
    IntegrationStats stats;
};

/// Emitted photon number per pulse at one pulse area.
EmissionPoint emission_point(const SourceModel& model, const ExcitationScheme& scheme, double area);

struct SearchResult {
    double area = 0.0;
    double emission = 0.0;
    std::size_t evaluations = 0;
    bool at_boundary = false;  // optimum sits on the search bracket edge
    IntegrationStats stats;
};

/// Pulse area in [area_lo, area_hi] maximizing the emitted photon number
/// (Brent's golden-section/parabolic search, relative area tolerance rel_tol).
SearchResult maximize_emission(const SourceModel& model, const ExcitationScheme& scheme, double area_lo,
                               double area_hi, double rel_tol = 1e-3);

/// Bracket used for the resonant maximum.
inline constexpr double resonant_search_lo = 0.5 * constants::pi;
inline constexpr double resonant_search_hi = 1.5 * constants::pi;

struct PlateauRatio {
    double ratio = 0.0;
    double plateau = 0.0;        // phonon-assisted maximum emission
    double plateau_area = 0.0;
    double resonant_max = 0.0;   // resonant maximum emission
    double resonant_area = 0.0;
};

/// Maximum phonon-assisted emission over [area_lo, area_hi] relative to the
/// resonant maximum of the same dot and bath.
PlateauRatio plateau_ratio(const SourceModel& model, const ExcitationScheme& phonon, double area_lo,
                           double area_hi, double rel_tol = 1e-3);

struct CalibrationRecord {
    PhononBathParams bath;
    double target = 0.0;
    PlateauRatio achieved;
    std::vector<std::pair<double, double>> scan;  // (alpha, ratio) in evaluation order

    std::string trace() const;
};

/// Root-finds the bath coupling alpha so that the plateau ratio equals
/// `target_ratio` within 1e-3 at the configured detuning, pulse and
/// temperature. Throws CalibrationError (with the scan trace) when no bracket
/// is found below calibration.alpha_max.
CalibrationRecord calibrate_bath(double target_ratio, const Config& config);

struct RobustnessResult {
    double phonon_slope = 0.0;    // mean |d emission / d area| around the phonon optimum
    double resonant_slope = 0.0;  // same around the resonant optimum
    double phonon_area = 0.0;
    double resonant_area = 0.0;
    double ratio() const { return phonon_slope / resonant_slope; }
};

/// Mean slope magnitude over a +/- `window` relative area range around each
/// scheme's operating point (total variation divided by the range width).
RobustnessResult robustness(const SourceModel& model, const ExcitationScheme& phonon, double area_lo,
                            double area_hi, double window = 0.2, std::size_t samples = 41);

// ---- tabular results -----------------------------------------------------

using Cell = std::variant<double, long long, std::string>;

struct SweepResult {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    std::size_t column_index(const std::string& name) const;
    /// Numeric column; integer cells are widened.
    std::vector<double> column(const std::string& name) const;
    std::vector<std::string> text_column(const std::string& name) const;
};

/// scheme,detuning_nm,area_pi,input_power,occupation,normalized. Input power
/// is relative to the resonant pi-pulse power; occupation is normalized to the
/// largest resonant value on the area grid.
SweepResult run_excitation_curves(const Config& config, unsigned jobs = 1);

/// scheme,p_over_pmax,area_pi,brightness,g2,status, with P_max the power of
/// maximum brightness of each scheme.
SweepResult run_power_scan(const Config& config, unsigned jobs = 1);

/// One row per grid point (first axis slowest): axis labels, area_pi,
/// requested metrics, status, steps, rejected. A failing point is flagged in
/// its status column and does not stop the sweep.
SweepResult run_fom_map(const SweepSpec& spec, const Config& config, unsigned jobs = 1);

void write_sweep_csv(std::ostream& out, const SweepResult& result);

struct RunManifest {
    std::string command;
    std::string config_path;
    std::string config_hash;
    PhononBathParams bath;
    std::optional<CalibrationRecord> calibration;
    std::vector<std::string> outputs;
};

void write_manifest(std::ostream& out, const RunManifest& manifest);

}  // namespace qdsps
