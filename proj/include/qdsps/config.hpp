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

// Run configuration: an INI file with sections qd, cavity, phonon, laser,
// pulse, numerics and one section per experiment. Unknown sections or keys
// are rejected. Lengths are in nm, energies in ueV, times in ps, rates of
// the dot in 1/ps, temperatures in K and repetition rates in MHz.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qdsps/efficiency.hpp"
#include "qdsps/lindblad.hpp"
#include "qdsps/model_params.hpp"
#include "qdsps/photon_stats.hpp"

namespace qdsps {

struct NumericsParams {
    int levels = 2;
    double abs_tol = 1e-10;
    double tail_lifetimes = 8.0;
    double tau_window_lifetimes = 8.0;
    double fine_step = std::numeric_limits<double>::quiet_NaN();
    double coarse_step = std::numeric_limits<double>::quiet_NaN();
    double etalon_bandwidth_nm = 0.0;  // 0: no etalon
};

struct CurvesParams {
    std::vector<double> detunings_nm{0.4, 0.6, 0.8};
    double area_max_pi = 20.0;
    std::size_t points = 81;
};

struct PowerScanParams {
    double p_max_ratio = 4.0;  // scan P/P_max over [0, p_max_ratio]
    std::size_t points = 41;
};

struct SweepAxis {
    std::string parameter;
    std::vector<double> values;
};

struct SweepSpec {
    std::vector<SweepAxis> axes{{"laser.pulse_fwhm_tau", {13.0, 16.0, 19.5, 22.0, 25.0}},
                                {"laser.detuning_delta_lambda", {0.4, 0.5, 0.6, 0.7, 0.8}}};
    std::vector<std::pair<std::string, double>> fixed;
    std::vector<std::string> metrics{"occupation", "g2", "ms", "bfl"};
    double area_min_pi = 0.5;
    double area_max_pi = 20.0;
    double search_rel_tol = 1e-3;

    void validate() const;
};

struct CalibrationParams {
    double target_ratio = 0.85;
    double alpha_start = 1e-3;
    double alpha_max = 10.0;
};

struct BudgetParams {
    EfficiencyChain chain;
    std::vector<DetectorPoint> detector_points{{0.5, 0.75}, {6.0, 0.69}};
    double detected_rate_MHz = 6.0;
    double detector_uncertainty = 0.03;
};

struct PolarParams {
    std::size_t points = 72;
};

struct Config {
    QDParams qd = QDParams::from_profile(SampleProfile::A);
    CavityParams cavity;
    PhononBathParams bath;
    LaserParams laser;
    PulseSpec pulse;
    NumericsParams numerics;
    CurvesParams curves;
    PowerScanParams powerscan;
    SweepSpec map;
    CalibrationParams calibration;
    BudgetParams budget;
    PolarParams polar;

    static Config from_profile(SampleProfile profile);
    void validate() const;
};

Config parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
Config load_config(const std::filesystem::path& path);

/// Sets a numeric parameter by its config name, e.g. "laser.pulse_fwhm_tau".
/// Throws ConfigError for names outside the schema.
void set_parameter(Config& config, const std::string& name, double value);
double get_parameter(const Config& config, const std::string& name);
bool is_parameter(const std::string& name);
std::vector<std::string> parameter_names();
/// Short CSV column label of a parameter (tau_ps, delta_lambda_nm, ...).
std::string parameter_label(const std::string& name);

/// Deterministic key=value listing of every setting.
std::string canonical_text(const Config& config);
/// 64-bit FNV-1a of canonical_text, as 16 hex digits.
std::string config_hash(const Config& config);

// ---- model assembly ---------------------------------------------------------

SourceModel make_source_model(const Config& config);
/// Phonon-assisted scheme at the configured laser detuning (resonant if 0).
ExcitationScheme laser_scheme(const Config& config);
ExcitationScheme scheme_for_detuning(const Config& config, double detuning_nm);
CorrelationOptions correlation_options(const Config& config, unsigned jobs = 1);

}  // namespace qdsps
