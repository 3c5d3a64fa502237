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

// Optical loss budget, detector saturation and first-lens brightness.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qdsps {

struct ChainElement {
    std::string name;
    double transmission = 1.0;
    double uncertainty = 0.0;
};

struct EfficiencyChain {
    std::vector<ChainElement> elements;

    void validate() const;
    EfficiencyChain& add(std::string name, double transmission, double uncertainty = 0.0);
    /// This chain followed by `other`.
    EfficiencyChain concatenated(const EfficiencyChain& other) const;
};

struct Estimate {
    double value = 0.0;
    double uncertainty = 0.0;
};

/// Product of the transmissions; first-order error propagation in quadrature.
Estimate chain_efficiency(const EfficiencyChain& chain);

/// Linear dead-time model eta(R) = eta0 (1 - R t_d).
struct DetectorModel {
    double eta0 = 1.0;
    double dead_time_ns = 0.0;

    void validate() const;
};

/// Detection efficiency at a detected rate in MHz. Throws DomainError once
/// R t_d >= 1 (saturated detector).
double detector_efficiency(const DetectorModel& model, double rate_MHz);

struct DetectorPoint {
    double rate_MHz = 0.0;
    double efficiency = 0.0;
};

struct DetectorFit {
    DetectorModel model;
    std::vector<double> residuals;  // measured - model, per point
    double rms_residual = 0.0;
};

/// Least-squares fit of the linear dead-time model. Throws FitError for
/// fewer than two distinct rates or an unphysical (negative) dead time.
DetectorFit fit_detector(const std::vector<DetectorPoint>& points);

struct BrightnessEstimate {
    double value = 0.0;
    bool inconsistent = false;  // > 1: calibration suspect
};

/// R_det / (R_L eta).
BrightnessEstimate brightness_from_counts(double r_det_MHz, double r_laser_MHz, double eta_setup);

/// eta_ext * p_QD.
double expected_brightness(double eta_ext, double p_qd);

/// Reads name,transmission,uncertainty rows (header optional).
EfficiencyChain read_chain_csv(std::istream& in);
void write_chain_csv(std::ostream& out, const EfficiencyChain& chain);

struct BudgetReport {
    EfficiencyChain chain;
    DetectorFit detector;
    double detected_rate_MHz = 0.0;
    double laser_rate_MHz = 0.0;
    Estimate optics;        // chain without detector
    double detector_eta = 0.0;
    Estimate setup;         // optics x detector at the detected rate
    BrightnessEstimate brightness;
};

/// Combines the optical chain with the fitted detector at the detected rate.
BudgetReport evaluate_budget(const EfficiencyChain& optics, const std::vector<DetectorPoint>& detector_points,
                             double detected_rate_MHz, double laser_rate_MHz, double detector_uncertainty = 0.0);

/// Flat key=value text, including the detector model form.
void write_budget_report(std::ostream& out, const BudgetReport& report);

}  // namespace qdsps
