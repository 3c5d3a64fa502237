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


#include "qdsps/efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "qdsps/csv.hpp"
#include "qdsps/errors.hpp"

namespace qdsps {

void EfficiencyChain::validate() const {
    for (const auto& e : elements) {
        if (!(e.transmission >= 0.0 && e.transmission <= 1.0)) {
            throw DomainError("efficiency chain: transmission of '" + e.name + "' outside [0, 1]");
        }
        if (!(e.uncertainty >= 0.0)) {
            throw DomainError("efficiency chain: negative uncertainty for '" + e.name + "'");
        }
    }
}

EfficiencyChain& EfficiencyChain::add(std::string name, double transmission, double uncertainty) {
    elements.push_back({std::move(name), transmission, uncertainty});
    return *this;
}

EfficiencyChain EfficiencyChain::concatenated(const EfficiencyChain& other) const {
    EfficiencyChain out = *this;
    out.elements.insert(out.elements.end(), other.elements.begin(), other.elements.end());
    return out;
}

Estimate chain_efficiency(const EfficiencyChain& chain) {
    chain.validate();
    Estimate result{1.0, 0.0};
    for (const auto& e : chain.elements) result.value *= e.transmission;
    // d(product)/dt_i = product of the others; written this way so zero
    // transmissions do not divide by zero.
    double variance = 0.0;
    for (std::size_t i = 0; i < chain.elements.size(); ++i) {
        double others = 1.0;
        for (std::size_t j = 0; j < chain.elements.size(); ++j) {
            if (j != i) others *= chain.elements[j].transmission;
        }
        const double term = others * chain.elements[i].uncertainty;
        variance += term * term;
    }
    result.uncertainty = std::sqrt(variance);
    return result;
}

void DetectorModel::validate() const {
    if (!(eta0 >= 0.0 && eta0 <= 1.0)) throw DomainError("detector: eta0 must lie in [0, 1]");
    if (!(dead_time_ns >= 0.0)) throw DomainError("detector: dead time must be non-negative");
}

double detector_efficiency(const DetectorModel& model, double rate_MHz) {
    model.validate();
    if (!(rate_MHz >= 0.0)) throw DomainError("detector_efficiency: rate must be non-negative");
    const double load = rate_MHz * model.dead_time_ns * 1e-3;  // MHz * ns
    if (load >= 1.0) throw DomainError("detector_efficiency: detector saturated (R * t_d >= 1)");
    return model.eta0 * (1.0 - load);
}

DetectorFit fit_detector(const std::vector<DetectorPoint>& points) {
    if (points.size() < 2) throw FitError("fit_detector: need at least two points");
    // eta = a + b R with a = eta0, b = -eta0 t_d.
    double mean_r = 0.0, mean_e = 0.0;
    for (const auto& p : points) {
        if (!std::isfinite(p.rate_MHz) || !std::isfinite(p.efficiency) || p.rate_MHz < 0.0) {
            throw FitError("fit_detector: rates must be finite and non-negative");
        }
        mean_r += p.rate_MHz;
        mean_e += p.efficiency;
    }
    mean_r /= static_cast<double>(points.size());
    mean_e /= static_cast<double>(points.size());
    double srr = 0.0, sre = 0.0;
    for (const auto& p : points) {
        srr += (p.rate_MHz - mean_r) * (p.rate_MHz - mean_r);
        sre += (p.rate_MHz - mean_r) * (p.efficiency - mean_e);
    }
    if (!(srr > 1e-12 * std::max(1.0, mean_r * mean_r))) {
        throw FitError("fit_detector: need at least two distinct rates");
    }
    const double slope = sre / srr;
    const double intercept = mean_e - slope * mean_r;
    if (!(intercept > 0.0)) throw FitError("fit_detector: non-positive zero-rate efficiency");
    DetectorFit fit;
    fit.model.eta0 = intercept;
    fit.model.dead_time_ns = -slope / intercept * 1e3;
    if (fit.model.dead_time_ns < 0.0) {
        // Efficiency rising with rate is not a dead-time effect; clamp tiny
        // negative round-off, reject anything else.
        if (fit.model.dead_time_ns > -1e-9) {
            fit.model.dead_time_ns = 0.0;
        } else {
            throw FitError("fit_detector: efficiency increases with rate (negative dead time)");
        }
    }
    if (fit.model.eta0 > 1.0) throw FitError("fit_detector: fitted eta0 exceeds 1");
    double ss = 0.0;
    for (const auto& p : points) {
        const double r = p.efficiency - (intercept + slope * p.rate_MHz);
        fit.residuals.push_back(r);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / static_cast<double>(points.size()));
    return fit;
}

BrightnessEstimate brightness_from_counts(double r_det_MHz, double r_laser_MHz, double eta_setup) {
    if (!(r_laser_MHz > 0.0)) throw DomainError("brightness_from_counts: laser rate must be positive");
    if (!(eta_setup > 0.0)) throw DomainError("brightness_from_counts: setup efficiency must be positive");
    if (!(r_det_MHz >= 0.0)) throw DomainError("brightness_from_counts: detected rate must be non-negative");
    BrightnessEstimate b;
    b.value = r_det_MHz / (r_laser_MHz * eta_setup);
    b.inconsistent = b.value > 1.0;
    return b;
}

double expected_brightness(double eta_ext, double p_qd) {
    if (!(eta_ext >= 0.0 && eta_ext <= 1.0) || !(p_qd >= 0.0 && p_qd <= 1.0)) {
        throw DomainError("expected_brightness: inputs must be probabilities");
    }
    return eta_ext * p_qd;
}

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text, std::size_t line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw ConfigError("chain csv line " + std::to_string(line) + ": not a number: '" + text + "'");
    }
    return v;
}

}  // namespace

EfficiencyChain read_chain_csv(std::istream& in) {
    EfficiencyChain chain;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(trim(cell));
        if (number == 1 && cells.size() >= 1 && cells[0] == "name") continue;
        if (cells.size() < 2 || cells.size() > 3) {
            throw ConfigError("chain csv line " + std::to_string(number) + ": expected name,transmission[,uncertainty]");
        }
        const double t = parse_double(cells[1], number);
        const double u = cells.size() == 3 ? parse_double(cells[2], number) : 0.0;
        chain.add(cells[0], t, u);
    }
    try {
        chain.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return chain;
}

void write_chain_csv(std::ostream& out, const EfficiencyChain& chain) {
    CsvWriter csv(out);
    csv.header({"name", "transmission", "uncertainty"});
    for (const auto& e : chain.elements) {
        csv.field(e.name).field(e.transmission).field(e.uncertainty);
        csv.end_row();
    }
}

BudgetReport evaluate_budget(const EfficiencyChain& optics, const std::vector<DetectorPoint>& detector_points,
                             double detected_rate_MHz, double laser_rate_MHz, double detector_uncertainty) {
    BudgetReport report;
    report.chain = optics;
    report.detector = fit_detector(detector_points);
    report.detected_rate_MHz = detected_rate_MHz;
    report.laser_rate_MHz = laser_rate_MHz;
    report.optics = chain_efficiency(optics);
    report.detector_eta = detector_efficiency(report.detector.model, detected_rate_MHz);
    EfficiencyChain full = optics;
    full.add("detector", report.detector_eta, detector_uncertainty);
    report.setup = chain_efficiency(full);
    report.brightness = brightness_from_counts(detected_rate_MHz, laser_rate_MHz, report.setup.value);
    return report;
}

void write_budget_report(std::ostream& out, const BudgetReport& report) {
    out << "optics_efficiency=" << format_number(report.optics.value) << '\n'
        << "optics_uncertainty=" << format_number(report.optics.uncertainty) << '\n'
        << "detector_model=linear_dead_time eta(R)=eta0*(1-R*t_d)\n"
        << "detector_eta0=" << format_number(report.detector.model.eta0) << '\n'
        << "detector_dead_time_ns=" << format_number(report.detector.model.dead_time_ns) << '\n'
        << "detector_rms_residual=" << format_number(report.detector.rms_residual) << '\n'
        << "detected_rate_MHz=" << format_number(report.detected_rate_MHz) << '\n'
        << "laser_rate_MHz=" << format_number(report.laser_rate_MHz) << '\n'
        << "detector_efficiency=" << format_number(report.detector_eta) << '\n'
        << "setup_efficiency=" << format_number(report.setup.value) << '\n'
        << "setup_uncertainty=" << format_number(report.setup.uncertainty) << '\n'
        << "first_lens_brightness=" << format_number(report.brightness.value) << '\n'
        << "brightness_inconsistent=" << (report.brightness.inconsistent ? "true" : "false") << '\n';
}

}  // namespace qdsps
