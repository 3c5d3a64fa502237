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

#include "qdsps/polarization.hpp"

#include <cmath>
#include <ostream>

#include "qdsps/csv.hpp"
#include "qdsps/errors.hpp"
#include "qdsps/model_params.hpp"

namespace qdsps {

namespace {

// 1 - 1/(1 + x^2), the fraction of the beat that survives the decay.
double beat_visibility(double fss_ueV, double t1_ps) {
    const double x = beat_parameter(fss_ueV, t1_ps);
    return x * x / (1.0 + x * x);
}

}  // namespace

double beat_parameter(double fss_ueV, double t1_ps) {
    if (!(t1_ps > 0.0)) throw DomainError("polarization: lifetime must be positive");
    if (!(fss_ueV >= 0.0)) throw DomainError("polarization: fine structure splitting must be non-negative");
    return ueV_to_rate(fss_ueV) * t1_ps;
}

double cross_polarized_intensity(double theta, double fss_ueV, double t1_ps) {
    const double s = std::sin(2.0 * theta);
    return 0.5 * s * s * beat_visibility(fss_ueV, t1_ps);
}

double degree_of_linear_polarization(double i_par, double i_perp) {
    if (i_par < 0.0 || i_perp < 0.0) throw DomainError("degree_of_linear_polarization: negative intensity");
    const double total = i_par + i_perp;
    if (!(total > 0.0)) throw DomainError("degree_of_linear_polarization: no intensity");
    return (i_par - i_perp) / total;
}

double dlp_with_misalignment(double misalign, double fss_ueV, double t1_ps) {
    if (!(std::abs(misalign) < 0.25 * constants::pi)) {
        throw DomainError("dlp_with_misalignment: |misalignment| must be below pi/4");
    }
    const double perp = cross_polarized_intensity(misalign, fss_ueV, t1_ps);
    return degree_of_linear_polarization(1.0 - perp, perp);
}

double misalignment_for_dlp(double dlp, double fss_ueV, double t1_ps) {
    if (!(dlp <= 1.0)) throw DomainError("misalignment_for_dlp: D_LP cannot exceed 1");
    const double visibility = beat_visibility(fss_ueV, t1_ps);
    if (dlp == 1.0) return 0.0;
    // D = 1 - sin^2(2m) * visibility
    const double s2 = (1.0 - dlp) / visibility;
    if (!(visibility > 0.0) || s2 >= 1.0) {
        throw DomainError("misalignment_for_dlp: D_LP not reachable for this splitting and lifetime");
    }
    return 0.5 * std::asin(std::sqrt(s2));
}

PolarScan polar_scan(std::size_t points, double fss_ueV, double t1_ps, double dipole_offset) {
    if (points == 0) throw DomainError("polar_scan: need at least one angle");
    PolarScan scan;
    scan.angles.resize(points);
    scan.intensity_perp.resize(points);
    scan.intensity_par.resize(points);
    for (std::size_t k = 0; k < points; ++k) {
        const double angle = 2.0 * constants::pi * static_cast<double>(k) / static_cast<double>(points);
        const double perp = cross_polarized_intensity(angle - dipole_offset, fss_ueV, t1_ps);
        scan.angles[k] = angle;
        scan.intensity_perp[k] = perp;
        scan.intensity_par[k] = 1.0 - perp;
    }
    return scan;
}

void write_polar_csv(std::ostream& out, const PolarScan& scan) {
    CsvWriter csv(out);
    csv.header({"angle_deg", "i_perp", "i_par"});
    for (std::size_t k = 0; k < scan.angles.size(); ++k) {
        csv.field(scan.angles[k] * 180.0 / constants::pi).field(scan.intensity_perp[k]).field(scan.intensity_par[k]);
        csv.end_row();
    }
}

}  // namespace qdsps
