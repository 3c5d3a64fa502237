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

// Cross-polarized emission of the two orthogonal linear exciton dipoles.
//
// An excitation polarized at angle theta from the X dipole prepares
// cos(theta)|X> + sin(theta)|Y>; the fine-structure beat during the radiative
// decay rotates the emitted polarization, so some light leaks into the
// orthogonal channel. Intensities are normalized to the total emission.

#include <iosfwd>
#include <vector>

namespace qdsps {

/// Beat parameter fss * T1 / hbar.
double beat_parameter(double fss_ueV, double t1_ps);

/// Time-integrated intensity detected orthogonal to the excitation,
/// sin^2(2 theta)/2 * [1 - 1/(1 + x^2)] with x = fss * T1 / hbar.
double cross_polarized_intensity(double theta, double fss_ueV, double t1_ps);

/// (I_par - I_perp) / (I_par + I_perp).
double degree_of_linear_polarization(double i_par, double i_perp);

/// D_LP when the excitation is misaligned from the X dipole by `misalign` rad.
double dlp_with_misalignment(double misalign, double fss_ueV, double t1_ps);

/// Smallest non-negative misalignment (rad) giving the requested D_LP.
/// Throws DomainError when the fine-structure beat cannot depolarize that far.
double misalignment_for_dlp(double dlp, double fss_ueV, double t1_ps);

struct PolarScan {
    std::vector<double> angles;  // lab frame, rad
    std::vector<double> intensity_perp;
    std::vector<double> intensity_par;
};

/// `points` lab angles evenly spaced on [0, 2 pi); the X dipole sits at
/// `dipole_offset` in the lab frame.
PolarScan polar_scan(std::size_t points, double fss_ueV, double t1_ps, double dipole_offset = 0.0);

/// angle_deg,i_perp,i_par
void write_polar_csv(std::ostream& out, const PolarScan& scan);

}  // namespace qdsps
