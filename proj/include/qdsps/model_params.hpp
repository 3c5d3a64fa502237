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

// Physical parameters of the dot, cavity, phonon bath and laser.
//
// Internally everything runs in natural units: time in ps, rates and
// energies as angular frequencies in 1/ps (hbar = 1). Lab units (nm, ueV,
// meV, K, MHz) appear only in the parameter structs and the converters below.

#include <numbers>

namespace qdsps {

namespace constants {
inline constexpr double pi = std::numbers::pi;
inline constexpr double hbar_meV_ps = 0.6582119569;        // meV * ps
inline constexpr double boltzmann_meV_per_K = 0.08617333262;
inline constexpr double hc_meV_nm = 1.239841984e6;        // meV * nm
inline constexpr double c_nm_per_ps = 299792.458;
inline constexpr double default_wavelength_nm = 924.8;
}  // namespace constants

// ---- unit conversions -----------------------------------------------------

/// Energy (meV) of a wavelength detuning: hc * dlambda / lambda0^2.
/// Positive detuning is a blue shift (shorter laser wavelength).
double wavelength_detuning_to_energy(double delta_lambda_nm, double lambda0_nm);
double energy_to_wavelength_detuning(double energy_meV, double lambda0_nm);

/// Radiative rate (1/ps) of a lifetime-limited Lorentzian line of the given
/// FWHM bandwidth: 2 pi c dlambda / lambda0^2.
double gamma_from_linewidth(double bandwidth_nm, double lambda0_nm);

constexpr double meV_to_rate(double meV) { return meV / constants::hbar_meV_ps; }
constexpr double rate_to_meV(double rate) { return rate * constants::hbar_meV_ps; }
constexpr double ueV_to_rate(double ueV) { return meV_to_rate(ueV * 1e-3); }
constexpr double rate_to_ueV(double rate) { return rate_to_meV(rate) * 1e3; }

/// Laser-transition detuning as an angular frequency, blue positive.
double detuning_rate_from_wavelength(double delta_lambda_nm, double lambda0_nm);

// ---- parameter sets ---------------------------------------------------------

enum class SampleProfile { A, B };

struct QDParams {
    double transition_wavelength_nm = constants::default_wavelength_nm;
    double fss_ueV = 0.0;
    double gamma = 0.0;            // radiative rate, 1/ps
    double pure_dephasing = 0.0;   // coherence dephasing rate, 1/ps
    double dipole_angle_offset = 0.0;  // X dipole vs. lab frame, rad

    void validate() const;
    double lifetime() const { return 1.0 / gamma; }
    double fss_rate() const { return ueV_to_rate(fss_ueV); }

    /// Emission bandwidth 5 pm (A) or 10 pm (B); dephasing chosen so the
    /// lossless indistinguishability gamma/(gamma + 2 gamma_d) is 0.92.
    static QDParams from_profile(SampleProfile profile);
};

/// Pure dephasing rate giving gamma/(gamma + 2 gamma_d) == target.
double dephasing_for_indistinguishability(double gamma, double target);

struct CavityParams {
    double kappa_ueV = 300.0;
    double mode_splitting_ueV = 70.0;
    double eta_ext = 0.65;

    void validate() const;
    static CavityParams from_profile(SampleProfile profile);
};

/// Super-Ohmic LA-phonon bath, J(w) = alpha w^3 exp(-w^2 / w_b^2).
struct PhononBathParams {
    double alpha = 0.03;                 // ps^2
    double omega_b = meV_to_rate(1.0);   // 1/ps
    double temperature_K = 8.0;

    void validate() const;

    double spectral_density(double omega) const;
    /// Bose occupation at angular frequency omega > 0.
    double bose(double omega) const;
    double kT_rate() const;
};

struct LaserParams {
    double detuning_nm = 0.6;       // blue-detuned positive
    double fwhm_ps = 16.0;
    double repetition_MHz = 81.0;
    double area_pi = 1.0;           // pulse area in units of pi
    double polarization_angle = 0.0;  // lab frame, rad

    void validate() const;
};

}  // namespace qdsps
