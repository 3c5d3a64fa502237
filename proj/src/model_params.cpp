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

#include "qdsps/model_params.hpp"

#include <cmath>
#include <string>

#include "qdsps/errors.hpp"

namespace qdsps {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

}  // namespace

double wavelength_detuning_to_energy(double delta_lambda_nm, double lambda0_nm) {
    require(lambda0_nm > 0.0, "wavelength_detuning_to_energy: lambda0 must be positive");
    return constants::hc_meV_nm * delta_lambda_nm / (lambda0_nm * lambda0_nm);
}

double energy_to_wavelength_detuning(double energy_meV, double lambda0_nm) {
    require(lambda0_nm > 0.0, "energy_to_wavelength_detuning: lambda0 must be positive");
    return energy_meV * lambda0_nm * lambda0_nm / constants::hc_meV_nm;
}

double gamma_from_linewidth(double bandwidth_nm, double lambda0_nm) {
    require(bandwidth_nm > 0.0 && lambda0_nm > 0.0,
            "gamma_from_linewidth: bandwidth and wavelength must be positive");
    return 2.0 * constants::pi * constants::c_nm_per_ps * bandwidth_nm / (lambda0_nm * lambda0_nm);
}

double detuning_rate_from_wavelength(double delta_lambda_nm, double lambda0_nm) {
    return meV_to_rate(wavelength_detuning_to_energy(delta_lambda_nm, lambda0_nm));
}

double dephasing_for_indistinguishability(double gamma, double target) {
    require(target > 0.0 && target <= 1.0, "indistinguishability target must lie in (0, 1]");
    return 0.5 * gamma * (1.0 / target - 1.0);
}

void QDParams::validate() const {
    require(transition_wavelength_nm > 0.0, "qd.transition_wavelength must be positive");
    require(fss_ueV >= 0.0, "qd.fss must be non-negative");
    require(gamma >= 0.0, "qd.radiative_rate_gamma must be non-negative");
    require(pure_dephasing >= 0.0, "qd.pure_dephasing_rate must be non-negative");
    require(std::isfinite(dipole_angle_offset), "qd.dipole_angle_offset must be finite");
}

QDParams QDParams::from_profile(SampleProfile profile) {
    QDParams qd;
    const double bandwidth_nm = profile == SampleProfile::A ? 0.005 : 0.010;
    qd.gamma = gamma_from_linewidth(bandwidth_nm, qd.transition_wavelength_nm);
    qd.pure_dephasing = dephasing_for_indistinguishability(qd.gamma, 0.92);
    return qd;
}

void CavityParams::validate() const {
    require(kappa_ueV > 0.0, "cavity.linewidth_kappa must be positive");
    require(mode_splitting_ueV >= 0.0, "cavity.mode_splitting must be non-negative");
    require(eta_ext >= 0.0 && eta_ext <= 1.0, "cavity.extraction_efficiency_eta_ext must lie in [0, 1]");
}

CavityParams CavityParams::from_profile(SampleProfile profile) {
    CavityParams cavity;
    if (profile == SampleProfile::B) {
        cavity.kappa_ueV = 150.0;
        cavity.mode_splitting_ueV = 30.0;
    }
    return cavity;
}

void PhononBathParams::validate() const {
    require(alpha >= 0.0, "phonon.coupling_alpha must be non-negative");
    require(omega_b > 0.0, "phonon.cutoff_omega_b must be positive");
    require(temperature_K > 0.0, "phonon.temperature must be positive");
}

double PhononBathParams::spectral_density(double omega) const {
    if (omega <= 0.0) return 0.0;
    const double x = omega / omega_b;
    return alpha * omega * omega * omega * std::exp(-x * x);
}

double PhononBathParams::kT_rate() const {
    return meV_to_rate(constants::boltzmann_meV_per_K * temperature_K);
}

double PhononBathParams::bose(double omega) const {
    return 1.0 / std::expm1(omega / kT_rate());
}

void LaserParams::validate() const {
    require(repetition_MHz > 0.0, "laser.repetition_rate must be positive");
    require(fwhm_ps > 0.0, "laser.pulse_fwhm_tau must be positive");
    require(area_pi >= 0.0, "laser.pulse_area_theta must be non-negative");
    require(std::isfinite(detuning_nm), "laser.detuning_delta_lambda must be finite");
}

}  // namespace qdsps
