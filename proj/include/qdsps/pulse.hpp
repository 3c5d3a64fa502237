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

#include <iosfwd>
#include <span>
#include <vector>

#include "qdsps/model_params.hpp"

namespace qdsps {

/// How the drive is evaluated between samples.
enum class Interpolation {
    linear,  ///< piecewise linear through the samples (shaped pulses)
    hold,    ///< amplitude[k] held on [times[k], times[k+1]) (piecewise-constant drives)
};

/// Sampled real Rabi envelope Omega(t) in 1/ps on a strictly increasing grid.
/// The drive is zero outside [start(), end()].
class PulseEnvelope {
public:
    PulseEnvelope() = default;
    PulseEnvelope(std::vector<double> times, std::vector<double> amplitude, double detuning,
                  double fwhm, Interpolation interpolation = Interpolation::linear);

    /// Piecewise-constant drive with values[k] on [boundaries[k], boundaries[k+1]).
    static PulseEnvelope piecewise_constant(std::vector<double> boundaries,
                                            const std::vector<double>& values, double detuning);

    std::span<const double> times() const { return times_; }
    std::span<const double> amplitude() const { return amplitude_; }
    double detuning() const { return detuning_; }
    double fwhm() const { return fwhm_; }
    Interpolation interpolation() const { return interpolation_; }

    bool empty() const { return times_.empty(); }
    double start() const { return times_.front(); }
    double end() const { return times_.back(); }
    double peak() const;

    double at(double t) const;
    /// Exact integral of the interpolated drive.
    double area() const;

    PulseEnvelope scaled(double factor) const;
    PulseEnvelope with_area(double area) const;

private:
    std::vector<double> times_;
    std::vector<double> amplitude_;
    double detuning_ = 0.0;
    double fwhm_ = 0.0;
    Interpolation interpolation_ = Interpolation::linear;
};

inline constexpr double default_pulse_dt = 0.05;  // ps

/// Gaussian envelope with amplitude FWHM `fwhm` (ps) centred at t = 0 on
/// [-grid_span/2, grid_span/2]. Normalised so the grid integral equals `area`.
/// Throws TruncationError when grid_span < 6 fwhm.
PulseEnvelope make_gaussian_pulse(double fwhm, double area, double detuning, double grid_span,
                                  double dt = default_pulse_dt);

/// Temporal profile of a top-hat spectrum of angular FWHM `spectral_fwhm` (1/ps)
/// with a raised-cosine edge of fractional width `rolloff`. The response is
/// tapered to zero over the outer tenth of the grid on each side.
PulseEnvelope make_tophat_spectrum_pulse(double spectral_fwhm, double area, double detuning,
                                         double grid_span, double rolloff = 0.05,
                                         double dt = default_pulse_dt);

/// Main-lobe FWHM of a top-hat-spectrum pulse relative to 2 pi / spectral_fwhm.
inline constexpr double tophat_fwhm_factor = 1.2067091288;

/// Spectral angular FWHM whose top-hat pulse has temporal main-lobe FWHM `fwhm`.
double tophat_spectral_fwhm_for_duration(double fwhm);

/// Measured FWHM of |Omega| around its maximum, linear interpolation between samples.
double measure_fwhm(std::span<const double> times, std::span<const double> amplitude);

/// Lorentzian cavity transmission 1 / (1 + (2 delta / kappa)^2); both in the same energy unit.
double cavity_transmission(double detuning, double kappa);

/// Intra-cavity pulse area k sqrt(P T(delta)).
double intracavity_area(double input_power, double detuning, double kappa,
                        double calibration = constants::pi);

/// Input power (same relative units) needed to reach `area` inside the cavity.
double input_power_for_area(double area, double detuning, double kappa,
                            double calibration = constants::pi);

/// Two-column CSV: time_ps,omega_per_ps.
void write_envelope_csv(std::ostream& out, const PulseEnvelope& envelope);

}  // namespace qdsps
