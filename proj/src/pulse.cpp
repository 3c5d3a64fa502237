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

#include "qdsps/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "qdsps/csv.hpp"
#include "qdsps/errors.hpp"

namespace qdsps {

namespace {

std::vector<double> uniform_grid(double span, double dt) {
    const auto intervals = static_cast<std::size_t>(std::max(2.0, std::round(span / dt)));
    const double step = span / static_cast<double>(intervals);
    std::vector<double> times(intervals + 1);
    for (std::size_t k = 0; k <= intervals; ++k) {
        times[k] = -0.5 * span + step * static_cast<double>(k);
    }
    times.back() = 0.5 * span;
    return times;
}

double normalized_sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = constants::pi * x;
    return std::sin(px) / px;
}

// Impulse response of a raised-cosine spectrum with unit FWHM in ordinary
// frequency, evaluated at t in units of the symbol time.
double raised_cosine_response(double t, double rolloff) {
    if (rolloff <= 0.0) return normalized_sinc(t);
    const double denom = 1.0 - (2.0 * rolloff * t) * (2.0 * rolloff * t);
    if (std::abs(denom) < 1e-10) {
        return 0.25 * constants::pi * normalized_sinc(1.0 / (2.0 * rolloff));
    }
    return normalized_sinc(t) * std::cos(constants::pi * rolloff * t) / denom;
}

}  // namespace

PulseEnvelope::PulseEnvelope(std::vector<double> times, std::vector<double> amplitude,
                             double detuning, double fwhm, Interpolation interpolation)
    : times_(std::move(times)),
      amplitude_(std::move(amplitude)),
      detuning_(detuning),
      fwhm_(fwhm),
      interpolation_(interpolation) {
    if (times_.size() < 2 || times_.size() != amplitude_.size()) {
        throw DomainError("PulseEnvelope: need at least two samples and matching lengths");
    }
    for (std::size_t k = 1; k < times_.size(); ++k) {
        if (!(times_[k] > times_[k - 1])) {
            throw DomainError("PulseEnvelope: time grid must be strictly increasing");
        }
    }
    for (double value : amplitude_) {
        if (!std::isfinite(value)) throw DomainError("PulseEnvelope: non-finite amplitude");
    }
    if (!std::isfinite(detuning_)) throw DomainError("PulseEnvelope: non-finite detuning");
}

PulseEnvelope PulseEnvelope::piecewise_constant(std::vector<double> boundaries,
                                                const std::vector<double>& values, double detuning) {
    if (values.size() + 1 != boundaries.size()) {
        throw DomainError("piecewise_constant: need one value per interval");
    }
    std::vector<double> amplitude(values);
    amplitude.push_back(0.0);
    const double duration = boundaries.back() - boundaries.front();
    return PulseEnvelope(std::move(boundaries), std::move(amplitude), detuning, duration,
                         Interpolation::hold);
}

double PulseEnvelope::peak() const {
    double best = 0.0;
    for (double value : amplitude_) best = std::max(best, std::abs(value));
    return best;
}

double PulseEnvelope::at(double t) const {
    if (times_.empty() || t < times_.front() || t > times_.back()) return 0.0;
    auto upper = std::upper_bound(times_.begin(), times_.end(), t);
    if (upper == times_.end()) {
        return interpolation_ == Interpolation::hold ? 0.0 : amplitude_.back();
    }
    const auto k = static_cast<std::size_t>(upper - times_.begin()) - 1;
    if (interpolation_ == Interpolation::hold) return amplitude_[k];
    const double w = (t - times_[k]) / (times_[k + 1] - times_[k]);
    return amplitude_[k] + w * (amplitude_[k + 1] - amplitude_[k]);
}

double PulseEnvelope::area() const {
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < times_.size(); ++k) {
        const double h = times_[k + 1] - times_[k];
        sum += interpolation_ == Interpolation::hold
                   ? h * amplitude_[k]
                   : 0.5 * h * (amplitude_[k] + amplitude_[k + 1]);
    }
    return sum;
}

PulseEnvelope PulseEnvelope::scaled(double factor) const {
    PulseEnvelope copy = *this;
    for (double& value : copy.amplitude_) value *= factor;
    return copy;
}

PulseEnvelope PulseEnvelope::with_area(double target) const {
    const double current = area();
    if (target == 0.0) return scaled(0.0);
    if (current == 0.0) throw DomainError("with_area: cannot rescale an all-zero envelope");
    return scaled(target / current);
}

PulseEnvelope make_gaussian_pulse(double fwhm, double area, double detuning, double grid_span,
                                  double dt) {
    if (!(fwhm > 0.0)) throw DomainError("make_gaussian_pulse: fwhm must be positive");
    if (!(dt > 0.0)) throw DomainError("make_gaussian_pulse: dt must be positive");
    if (grid_span < 6.0 * fwhm) {
        throw TruncationError("make_gaussian_pulse: grid span must be at least 6 x fwhm");
    }
    auto times = uniform_grid(grid_span, dt);
    std::vector<double> amplitude(times.size());
    const double c = 4.0 * std::log(2.0) / (fwhm * fwhm);
    for (std::size_t k = 0; k < times.size(); ++k) {
        amplitude[k] = std::exp(-c * times[k] * times[k]);
    }
    PulseEnvelope unit(std::move(times), std::move(amplitude), detuning, fwhm);
    return unit.with_area(area);
}

PulseEnvelope make_tophat_spectrum_pulse(double spectral_fwhm, double area, double detuning,
                                         double grid_span, double rolloff, double dt) {
    if (!(spectral_fwhm > 0.0)) {
        throw DomainError("make_tophat_spectrum_pulse: spectral width must be positive");
    }
    if (rolloff < 0.0 || rolloff > 1.0) {
        throw DomainError("make_tophat_spectrum_pulse: rolloff must lie in [0, 1]");
    }
    const double symbol_time = 2.0 * constants::pi / spectral_fwhm;
    if (grid_span * spectral_fwhm < 2.0 * constants::pi * 8.0) {
        throw DomainError(
            "make_tophat_spectrum_pulse: spectral width below the grid resolution (span < 8 main lobes)");
    }
    if (symbol_time < 4.0 * dt) {
        throw DomainError("make_tophat_spectrum_pulse: spectral width exceeds the time-grid bandwidth");
    }
    auto times = uniform_grid(grid_span, dt);
    std::vector<double> amplitude(times.size());
    const double half = 0.5 * grid_span;
    const double taper = 0.1 * grid_span;
    for (std::size_t k = 0; k < times.size(); ++k) {
        double value = raised_cosine_response(times[k] / symbol_time, rolloff);
        const double edge = half - std::abs(times[k]);
        if (edge < taper) value *= 0.5 * (1.0 - std::cos(constants::pi * edge / taper));
        amplitude[k] = value;
    }
    const double fwhm = measure_fwhm(times, amplitude);
    PulseEnvelope unit(std::move(times), std::move(amplitude), detuning, fwhm);
    return unit.with_area(area);
}

double tophat_spectral_fwhm_for_duration(double fwhm) {
    if (!(fwhm > 0.0)) throw DomainError("tophat_spectral_fwhm_for_duration: fwhm must be positive");
    return 2.0 * constants::pi * tophat_fwhm_factor / fwhm;
}

double measure_fwhm(std::span<const double> times, std::span<const double> amplitude) {
    if (times.size() != amplitude.size() || times.size() < 3) return 0.0;
    std::size_t peak = 0;
    for (std::size_t k = 1; k < amplitude.size(); ++k) {
        if (std::abs(amplitude[k]) > std::abs(amplitude[peak])) peak = k;
    }
    const double half = 0.5 * std::abs(amplitude[peak]);
    if (half == 0.0) return 0.0;
    auto crossing = [&](std::size_t inside, std::size_t outside) {
        const double a = std::abs(amplitude[inside]);
        const double b = std::abs(amplitude[outside]);
        const double w = (a - half) / (a - b);
        return times[inside] + w * (times[outside] - times[inside]);
    };
    std::size_t left = peak;
    while (left > 0 && std::abs(amplitude[left - 1]) >= half) --left;
    std::size_t right = peak;
    while (right + 1 < amplitude.size() && std::abs(amplitude[right + 1]) >= half) ++right;
    const double t_left = left == 0 ? times.front() : crossing(left, left - 1);
    const double t_right = right + 1 == amplitude.size() ? times.back() : crossing(right, right + 1);
    return t_right - t_left;
}

double cavity_transmission(double detuning, double kappa) {
    if (!(kappa > 0.0)) throw DomainError("cavity_transmission: kappa must be positive");
    const double x = 2.0 * detuning / kappa;
    return 1.0 / (1.0 + x * x);
}

double intracavity_area(double input_power, double detuning, double kappa, double calibration) {
    if (input_power < 0.0) throw DomainError("intracavity_area: input power must be non-negative");
    return calibration * std::sqrt(input_power * cavity_transmission(detuning, kappa));
}

double input_power_for_area(double area, double detuning, double kappa, double calibration) {
    if (area < 0.0) throw DomainError("input_power_for_area: area must be non-negative");
    const double ratio = area / calibration;
    return ratio * ratio / cavity_transmission(detuning, kappa);
}

void write_envelope_csv(std::ostream& out, const PulseEnvelope& envelope) {
    CsvWriter csv(out);
    csv.header({"time_ps", "omega_per_ps"});
    const auto times = envelope.times();
    const auto amplitude = envelope.amplitude();
    for (std::size_t k = 0; k < times.size(); ++k) {
        csv.field(times[k]).field(amplitude[k]);
        csv.end_row();
    }
}

}  // namespace qdsps
