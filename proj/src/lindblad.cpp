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

#include "qdsps/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "qdsps/csv.hpp"
#include "qdsps/errors.hpp"

namespace qdsps {

using Vector9 = Eigen::Matrix<Complex, Eigen::Dynamic, 1, Eigen::ColMajor, 9, 1>;

PhononRates phonon_rates(double omega, double delta, const PhononBathParams& bath) {
    PhononRates rates;
    rates.lambda_gen = std::hypot(delta, omega);
    if (omega == 0.0 || rates.lambda_gen == 0.0) return rates;
    const double mixing = (omega / rates.lambda_gen) * (omega / rates.lambda_gen);
    const double j = bath.spectral_density(rates.lambda_gen);
    const double n = bath.bose(rates.lambda_gen);
    rates.gamma_down = 0.5 * constants::pi * mixing * j * (n + 1.0);
    rates.gamma_up = 0.5 * constants::pi * mixing * j * n;
    return rates;
}

MasterEquation::MasterEquation(DriveHamiltonian drive, QDParams qd, PhononBathParams bath, int levels)
    : drive_(std::move(drive)), qd_(qd), bath_(bath), levels_(levels) {
    if (levels_ != 2 && levels_ != 3) throw DomainError("MasterEquation: levels must be 2 or 3");
    qd_.validate();
    bath_.validate();
}

GeneratorSnapshot MasterEquation::snapshot(double omega) const {
    const int n = levels_;
    GeneratorSnapshot g;
    g.hamiltonian = Operator::Zero(n, n);
    const double c = levels_ == 2 ? 1.0 : std::cos(drive_.polarization_angle);
    g.hamiltonian(x_level, x_level) = -drive_.delta;
    g.hamiltonian(x_level, ground_level) = g.hamiltonian(ground_level, x_level) = 0.5 * omega * c;
    if (levels_ == 3) {
        const double s = std::sin(drive_.polarization_angle);
        g.hamiltonian(y_level, y_level) = -drive_.delta + qd_.fss_rate();
        g.hamiltonian(y_level, ground_level) = g.hamiltonian(ground_level, y_level) = 0.5 * omega * s;
    }
    g.rates = decltype(g.rates)::Zero(n, n);
    if (bath_.alpha == 0.0 || omega == 0.0) return g;

    Eigen::SelfAdjointEigenSolver<Operator> solver(g.hamiltonian);
    g.dressed_basis = solver.eigenvectors();
    const auto& energies = solver.eigenvalues();
    const Operator coupling = g.dressed_basis.adjoint() * excited_projector() * g.dressed_basis;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < a; ++b) {
            // Energies ascend, so a is the upper state of the pair.
            const double w = energies(a) - energies(b);
            if (!(w > 0.0)) continue;
            const double element = std::norm(coupling(b, a));
            const double j = bath_.spectral_density(w);
            if (element == 0.0 || j == 0.0) continue;
            const double nbar = bath_.bose(w);
            g.rates(b, a) = 2.0 * constants::pi * element * j * (nbar + 1.0);
            g.rates(a, b) = 2.0 * constants::pi * element * j * nbar;
        }
    }
    g.phonons = true;
    return g;
}

namespace {

// out += sum over jumps |b><a| with rate R(b, a) applied to rho, all in one basis.
template <class Rates>
void add_rate_dissipator(const Rates& rates, const Operator& rho, Operator& out) {
    const auto n = rho.rows();
    Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1> outflow =
        rates.colwise().sum().transpose();
    for (Eigen::Index b = 0; b < n; ++b) {
        for (Eigen::Index a = 0; a < n; ++a) {
            if (a != b && rates(b, a) != 0.0) out(b, b) += rates(b, a) * rho(a, a);
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            out(i, j) -= 0.5 * (outflow(i) + outflow(j)) * rho(i, j);
        }
    }
}

}  // namespace

void MasterEquation::apply(const GeneratorSnapshot& generator, const Operator& rho, Operator& out) const {
    const Complex minus_i(0.0, -1.0);
    out.noalias() = minus_i * (generator.hamiltonian * rho);
    out.noalias() -= minus_i * (rho * generator.hamiltonian);

    const int n = levels_;
    if (qd_.gamma > 0.0) {
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3> radiative =
            decltype(radiative)::Zero(n, n);
        for (int e = 1; e < n; ++e) radiative(ground_level, e) = qd_.gamma;
        add_rate_dissipator(radiative, rho, out);
    }
    if (qd_.pure_dephasing > 0.0) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                if (i == j) continue;
                const int excitons = (i != ground_level) + (j != ground_level);
                out(i, j) -= qd_.pure_dephasing * excitons * rho(i, j);
            }
        }
    }
    if (generator.phonons) {
        const Operator dressed = generator.dressed_basis.adjoint() * rho * generator.dressed_basis;
        Operator delta_dressed = Operator::Zero(n, n);
        add_rate_dissipator(generator.rates, dressed, delta_dressed);
        out.noalias() += generator.dressed_basis * delta_dressed * generator.dressed_basis.adjoint();
    }
}

Operator MasterEquation::lowering() const {
    Operator op = Operator::Zero(levels_, levels_);
    op(ground_level, x_level) = 1.0;
    return op;
}

Operator MasterEquation::excited_projector() const {
    Operator op = Operator::Zero(levels_, levels_);
    for (int e = 1; e < levels_; ++e) op(e, e) = 1.0;
    return op;
}

double MasterEquation::omega_in_segment(double t, std::ptrdiff_t segment) const {
    const auto& env = drive_.envelope;
    if (env.empty() || segment < 0) return 0.0;
    const auto times = env.times();
    const auto amplitude = env.amplitude();
    const auto k = static_cast<std::size_t>(segment);
    if (k + 1 >= times.size()) return 0.0;
    if (env.interpolation() == Interpolation::hold) return amplitude[k];
    const double w = (t - times[k]) / (times[k + 1] - times[k]);
    return amplitude[k] + w * (amplitude[k + 1] - amplitude[k]);
}

std::vector<double> MasterEquation::breakpoints(double t0, double t1) const {
    std::vector<double> points;
    const auto& env = drive_.envelope;
    if (!env.empty()) {
        const auto times = env.times();
        auto it = std::upper_bound(times.begin(), times.end(), t0);
        for (; it != times.end() && *it < t1; ++it) points.push_back(*it);
    }
    points.push_back(t1);
    return points;
}

std::ptrdiff_t MasterEquation::segment_index(double t_mid) const {
    const auto& env = drive_.envelope;
    if (env.empty()) return -1;
    const auto times = env.times();
    if (t_mid < times.front() || t_mid >= times.back()) return -1;
    auto it = std::upper_bound(times.begin(), times.end(), t_mid);
    return static_cast<std::ptrdiff_t>(it - times.begin()) - 1;
}

namespace {

template <class State, class ApplyFn, class Observe>
IntegrationStats walk_segments(const MasterEquation& equation, State& state, double t0, double t1,
                               std::span<const double> outputs, Observe&& observe,
                               const StepControl& control, ApplyFn&& apply) {
    DormandPrince<State> solver(control);
    const double* next = outputs.data();
    const double* end = next + outputs.size();
    while (next != end && *next <= t0) ++next;
    const bool hold = equation.drive().envelope.interpolation() == Interpolation::hold;

    double a = t0;
    for (double b : equation.breakpoints(t0, t1)) {
        const auto segment = equation.segment_index(0.5 * (a + b));
        GeneratorSnapshot frozen;
        const bool constant = segment < 0 || hold;
        if (constant) frozen = equation.snapshot(equation.omega_in_segment(a, segment));
        auto rhs = [&](double t, const State& y, State& dydt) {
            dydt.resizeLike(y);
            if (constant) {
                apply(frozen, y, dydt);
            } else {
                apply(equation.snapshot(equation.omega_in_segment(t, segment)), y, dydt);
            }
        };
        if (hold) solver.reset();
        solver.advance(rhs, state, a, b, next, end, observe);
        a = b;
    }
    return solver.stats();
}

}  // namespace

IntegrationStats propagate(const MasterEquation& equation, Operator& state, double t0, double t1,
                           std::span<const double> outputs,
                           const std::function<void(double, const Operator&)>& observe,
                           const StepControl& control) {
    if (state.rows() != equation.levels() || state.cols() != equation.levels()) {
        throw DomainError("propagate: state dimension does not match the model");
    }
    auto apply = [&](const GeneratorSnapshot& g, const Operator& y, Operator& dydt) {
        equation.apply(g, y, dydt);
    };
    auto obs = [&](double t, const Operator& y) {
        if (observe) observe(t, y);
    };
    return walk_segments(equation, state, t0, t1, outputs, obs, control, apply);
}

SuperOperator propagator(const MasterEquation& equation, double t0, double t1,
                         const StepControl& control, IntegrationStats* stats) {
    const int n = equation.levels();
    SuperOperator transfer = SuperOperator::Identity(n * n, n * n);
    if (!(t1 > t0)) return transfer;
    auto apply = [&](const GeneratorSnapshot& g, const SuperOperator& y, SuperOperator& dydt) {
        Operator column(n, n);
        Operator derivative(n, n);
        for (int c = 0; c < n * n; ++c) {
            column = Eigen::Map<const Operator>(y.col(c).data(), n, n);
            equation.apply(g, column, derivative);
            dydt.col(c) = Eigen::Map<const Vector9>(derivative.data(), n * n);
        }
    };
    auto ignore = [](double, const SuperOperator&) {};
    const auto run = walk_segments(equation, transfer, t0, t1, std::span<const double>{}, ignore,
                                   control, apply);
    if (stats) *stats += run;
    return transfer;
}

Vector9 vectorize(const Operator& op) {
    return Eigen::Map<const Vector9>(op.data(), op.size());
}

Operator unvectorize(const Vector9& v, int levels) {
    return Eigen::Map<const Operator>(v.data(), levels, levels);
}

Operator ground_state(int levels) {
    Operator rho = Operator::Zero(levels, levels);
    rho(ground_level, ground_level) = 1.0;
    return rho;
}

Operator excited_state(int levels) {
    Operator rho = Operator::Zero(levels, levels);
    rho(x_level, x_level) = 1.0;
    return rho;
}

double min_eigenvalue(const Operator& rho) {
    const Operator hermitian = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> solver(hermitian, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

namespace {

double exciton_population(const Operator& rho) {
    double p = 0.0;
    for (Eigen::Index e = 1; e < rho.rows(); ++e) p += rho(e, e).real();
    return p;
}

void validate_density_matrix(const Operator& rho) {
    if (rho.rows() != rho.cols() || (rho.rows() != 2 && rho.rows() != 3)) {
        throw DomainError("evolve: initial state must be 2x2 or 3x3");
    }
    if (std::abs(rho.trace() - Complex(1.0)) > 1e-8) throw DomainError("evolve: initial state must have unit trace");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw DomainError("evolve: initial state must be Hermitian");
    }
    if (min_eigenvalue(rho) < -1e-9) throw DomainError("evolve: initial state must be positive");
}

}  // namespace

StateTrajectory evolve(const DriveHamiltonian& drive, const QDParams& qd,
                       const PhononBathParams& bath, const Operator& rho0, const EvolveOptions& options) {
    validate_density_matrix(rho0);
    const int levels = static_cast<int>(rho0.rows());
    MasterEquation equation(drive, qd, bath, levels);
    if (drive.envelope.empty()) throw DomainError("evolve: drive has no envelope grid");

    const double t0 = drive.envelope.start();
    const double t_end = std::isnan(options.t_end) ? drive.envelope.end() : options.t_end;
    if (!(t_end > t0)) throw DomainError("evolve: window must end after the envelope starts");

    std::vector<double> outputs;
    if (std::isfinite(options.output_dt) && options.output_dt > 0.0) {
        const double dt = options.output_dt;
        for (std::size_t k = 1;; ++k) {
            const double t = t0 + dt * static_cast<double>(k);
            if (t >= t_end - 1e-9 * dt) break;
            outputs.push_back(t);
        }
    }
    outputs.push_back(t_end);

    StateTrajectory trajectory;
    trajectory.levels = levels;
    trajectory.pulse_end = drive.envelope.end();
    trajectory.times.reserve(outputs.size() + 1);
    trajectory.rho.reserve(outputs.size() + 1);
    trajectory.populations.reserve(outputs.size() + 1);
    auto record = [&](double t, const Operator& rho) {
        trajectory.times.push_back(t);
        trajectory.rho.push_back(rho);
        trajectory.populations.push_back(exciton_population(rho));
    };
    record(t0, rho0);
    Operator state = rho0;
    trajectory.stats = propagate(equation, state, t0, t_end, outputs, record, options.control);
    return trajectory;
}

double occupation_at_end(const StateTrajectory& trajectory) {
    if (trajectory.populations.empty()) throw DomainError("occupation_at_end: empty trajectory");
    return trajectory.populations.back();
}

EmissionResult emission_probability(const StateTrajectory& trajectory, double gamma) {
    EmissionResult result;
    if (trajectory.times.empty()) return result;
    double integral = 0.0;
    for (std::size_t k = 1; k < trajectory.times.size(); ++k) {
        integral += 0.5 * (trajectory.times[k] - trajectory.times[k - 1]) *
                    (trajectory.populations[k] + trajectory.populations[k - 1]);
    }
    result.photons = gamma * integral + trajectory.populations.back();
    result.window_short = trajectory.times.back() < trajectory.pulse_end;
    return result;
}

void write_trajectory_csv(std::ostream& out, const StateTrajectory& trajectory) {
    CsvWriter csv(out);
    csv.header({"time_ps", "p_e", "re_coh", "im_coh"});
    for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
        const Complex coherence = trajectory.rho[k](x_level, ground_level);
        csv.field(trajectory.times[k]).field(trajectory.populations[k]);
        csv.field(coherence.real()).field(coherence.imag());
        csv.end_row();
    }
}

PulseEnvelope make_pulse(const PulseSpec& spec, double area, double detuning) {
    if (spec.shape == PulseShape::gaussian) {
        return make_gaussian_pulse(spec.fwhm_ps, area, detuning, spec.span_fwhm * spec.fwhm_ps, spec.dt);
    }
    const double width = tophat_spectral_fwhm_for_duration(spec.fwhm_ps);
    const double span = spec.tophat_span_lobes * 2.0 * constants::pi / width;
    return make_tophat_spectrum_pulse(width, area, detuning, span, spec.tophat_rolloff, spec.dt);
}

DriveHamiltonian make_drive(const SourceModel& model, const ExcitationScheme& scheme, double area) {
    return DriveHamiltonian{scheme.delta, make_pulse(model.pulse, area, scheme.delta),
                            model.polarization_angle};
}

double occupation_after_pulse(const SourceModel& model, const ExcitationScheme& scheme, double area) {
    EvolveOptions options = model.evolve;
    options.t_end = std::numeric_limits<double>::quiet_NaN();
    options.output_dt = std::numeric_limits<double>::infinity();
    const auto trajectory =
        evolve(make_drive(model, scheme, area), model.qd, model.bath, ground_state(model.levels), options);
    return occupation_at_end(trajectory);
}

double emission_after_pulse(const SourceModel& model, const ExcitationScheme& scheme, double area) {
    // Once the drive is off the exciton population decays purely radiatively,
    // so the analytic tail of emission_probability is exact at the pulse end.
    const auto drive = make_drive(model, scheme, area);
    EvolveOptions options = model.evolve;
    options.t_end = std::numeric_limits<double>::quiet_NaN();
    const auto trajectory = evolve(drive, model.qd, model.bath, ground_state(model.levels), options);
    return emission_probability(trajectory, model.qd.gamma).photons;
}

std::vector<CurvePoint> excitation_curve(std::span<const double> areas, const ExcitationScheme& scheme,
                                         const SourceModel& model) {
    if (areas.empty()) throw DomainError("excitation_curve: no pulse areas given");
    std::vector<CurvePoint> curve;
    curve.reserve(areas.size());
    for (double area : areas) {
        if (area < 0.0) throw DomainError("excitation_curve: pulse areas must be non-negative");
        curve.push_back({area, emission_after_pulse(model, scheme, area)});
    }
    return curve;
}

}  // namespace qdsps
