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

// Driven exciton master equation in the frame rotating at the laser frequency:
//
//   H(t) = -delta |X><X| + (-delta + fss) |Y><Y|
//          + Omega(t)/2 (cos phi (|X><g| + h.c.) + sin phi (|Y><g| + h.c.))
//
// with radiative decay (gamma) of every exciton level, pure dephasing
// (gamma_d on each ground-exciton coherence) and LA-phonon relaxation between
// the instantaneous eigenstates of H(t). Level 0 is |g>, 1 is |X>, 2 is |Y>;
// the two-level model keeps only g and X.

#include <complex>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "qdsps/model_params.hpp"
#include "qdsps/ode.hpp"
#include "qdsps/pulse.hpp"

namespace qdsps {

using Complex = std::complex<double>;
using Operator = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;
using SuperOperator = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 9, 9>;

inline constexpr int ground_level = 0;
inline constexpr int x_level = 1;
inline constexpr int y_level = 2;

struct DriveHamiltonian {
    double delta = 0.0;  // laser - transition, 1/ps, blue positive
    PulseEnvelope envelope;
    double polarization_angle = 0.0;  // drive polarization relative to the X dipole (3-level only)
};

struct PhononRates {
    double gamma_down = 0.0;  // upper -> lower dressed state (phonon emission)
    double gamma_up = 0.0;
    double lambda_gen = 0.0;  // generalized Rabi frequency sqrt(delta^2 + Omega^2)
};

/// Two-level dressed-state rates (pi/2)(Omega/Lambda)^2 J(Lambda) (n + 1) and
/// (pi/2)(Omega/Lambda)^2 J(Lambda) n. Zero when Omega == 0 or Lambda == 0.
PhononRates phonon_rates(double omega, double delta, const PhononBathParams& bath);

/// The generator frozen at one drive value: Hamiltonian plus dressed basis and
/// dressed-state phonon rates. rates(b, a) is the rate of |a> -> |b>.
struct GeneratorSnapshot {
    Operator hamiltonian;
    Operator dressed_basis;  // columns are eigenvectors, ascending energy
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3> rates;
    bool phonons = false;
};

class MasterEquation {
public:
    MasterEquation(DriveHamiltonian drive, QDParams qd, PhononBathParams bath, int levels = 2);

    int levels() const { return levels_; }
    const DriveHamiltonian& drive() const { return drive_; }
    const QDParams& qd() const { return qd_; }
    const PhononBathParams& bath() const { return bath_; }

    GeneratorSnapshot snapshot(double omega) const;

    /// out = L(rho) for the generator snapshot; rho need not be Hermitian.
    void apply(const GeneratorSnapshot& generator, const Operator& rho, Operator& out) const;

    /// |g><X|.
    Operator lowering() const;
    /// Sum of exciton projectors.
    Operator excited_projector() const;

    /// Drive value at t inside segment [knot k, knot k+1], resolving the
    /// left/right ambiguity at knots for piecewise-constant drives.
    double omega_in_segment(double t, std::ptrdiff_t segment) const;

    /// Envelope knots strictly inside (t0, t1) followed by t1.
    std::vector<double> breakpoints(double t0, double t1) const;
    std::ptrdiff_t segment_index(double t_mid) const;

private:
    DriveHamiltonian drive_;
    QDParams qd_;
    PhononBathParams bath_;
    int levels_;
};

/// Propagates an arbitrary operator (a density matrix or a regression
/// operator such as sigma^- rho) from t0 to t1, restarting the adaptive
/// integrator at every envelope knot. observe(t, state) is called at each
/// output time in (t0, t1].
IntegrationStats propagate(const MasterEquation& equation, Operator& state, double t0, double t1,
                           std::span<const double> outputs,
                           const std::function<void(double, const Operator&)>& observe,
                           const StepControl& control = {});

/// Transfer map of the vectorized state (column-stacked) from t0 to t1.
SuperOperator propagator(const MasterEquation& equation, double t0, double t1,
                         const StepControl& control = {}, IntegrationStats* stats = nullptr);

/// Column-stacked vector of an operator and back.
Eigen::Matrix<Complex, Eigen::Dynamic, 1, Eigen::ColMajor, 9, 1> vectorize(const Operator& op);
Operator unvectorize(const Eigen::Matrix<Complex, Eigen::Dynamic, 1, Eigen::ColMajor, 9, 1>& v,
                     int levels);

struct StateTrajectory {
    std::vector<double> times;
    std::vector<Operator> rho;
    std::vector<double> populations;  // total exciton population
    IntegrationStats stats;
    int levels = 2;
    double pulse_end = 0.0;
};

struct EvolveOptions {
    /// End of the simulated window; NaN means the end of the envelope.
    double t_end = std::numeric_limits<double>::quiet_NaN();
    double output_dt = 0.05;
    StepControl control = {};
};

/// Ground state of a model with `levels` levels.
Operator ground_state(int levels);
Operator excited_state(int levels);

StateTrajectory evolve(const DriveHamiltonian& drive, const QDParams& qd,
                       const PhononBathParams& bath, const Operator& rho0,
                       const EvolveOptions& options = {});

double occupation_at_end(const StateTrajectory& trajectory);

struct EmissionResult {
    double photons = 0.0;
    bool window_short = false;  // trajectory ends before the pulse does
};

/// gamma * integral of the exciton population plus the analytic tail p(T)
/// remaining at the end of the window.
EmissionResult emission_probability(const StateTrajectory& trajectory, double gamma);

/// Smallest eigenvalue of the Hermitian part.
double min_eigenvalue(const Operator& rho);

/// time_ps,p_e,re_coh,im_coh where coh = <X|rho|g>.
void write_trajectory_csv(std::ostream& out, const StateTrajectory& trajectory);

// ---- excitation schemes -----------------------------------------------------

enum class PulseShape { gaussian, tophat };

struct PulseSpec {
    PulseShape shape = PulseShape::gaussian;
    double fwhm_ps = 16.0;
    double dt = default_pulse_dt;
    double span_fwhm = 6.0;       // gaussian grid span in units of fwhm
    double tophat_rolloff = 0.05;
    double tophat_span_lobes = 16.0;  // tophat grid span in main-lobe widths
};

PulseEnvelope make_pulse(const PulseSpec& spec, double area, double detuning);

struct ExcitationScheme {
    double delta = 0.0;  // 1/ps; zero is resonant excitation

    static ExcitationScheme resonant() { return {}; }
    static ExcitationScheme phonon(double delta) { return {delta}; }
};

/// Everything that defines a simulated source apart from pulse area and scheme.
struct SourceModel {
    QDParams qd;
    PhononBathParams bath;
    PulseSpec pulse;
    int levels = 2;
    double polarization_angle = 0.0;
    double tail_lifetimes = 8.0;  // decay window after the pulse, in 1/gamma
    EvolveOptions evolve;
};

DriveHamiltonian make_drive(const SourceModel& model, const ExcitationScheme& scheme, double area);

/// Exciton population at the end of the pulse grid.
double occupation_after_pulse(const SourceModel& model, const ExcitationScheme& scheme, double area);

/// Emitted photon number over the pulse plus the full decay window.
double emission_after_pulse(const SourceModel& model, const ExcitationScheme& scheme, double area);

struct CurvePoint {
    double area = 0.0;
    double occupation = 0.0;
};

/// Occupation is measured as the emitted photon number per pulse, which
/// equals the final exciton population for a lossless dot.
std::vector<CurvePoint> excitation_curve(std::span<const double> areas,
                                         const ExcitationScheme& scheme, const SourceModel& model);

}  // namespace qdsps
