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

// Pulsed two-time correlations by the quantum regression theorem.
//
// All correlations live on one time grid s_0 < s_1 < ... < s_{M-1}: fine
// steps across the pulse, coarse steps through the radiative tail. Row i of
// the grid holds tau = s_j - s_i for j >= i, so
//
//   g1(i, j) = gamma <sigma+(s_j) sigma-(s_i)>
//   g2(i, j) = gamma^2 <sigma+(s_i) sigma+(s_j) sigma-(s_j) sigma-(s_i)>
//
// Both are evaluated by propagating sigma- rho(s_i) and sigma- rho(s_i) sigma+
// with products of per-interval transfer maps.

#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "qdsps/lindblad.hpp"

namespace qdsps {

/// Lorentzian spectral filter (etalon) centred on the emission line.
struct SpectralFilter {
    double fwhm = 0.0;  // angular FWHM, 1/ps

    static SpectralFilter from_bandwidth(double bandwidth_nm, double lambda0_nm);
};

struct CorrelationOptions {
    double tau_window_lifetimes = 8.0;
    double fine_step = std::numeric_limits<double>::quiet_NaN();    // default min(0.25, fwhm/16)
    double coarse_step = std::numeric_limits<double>::quiet_NaN();  // default min(2, 0.05/gamma)
    StepControl control = {};
    unsigned jobs = 1;
    std::optional<SpectralFilter> etalon;
};

/// Everything needed to re-propagate the source: the drive, the dot, the
/// bath and the state before the pulse.
struct SolverContext {
    DriveHamiltonian drive;
    QDParams qd;
    PhononBathParams bath;
    Operator rho0 = ground_state(2);
    CorrelationOptions options;
};

SolverContext make_context(const SourceModel& model, const ExcitationScheme& scheme, double area,
                           const CorrelationOptions& options = {});

struct CorrelationGrid {
    std::vector<double> times;
    std::vector<double> weights;            // trapezoid weights of the time grid
    std::vector<std::vector<Complex>> g1;   // g1[i][j - i]
    std::vector<std::vector<double>> g2;    // g2[i][j - i]
    std::vector<double> population;         // <X|rho(s_i)|X>
    double gamma = 0.0;
    double pure_dephasing = 0.0;
    double delta = 0.0;
    double pulse_start = 0.0;
    double pulse_end = 0.0;
    double pulse_fwhm = 0.0;
    IntegrationStats stats;

    std::size_t size() const { return times.size(); }
    /// Emitted photon number gamma * integral <sigma+ sigma->.
    double photon_number() const;
};

/// Default grid: fine steps over the pulse, coarse steps for the tail window.
std::vector<double> correlation_time_grid(const SolverContext& context);

CorrelationGrid compute_correlations(const SolverContext& context);
CorrelationGrid compute_correlations(const SolverContext& context, std::vector<double> grid);

struct PurityResult {
    double g2_zero = 0.0;
    double purity = 1.0;
};

struct IndistinguishabilityResult {
    double m_s = 0.0;
    double v_hom = 0.0;
};

/// Integrated pulsed g2(0); throws UndefinedResultError when nothing is emitted.
PurityResult purity_from_grid(const CorrelationGrid& grid,
                              const std::optional<SpectralFilter>& etalon = {});
IndistinguishabilityResult indistinguishability_from_grid(const CorrelationGrid& grid,
                                                          const std::optional<SpectralFilter>& etalon = {});

PurityResult regression_g2(const SolverContext& context);
IndistinguishabilityResult regression_ms(const SolverContext& context);

struct SourceFigures {
    double photons = 0.0;
    PurityResult purity;
    IndistinguishabilityResult indistinguishability;
};

/// g2, M_s and photon number from a single correlation grid.
SourceFigures figures_of_merit(const SolverContext& context);

/// M_s = (V + g2) / (1 - g2); throws DomainError for g2 >= 1.
double ms_from_hom(double v_hom, double g2);
/// V = M_s (1 - g2) - g2.
double hom_from_ms(double m_s, double g2);

/// Factor applied to g2 by an etalon: transmission of re-excitation photons
/// (line broadened by the pulse bandwidth) relative to the main line.
double etalon_g2_suppression(const SpectralFilter& etalon, double gamma, double pure_dephasing,
                             double pulse_fwhm);

/// t_ps,tau_ps,re_g1,im_g1,g2 for every grid entry.
void write_correlation_csv(std::ostream& out, const CorrelationGrid& grid);
/// Flat key=value report.
void write_statistics_report(std::ostream& out, const SourceFigures& figures);

}  // namespace qdsps
