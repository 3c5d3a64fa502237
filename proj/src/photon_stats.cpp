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

#include "qdsps/photon_stats.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "qdsps/csv.hpp"
#include "qdsps/errors.hpp"
#include "qdsps/parallel.hpp"

namespace qdsps {

namespace {

using Vector9 = Eigen::Matrix<Complex, Eigen::Dynamic, 1, Eigen::ColMajor, 9, 1>;

constexpr double min_normalization = 1e-12;

std::vector<double> trapezoid_weights(const std::vector<double>& times) {
    std::vector<double> w(times.size(), 0.0);
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        const double h = 0.5 * (times[k + 1] - times[k]);
        w[k] += h;
        w[k + 1] += h;
    }
    return w;
}

void append_uniform(std::vector<double>& grid, double a, double b, double step) {
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / step - 1e-9)));
    const double h = (b - a) / static_cast<double>(n);
    for (std::size_t k = 1; k <= n; ++k) grid.push_back(k == n ? b : a + h * static_cast<double>(k));
}

// Product-trapezoid integral over the full square of the Hermitian extension
// of an upper-triangular table f[i][j - i].
template <class Value, class Fn>
double square_integral(const std::vector<double>& w, const std::vector<std::vector<Value>>& f, Fn&& value) {
    double total = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        double row = 0.5 * w[i] * value(f[i][0]);
        for (std::size_t d = 1; d < f[i].size(); ++d) row += w[i + d] * value(f[i][d]);
        total += 2.0 * w[i] * row;
    }
    return total;
}

double normalization(const CorrelationGrid& grid) {
    double n = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) n += grid.weights[i] * grid.g1[i][0].real();
    if (!(n >= min_normalization)) {
        throw UndefinedResultError("correlations: no emission to normalize by (photon number below 1e-12)");
    }
    return n;
}

// First-order Lorentzian filter y' = -lambda y + k x applied in place along a
// strided sequence sampled on `times`; x is linear between samples.
void lorentzian_pass(Complex* data, std::ptrdiff_t stride, const std::vector<double>& times, Complex lambda,
                     double k) {
    Complex y = 0.0;
    Complex x_prev = data[0];
    data[0] = y;
    for (std::size_t n = 0; n + 1 < times.size(); ++n) {
        const double h = times[n + 1] - times[n];
        Complex& slot = data[static_cast<std::ptrdiff_t>(n + 1) * stride];
        const Complex x_next = slot;
        const Complex e = std::exp(-lambda * h);
        const Complex one_minus = 1.0 - e;
        y = e * y + k * (x_prev * one_minus / lambda +
                         (x_next - x_prev) / h * (h / lambda - one_minus / (lambda * lambda)));
        slot = y;
        x_prev = x_next;
    }
}

}  // namespace

SpectralFilter SpectralFilter::from_bandwidth(double bandwidth_nm, double lambda0_nm) {
    return SpectralFilter{gamma_from_linewidth(bandwidth_nm, lambda0_nm)};
}

SolverContext make_context(const SourceModel& model, const ExcitationScheme& scheme, double area,
                           const CorrelationOptions& options) {
    SolverContext context;
    context.drive = make_drive(model, scheme, area);
    context.qd = model.qd;
    context.bath = model.bath;
    context.rho0 = ground_state(model.levels);
    context.options = options;
    return context;
}

double CorrelationGrid::photon_number() const {
    if (times.empty()) return 0.0;
    double integral = 0.0;
    for (std::size_t i = 0; i < size(); ++i) integral += weights[i] * population[i];
    return gamma * integral + population.back();
}

std::vector<double> correlation_time_grid(const SolverContext& context) {
    const auto& envelope = context.drive.envelope;
    if (envelope.empty()) throw DomainError("correlation_time_grid: drive has no envelope");
    if (!(context.qd.gamma > 0.0)) throw DomainError("correlation_time_grid: radiative rate must be positive");
    const auto& options = context.options;
    if (!(options.tau_window_lifetimes > 0.0)) {
        throw DomainError("correlation_time_grid: tau window must be positive");
    }
    const double fwhm = envelope.fwhm() > 0.0 ? envelope.fwhm() : envelope.end() - envelope.start();
    const double fine = std::isnan(options.fine_step) ? std::min(0.25, fwhm / 16.0) : options.fine_step;
    const double coarse =
        std::isnan(options.coarse_step) ? std::min(2.0, 0.05 / context.qd.gamma) : options.coarse_step;
    if (!(fine > 0.0) || !(coarse > 0.0)) throw DomainError("correlation_time_grid: steps must be positive");

    std::vector<double> grid{envelope.start()};
    append_uniform(grid, envelope.start(), envelope.end(), fine);
    append_uniform(grid, envelope.end(), envelope.end() + options.tau_window_lifetimes / context.qd.gamma,
                   coarse);
    return grid;
}

CorrelationGrid compute_correlations(const SolverContext& context) {
    return compute_correlations(context, correlation_time_grid(context));
}

CorrelationGrid compute_correlations(const SolverContext& context, std::vector<double> grid) {
    if (grid.size() < 2) throw DomainError("compute_correlations: need at least two grid times");
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (!(grid[k] > grid[k - 1])) throw DomainError("compute_correlations: grid must be strictly increasing");
    }
    const int levels = static_cast<int>(context.rho0.rows());
    const MasterEquation equation(context.drive, context.qd, context.bath, levels);
    const std::size_t m = grid.size();
    const auto& control = context.options.control;
    const unsigned jobs = context.options.jobs;

    // Transfer maps of every interval. Intervals after the drive has ended
    // share a constant generator, so equal lengths share one map.
    const double drive_end = context.drive.envelope.end();
    std::vector<SuperOperator> maps(m - 1);
    std::vector<IntegrationStats> map_stats(m - 1);
    std::vector<std::ptrdiff_t> reuse(m - 1, -1);
    {
        std::vector<std::pair<double, std::size_t>> free_lengths;
        for (std::size_t k = 0; k + 1 < m; ++k) {
            if (grid[k] < drive_end) continue;
            const double h = grid[k + 1] - grid[k];
            for (const auto& [length, owner] : free_lengths) {
                if (std::abs(length - h) <= 1e-12 * h) {
                    reuse[k] = static_cast<std::ptrdiff_t>(owner);
                    break;
                }
            }
            if (reuse[k] < 0) free_lengths.emplace_back(h, k);
        }
    }
    std::vector<std::size_t> owned;
    for (std::size_t k = 0; k + 1 < m; ++k) {
        if (reuse[k] < 0) owned.push_back(k);
    }
    parallel_for(owned.size(), jobs, [&](std::size_t n) {
        const std::size_t k = owned[n];
        maps[k] = propagator(equation, grid[k], grid[k + 1], control, &map_stats[k]);
    });
    for (std::size_t k = 0; k + 1 < m; ++k) {
        if (reuse[k] >= 0) maps[k] = maps[static_cast<std::size_t>(reuse[k])];
    }

    CorrelationGrid result;
    result.gamma = context.qd.gamma;
    result.pure_dephasing = context.qd.pure_dephasing;
    result.delta = context.drive.delta;
    result.pulse_start = context.drive.envelope.start();
    result.pulse_end = drive_end;
    result.pulse_fwhm = context.drive.envelope.fwhm();
    for (const auto& s : map_stats) result.stats += s;

    std::vector<Operator> rho(m);
    rho[0] = context.rho0;
    for (std::size_t k = 0; k + 1 < m; ++k) {
        rho[k + 1] = unvectorize(maps[k] * vectorize(rho[k]), levels);
    }

    const Operator lowering = equation.lowering();
    const Operator raising = lowering.adjoint();
    const double gamma = context.qd.gamma;
    result.g1.assign(m, {});
    result.g2.assign(m, {});
    result.population.resize(m);
    for (std::size_t i = 0; i < m; ++i) result.population[i] = rho[i](x_level, x_level).real();

    parallel_for(m, jobs, [&](std::size_t i) {
        auto& g1_row = result.g1[i];
        auto& g2_row = result.g2[i];
        g1_row.resize(m - i);
        g2_row.resize(m - i);
        Vector9 a = vectorize(lowering * rho[i]);
        Vector9 b = vectorize(lowering * rho[i] * raising);
        for (std::size_t j = i;; ++j) {
            // Tr[sigma+ A] = A(g, X); Tr[sigma+ sigma- B] = B(X, X).
            g1_row[j - i] = gamma * a(ground_level + levels * x_level);
            g2_row[j - i] = gamma * gamma * b(x_level + levels * x_level).real();
            if (j + 1 == m) break;
            a = maps[j] * a;
            b = maps[j] * b;
        }
    });
    result.times = std::move(grid);
    result.weights = trapezoid_weights(result.times);
    return result;
}

PurityResult purity_from_grid(const CorrelationGrid& grid, const std::optional<SpectralFilter>& etalon) {
    const double n = normalization(grid);
    const double coincidences = square_integral(grid.weights, grid.g2, [](double v) { return v; });
    PurityResult result;
    result.g2_zero = coincidences / (n * n);
    if (etalon) {
        result.g2_zero *= etalon_g2_suppression(*etalon, grid.gamma, grid.pure_dephasing, grid.pulse_fwhm);
    }
    result.purity = 1.0 - result.g2_zero;
    return result;
}

IndistinguishabilityResult indistinguishability_from_grid(const CorrelationGrid& grid,
                                                          const std::optional<SpectralFilter>& etalon) {
    IndistinguishabilityResult result;
    if (!etalon) {
        const double n = normalization(grid);
        const double overlap = square_integral(grid.weights, grid.g1, [](Complex v) { return std::norm(v); });
        result.m_s = overlap / (n * n);
    } else {
        if (!(etalon->fwhm > 0.0)) throw DomainError("etalon: filter width must be positive");
        const std::size_t m = grid.size();
        const auto stride = static_cast<std::ptrdiff_t>(m);
        // Full Hermitian matrix C(a, b) = gamma <sigma+(s_b) sigma-(s_a)>, column-major.
        std::vector<Complex> c(m * m);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t d = 0; d < grid.g1[i].size(); ++d) {
                c[i + (i + d) * m] = grid.g1[i][d];
                c[(i + d) + i * m] = std::conj(grid.g1[i][d]);
            }
        }
        const double k = 0.5 * etalon->fwhm;
        const Complex lambda(k, -grid.delta);
        for (std::size_t b = 0; b < m; ++b) lorentzian_pass(c.data() + b * m, 1, grid.times, lambda, k);
        for (std::size_t a = 0; a < m; ++a) lorentzian_pass(c.data() + a, stride, grid.times, std::conj(lambda), k);
        double n = 0.0;
        double overlap = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            n += grid.weights[a] * c[a + a * m].real();
            double row = 0.0;
            for (std::size_t b = 0; b < m; ++b) row += grid.weights[b] * std::norm(c[a + b * m]);
            overlap += grid.weights[a] * row;
        }
        if (!(n >= min_normalization)) {
            throw UndefinedResultError("correlations: no filtered emission to normalize by");
        }
        result.m_s = overlap / (n * n);
    }
    const double g2 = purity_from_grid(grid, etalon).g2_zero;
    result.v_hom = hom_from_ms(result.m_s, g2);
    return result;
}

PurityResult regression_g2(const SolverContext& context) {
    return purity_from_grid(compute_correlations(context), context.options.etalon);
}

IndistinguishabilityResult regression_ms(const SolverContext& context) {
    return indistinguishability_from_grid(compute_correlations(context), context.options.etalon);
}

SourceFigures figures_of_merit(const SolverContext& context) {
    const auto grid = compute_correlations(context);
    SourceFigures figures;
    figures.photons = grid.photon_number();
    figures.purity = purity_from_grid(grid, context.options.etalon);
    figures.indistinguishability = indistinguishability_from_grid(grid, context.options.etalon);
    return figures;
}

double ms_from_hom(double v_hom, double g2) {
    if (!std::isfinite(v_hom) || !std::isfinite(g2)) throw DomainError("ms_from_hom: inputs must be finite");
    if (g2 >= 1.0) throw DomainError("ms_from_hom: g2 must be below 1");
    return (v_hom + g2) / (1.0 - g2);
}

double hom_from_ms(double m_s, double g2) { return m_s * (1.0 - g2) - g2; }

double etalon_g2_suppression(const SpectralFilter& etalon, double gamma, double pure_dephasing,
                             double pulse_fwhm) {
    if (!(etalon.fwhm > 0.0)) throw DomainError("etalon: filter width must be positive");
    if (!(pulse_fwhm > 0.0)) throw DomainError("etalon: pulse duration must be positive");
    const double line = gamma + 2.0 * pure_dephasing;
    const double pulse_width = 4.0 * std::log(2.0) / pulse_fwhm;
    const double main = etalon.fwhm / (etalon.fwhm + line);
    const double re_excited = etalon.fwhm / (etalon.fwhm + line + pulse_width);
    return re_excited / main;
}

void write_correlation_csv(std::ostream& out, const CorrelationGrid& grid) {
    CsvWriter csv(out);
    csv.header({"t_ps", "tau_ps", "re_g1", "im_g1", "g2"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t d = 0; d < grid.g1[i].size(); ++d) {
            csv.field(grid.times[i]).field(grid.times[i + d] - grid.times[i]);
            csv.field(grid.g1[i][d].real()).field(grid.g1[i][d].imag()).field(grid.g2[i][d]);
            csv.end_row();
        }
    }
}

void write_statistics_report(std::ostream& out, const SourceFigures& figures) {
    out << "photons=" << format_number(figures.photons) << '\n'
        << "g2_zero=" << format_number(figures.purity.g2_zero) << '\n'
        << "purity=" << format_number(figures.purity.purity) << '\n'
        << "m_s=" << format_number(figures.indistinguishability.m_s) << '\n'
        << "v_hom=" << format_number(figures.indistinguishability.v_hom) << '\n';
}

}  // namespace qdsps
