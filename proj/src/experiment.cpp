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


#include "qdsps/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "qdsps/csv.hpp"
#include "qdsps/errors.hpp"
#include "qdsps/parallel.hpp"

namespace qdsps {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

double input_power(const Config& config, double area, double detuning_nm) {
    const double energy_ueV =
        1e3 * wavelength_detuning_to_energy(detuning_nm, config.qd.transition_wavelength_nm);
    return input_power_for_area(area, energy_ueV, config.cavity.kappa_ueV);
}

double optimum_lo(const Config& config, const ExcitationScheme& scheme) {
    return scheme.delta == 0.0 ? resonant_search_lo : config.map.area_min_pi * constants::pi;
}

double optimum_hi(const Config& config, const ExcitationScheme& scheme) {
    return scheme.delta == 0.0 ? resonant_search_hi : config.map.area_max_pi * constants::pi;
}

std::string status_of(const std::exception& e) {
    if (dynamic_cast<const IntegrationError*>(&e)) return "integration_error";
    if (dynamic_cast<const UndefinedResultError*>(&e)) return "undefined_result";
    if (dynamic_cast<const ConfigError*>(&e)) return "config_error";
    if (dynamic_cast<const DomainError*>(&e)) return "domain_error";
    return "numerical_error";
}

}  // namespace

EmissionPoint emission_point(const SourceModel& model, const ExcitationScheme& scheme, double area) {
    const auto drive = make_drive(model, scheme, area);
    EvolveOptions options = model.evolve;
    options.t_end = nan;
    const auto trajectory = evolve(drive, model.qd, model.bath, ground_state(model.levels), options);
    return {emission_probability(trajectory, model.qd.gamma).photons, trajectory.stats};
}

SearchResult maximize_emission(const SourceModel& model, const ExcitationScheme& scheme, double area_lo,
                               double area_hi, double rel_tol) {
    if (!(area_lo > 0.0 && area_hi > area_lo)) throw DomainError("maximize_emission: need 0 < area_lo < area_hi");
    if (!(rel_tol > 0.0)) throw DomainError("maximize_emission: tolerance must be positive");
    SearchResult result;
    auto objective = [&](double area) {
        const auto point = emission_point(model, scheme, area);
        ++result.evaluations;
        result.stats += point.stats;
        return -point.photons;
    };
    // brent_find_minima stops once the bracket is below ~2^(1 - bits) relative.
    const int bits = std::max(2, static_cast<int>(std::ceil(1.0 - std::log2(rel_tol))));
    std::uintmax_t max_iter = 200;
    const auto [area, value] = boost::math::tools::brent_find_minima(objective, area_lo, area_hi, bits, max_iter);
    result.area = area;
    result.emission = -value;
    const double edge = 2.0 * rel_tol * area;
    result.at_boundary = area - area_lo <= edge || area_hi - area <= edge;
    return result;
}

PlateauRatio plateau_ratio(const SourceModel& model, const ExcitationScheme& phonon, double area_lo,
                           double area_hi, double rel_tol) {
    const auto resonant =
        maximize_emission(model, ExcitationScheme::resonant(), resonant_search_lo, resonant_search_hi, rel_tol);
    const auto plateau = maximize_emission(model, phonon, area_lo, area_hi, rel_tol);
    if (!(resonant.emission > 0.0)) throw UndefinedResultError("plateau_ratio: resonant emission vanishes");
    return {plateau.emission / resonant.emission, plateau.emission, plateau.area, resonant.emission,
            resonant.area};
}

std::string CalibrationRecord::trace() const {
    std::ostringstream out;
    out << "alpha_ps2,ratio\n";
    for (const auto& [alpha, ratio] : scan) out << format_number(alpha) << ',' << format_number(ratio) << '\n';
    return out.str();
}

CalibrationRecord calibrate_bath(double target_ratio, const Config& config) {
    if (!(target_ratio > 0.0 && target_ratio < 1.0)) throw DomainError("calibrate_bath: target must lie in (0, 1)");
    const auto scheme = laser_scheme(config);
    if (scheme.delta == 0.0) throw DomainError("calibrate_bath: needs a detuned (phonon-assisted) laser");
    SourceModel model = make_source_model(config);
    const double lo_area = config.map.area_min_pi * constants::pi;
    const double hi_area = config.map.area_max_pi * constants::pi;
    const double tol = config.map.search_rel_tol;

    CalibrationRecord record;
    record.target = target_ratio;
    auto evaluate = [&](double alpha) {
        model.bath.alpha = alpha;
        const auto r = plateau_ratio(model, scheme, lo_area, hi_area, tol);
        record.scan.emplace_back(alpha, r.ratio);
        return r;
    };
    auto fail = [&](const std::string& why) { throw CalibrationError("calibrate_bath: " + why, record.trace()); };

    double a_lo = 0.0;
    double f_lo = evaluate(0.0).ratio - target_ratio;
    if (f_lo >= 0.0) fail("target already reached without phonon coupling");
    double a_hi = config.calibration.alpha_start;
    double f_hi = evaluate(a_hi).ratio - target_ratio;
    while (f_hi < 0.0) {
        if (a_hi >= config.calibration.alpha_max) fail("no bracket below alpha_max");
        a_lo = a_hi;
        f_lo = f_hi;
        a_hi = std::min(2.0 * a_hi, config.calibration.alpha_max);
        f_hi = evaluate(a_hi).ratio - target_ratio;
    }
    std::uintmax_t max_iter = 60;
    auto f = [&](double alpha) { return evaluate(alpha).ratio - target_ratio; };
    auto close_enough = [](double a, double b) { return std::abs(b - a) <= 1e-7 * std::max(std::abs(a), std::abs(b)); };
    const auto [x0, x1] = boost::math::tools::toms748_solve(f, a_lo, a_hi, f_lo, f_hi, close_enough, max_iter);
    // Pick the bracket end closer to the target and re-evaluate it last so
    // the record reflects exactly the returned bath.
    double best = x0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (const auto& [alpha, ratio] : record.scan) {
        if ((alpha == x0 || alpha == x1) && std::abs(ratio - target_ratio) < best_gap) {
            best = alpha;
            best_gap = std::abs(ratio - target_ratio);
        }
    }
    record.achieved = evaluate(best);
    if (!(std::abs(record.achieved.ratio - target_ratio) <= 1e-3)) fail("root finder did not reach 1e-3");
    record.bath = model.bath;
    return record;
}

RobustnessResult robustness(const SourceModel& model, const ExcitationScheme& phonon, double area_lo,
                            double area_hi, double window, std::size_t samples) {
    if (!(window > 0.0 && window < 1.0) || samples < 3) throw DomainError("robustness: bad window");
    auto mean_slope = [&](const ExcitationScheme& scheme, double center) {
        const double a = center * (1.0 - window);
        const double b = center * (1.0 + window);
        double variation = 0.0;
        double previous = 0.0;
        for (std::size_t k = 0; k < samples; ++k) {
            const double area = a + (b - a) * static_cast<double>(k) / static_cast<double>(samples - 1);
            const double value = emission_point(model, scheme, area).photons;
            if (k) variation += std::abs(value - previous);
            previous = value;
        }
        return variation / (b - a);
    };
    RobustnessResult result;
    result.resonant_area =
        maximize_emission(model, ExcitationScheme::resonant(), resonant_search_lo, resonant_search_hi).area;
    result.phonon_area = maximize_emission(model, phonon, area_lo, area_hi).area;
    result.resonant_slope = mean_slope(ExcitationScheme::resonant(), result.resonant_area);
    result.phonon_slope = mean_slope(phonon, result.phonon_area);
    return result;
}

// ---- tables -------------------------------------------------------------------

std::size_t SweepResult::column_index(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw DomainError("SweepResult: no column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> SweepResult::column(const std::string& name) const {
    const auto index = column_index(name);
    std::vector<double> values;
    values.reserve(rows.size());
    for (const auto& row : rows) {
        const Cell& cell = row[index];
        if (const auto* d = std::get_if<double>(&cell)) {
            values.push_back(*d);
        } else if (const auto* i = std::get_if<long long>(&cell)) {
            values.push_back(static_cast<double>(*i));
        } else {
            throw DomainError("SweepResult: column '" + name + "' is not numeric");
        }
    }
    return values;
}

std::vector<std::string> SweepResult::text_column(const std::string& name) const {
    const auto index = column_index(name);
    std::vector<std::string> values;
    for (const auto& row : rows) {
        const Cell& cell = row[index];
        if (const auto* s = std::get_if<std::string>(&cell)) {
            values.push_back(*s);
        } else if (const auto* d = std::get_if<double>(&cell)) {
            values.push_back(format_number(*d));
        } else {
            values.push_back(std::to_string(std::get<long long>(cell)));
        }
    }
    return values;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    CsvWriter csv(out);
    for (const auto& name : result.columns) csv.field(std::string_view(name));
    csv.end_row();
    for (const auto& row : result.rows) {
        for (const auto& cell : row) std::visit([&](const auto& v) { csv.field(v); }, cell);
        csv.end_row();
    }
}

SweepResult run_excitation_curves(const Config& config, unsigned jobs) {
    config.validate();
    const SourceModel model = make_source_model(config);
    std::vector<double> detunings{0.0};
    for (double d : config.curves.detunings_nm) {
        if (d != 0.0) detunings.push_back(d);
    }
    const std::size_t n = config.curves.points;
    std::vector<double> areas(n);
    for (std::size_t k = 0; k < n; ++k) {
        areas[k] = config.curves.area_max_pi * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    std::vector<double> emission(detunings.size() * n);
    parallel_for(emission.size(), jobs, [&](std::size_t task) {
        const double detuning = detunings[task / n];
        const double area = areas[task % n] * constants::pi;
        emission[task] = emission_point(model, scheme_for_detuning(config, detuning), area).photons;
    });
    const double resonant_max = *std::max_element(emission.begin(), emission.begin() + static_cast<std::ptrdiff_t>(n));
    if (!(resonant_max > 0.0)) throw UndefinedResultError("excitation curves: resonant curve is identically zero");

    SweepResult result;
    result.columns = {"scheme", "detuning_nm", "area_pi", "input_power", "occupation", "normalized"};
    for (std::size_t task = 0; task < emission.size(); ++task) {
        const double detuning = detunings[task / n];
        const double area = areas[task % n];
        result.rows.push_back({std::string(detuning == 0.0 ? "resonant" : "phonon"), detuning, area,
                               input_power(config, area * constants::pi, detuning), emission[task],
                               emission[task] / resonant_max});
    }
    return result;
}

SweepResult run_power_scan(const Config& config, unsigned jobs) {
    config.validate();
    const SourceModel model = make_source_model(config);
    const CorrelationOptions options = correlation_options(config, 1);
    std::vector<ExcitationScheme> schemes{ExcitationScheme::resonant()};
    const auto laser = laser_scheme(config);
    if (laser.delta != 0.0) schemes.push_back(laser);

    std::vector<double> optimum(schemes.size());
    parallel_for(schemes.size(), jobs, [&](std::size_t s) {
        optimum[s] = maximize_emission(model, schemes[s], optimum_lo(config, schemes[s]),
                                       optimum_hi(config, schemes[s]), config.map.search_rel_tol)
                         .area;
    });

    const std::size_t n = config.powerscan.points;
    struct Point {
        double area = 0.0, brightness = 0.0, g2 = nan;
        std::string status = "ok";
    };
    std::vector<Point> points(schemes.size() * n);
    parallel_for(points.size(), jobs, [&](std::size_t task) {
        const auto& scheme = schemes[task / n];
        const double ratio = config.powerscan.p_max_ratio * static_cast<double>(task % n) / static_cast<double>(n - 1);
        Point& p = points[task];
        p.area = optimum[task / n] * std::sqrt(ratio);
        try {
            p.brightness = config.cavity.eta_ext * emission_point(model, scheme, p.area).photons;
            if (p.area > 0.0) {
                const auto grid = compute_correlations(make_context(model, scheme, p.area, options));
                p.g2 = purity_from_grid(grid, options.etalon).g2_zero;
            } else {
                p.status = "no_emission";
            }
        } catch (const NumericalError& e) {
            p.status = status_of(e);
        }
    });

    SweepResult result;
    result.columns = {"scheme", "p_over_pmax", "area_pi", "brightness", "g2", "status"};
    for (std::size_t task = 0; task < points.size(); ++task) {
        const auto& scheme = schemes[task / n];
        const double ratio = config.powerscan.p_max_ratio * static_cast<double>(task % n) / static_cast<double>(n - 1);
        const auto& p = points[task];
        result.rows.push_back({std::string(scheme.delta == 0.0 ? "resonant" : "phonon"), ratio,
                               p.area / constants::pi, p.brightness, p.g2, p.status});
    }
    return result;
}

SweepResult run_fom_map(const SweepSpec& spec, const Config& config, unsigned jobs) {
    spec.validate();
    std::size_t total = 1;
    for (const auto& axis : spec.axes) total *= axis.values.size();

    struct Row {
        std::vector<double> axis_values;
        double area = nan;
        double occupation = nan, g2 = nan, ms = nan, bfl = nan;
        std::string status = "ok";
        IntegrationStats stats;
    };
    const bool want_stats = std::find_if(spec.metrics.begin(), spec.metrics.end(), [](const std::string& m) {
                                return m == "g2" || m == "ms";
                            }) != spec.metrics.end();
    std::vector<Row> rows(total);
    parallel_for(total, jobs, [&](std::size_t index) {
        Row& row = rows[index];
        Config point = config;
        for (const auto& [name, value] : spec.fixed) set_parameter(point, name, value);
        std::size_t rest = index;
        row.axis_values.resize(spec.axes.size());
        for (std::size_t a = spec.axes.size(); a-- > 0;) {
            const auto& values = spec.axes[a].values;
            row.axis_values[a] = values[rest % values.size()];
            rest /= values.size();
        }
        try {
            for (std::size_t a = 0; a < spec.axes.size(); ++a) {
                set_parameter(point, spec.axes[a].parameter, row.axis_values[a]);
            }
            point.validate();
            const SourceModel model = make_source_model(point);
            const auto scheme = laser_scheme(point);
            const double lo = scheme.delta == 0.0 ? resonant_search_lo : spec.area_min_pi * constants::pi;
            const double hi = scheme.delta == 0.0 ? resonant_search_hi : spec.area_max_pi * constants::pi;
            const auto search = maximize_emission(model, scheme, lo, hi, spec.search_rel_tol);
            row.area = search.area;
            row.stats += search.stats;
            row.occupation = search.emission;
            row.bfl = point.cavity.eta_ext * search.emission;
            if (search.at_boundary) row.status = "search_at_bound";
            if (want_stats) {
                const auto options = correlation_options(point, 1);
                const auto grid = compute_correlations(make_context(model, scheme, search.area, options));
                row.stats += grid.stats;
                const auto purity = purity_from_grid(grid, options.etalon);
                row.g2 = purity.g2_zero;
                row.ms = indistinguishability_from_grid(grid, options.etalon).m_s;
            }
        } catch (const ConfigError& e) {
            row.status = status_of(e);
        } catch (const DomainError& e) {
            row.status = status_of(e);
        } catch (const NumericalError& e) {
            row.status = status_of(e);
        }
    });

    SweepResult result;
    for (const auto& axis : spec.axes) result.columns.push_back(parameter_label(axis.parameter));
    result.columns.push_back("area_pi");
    for (const auto& m : spec.metrics) result.columns.push_back(m);
    result.columns.insert(result.columns.end(), {"status", "steps", "rejected"});
    for (const auto& row : rows) {
        std::vector<Cell> cells(row.axis_values.begin(), row.axis_values.end());
        cells.emplace_back(row.area / constants::pi);
        for (const auto& m : spec.metrics) {
            if (m == "occupation") cells.emplace_back(row.occupation);
            if (m == "g2") cells.emplace_back(row.g2);
            if (m == "ms") cells.emplace_back(row.ms);
            if (m == "bfl") cells.emplace_back(row.bfl);
        }
        cells.emplace_back(row.status);
        cells.emplace_back(static_cast<long long>(row.stats.steps));
        cells.emplace_back(static_cast<long long>(row.stats.rejected));
        result.rows.push_back(std::move(cells));
    }
    return result;
}

void write_manifest(std::ostream& out, const RunManifest& manifest) {
    out << "tool=qdsps\n"
        << "command=" << manifest.command << '\n'
        << "config=" << manifest.config_path << '\n'
        << "config_hash=" << manifest.config_hash << '\n'
        << "phonon.coupling_alpha=" << format_number(manifest.bath.alpha, 17) << '\n'
        << "phonon.cutoff_omega_b=" << format_number(manifest.bath.omega_b, 17) << '\n'
        << "phonon.temperature=" << format_number(manifest.bath.temperature_K, 17) << '\n';
    if (manifest.calibration) {
        const auto& c = *manifest.calibration;
        out << "calibration.target_ratio=" << format_number(c.target) << '\n'
            << "calibration.alpha=" << format_number(c.bath.alpha, 17) << '\n'
            << "calibration.ratio=" << format_number(c.achieved.ratio) << '\n'
            << "calibration.plateau_area_pi=" << format_number(c.achieved.plateau_area / constants::pi) << '\n'
            << "calibration.resonant_max=" << format_number(c.achieved.resonant_max) << '\n'
            << "calibration.evaluations=" << c.scan.size() << '\n';
    } else {
        out << "calibration=none\n";
    }
    for (const auto& output : manifest.outputs) out << "output=" << output << '\n';
}

}  // namespace qdsps
