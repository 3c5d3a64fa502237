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

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <doctest.h>

#include "qdsps/errors.hpp"
#include "qdsps/experiment.hpp"
#include "support.hpp"

using namespace qdsps;

namespace {

constexpr double pi = constants::pi;

std::string csv_text(const SweepResult& result) {
    std::ostringstream out;
    write_sweep_csv(out, result);
    return out.str();
}

void check_local_optimum(const SourceModel& model, const ExcitationScheme& scheme, const SearchResult& found,
                         double rel_tol) {
    for (double factor : {0.95, 1.05}) {
        const double nearby = emission_point(model, scheme, factor * found.area).photons;
        CHECK(nearby <= found.emission * (1.0 + rel_tol));
    }
}

}  // namespace

TEST_SUITE("experiment-runner") {

TEST_CASE("inner search finds the resonant pi pulse") {
    SourceModel model;
    model.qd.gamma = 0.0;
    model.qd.pure_dephasing = 0.0;
    model.bath.alpha = 0.0;
    model.pulse.fwhm_ps = 3.0;
    const auto found = maximize_emission(model, ExcitationScheme::resonant(), resonant_search_lo,
                                         resonant_search_hi, 1e-3);
    CHECK(found.area == doctest::Approx(pi).epsilon(2e-3));
    CHECK(found.emission == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_FALSE(found.at_boundary);
    check_local_optimum(model, ExcitationScheme::resonant(), found, 1e-3);
    CHECK_THROWS_AS(maximize_emission(model, ExcitationScheme::resonant(), 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(maximize_emission(model, ExcitationScheme::resonant(), 2.0, 1.0), DomainError);
}

TEST_CASE("inner search optimality on the phonon plateau") {
    const Config config = test::sample_b();
    const SourceModel model = make_source_model(config);
    const auto scheme = laser_scheme(config);
    const auto found = maximize_emission(model, scheme, 0.5 * pi, 20.0 * pi, 1e-3);
    CHECK_FALSE(found.at_boundary);
    check_local_optimum(model, scheme, found, 1e-3);
}

TEST_CASE("search at the bracket edge is flagged") {
    const Config config = test::sample_b();
    const SourceModel model = make_source_model(config);
    const auto found = maximize_emission(model, laser_scheme(config), 0.5 * pi, 4.0 * pi, 1e-3);
    CHECK(found.at_boundary);
    CHECK(found.area == doctest::Approx(4.0 * pi).epsilon(1e-2));
}

TEST_CASE("bath calibration") {
    const Config config = test::sample_b();
    const auto record = calibrate_bath(0.85, config);
    CHECK(std::abs(record.achieved.ratio - 0.85) <= 1e-3);
    CHECK(record.scan.size() >= 3);
    CHECK(record.trace().rfind("alpha_ps2,ratio\n", 0) == 0);

    // Re-running the forward model with the calibrated coupling reproduces the target.
    SourceModel model = make_source_model(config);
    model.bath = record.bath;
    const auto again = plateau_ratio(model, laser_scheme(config), 0.5 * pi, 20.0 * pi);
    CHECK(std::abs(again.ratio - 0.85) <= 1e-3);

    // The plateau ratio rises with the coupling over the bracket.
    double previous = 0.0;
    for (double alpha : {0.005, 0.01, 0.02, 0.04, 0.08}) {
        model.bath.alpha = alpha;
        const double ratio = plateau_ratio(model, laser_scheme(config), 0.5 * pi, 20.0 * pi).ratio;
        CHECK(ratio > previous);
        previous = ratio;
    }
    // Without coupling only coherent, non-adiabatic excitation by the strongest
    // pulses remains: far below the phonon-assisted plateau.
    model.bath.alpha = 0.0;
    CHECK(plateau_ratio(model, laser_scheme(config), 0.5 * pi, 20.0 * pi).ratio < 0.25);
}

TEST_CASE("bath calibration failures") {
    Config config = test::sample_b();
    config.calibration.alpha_max = 0.004;
    try {
        calibrate_bath(0.85, config);
        FAIL("expected a calibration error");
    } catch (const CalibrationError& e) {
        CHECK(e.trace().rfind("alpha_ps2,ratio\n", 0) == 0);
        CHECK(std::count(e.trace().begin(), e.trace().end(), '\n') >= 2);
    }
    CHECK_THROWS_AS(calibrate_bath(1.0, config), DomainError);
    config.laser.detuning_nm = 0.0;
    CHECK_THROWS_AS(calibrate_bath(0.85, config), DomainError);
}

TEST_CASE("phonon-assisted preparation is robust to pulse area") {
    const Config config = test::sample_b();
    const auto r = robustness(make_source_model(config), laser_scheme(config), 0.5 * pi, 20.0 * pi);
    CHECK(r.resonant_slope > 0.0);
    CHECK(r.ratio() <= 0.2);
    CHECK_THROWS_AS(robustness(make_source_model(config), laser_scheme(config), 0.5 * pi, 20.0 * pi, 0.0),
                    DomainError);
}

TEST_CASE("excitation curves are normalized to the resonant maximum") {
    Config config = test::sample_b();
    config.curves.points = 17;
    config.curves.area_max_pi = 4.0;
    config.curves.detunings_nm = {0.6};
    const auto result = run_excitation_curves(config, 2);
    CHECK(result.columns ==
          std::vector<std::string>{"scheme", "detuning_nm", "area_pi", "input_power", "occupation", "normalized"});
    REQUIRE(result.rows.size() == 34);
    const auto scheme = result.text_column("scheme");
    const auto normalized = result.column("normalized");
    const auto power = result.column("input_power");
    double resonant_max = 0.0;
    for (std::size_t k = 0; k < result.rows.size(); ++k) {
        if (scheme[k] == "resonant") resonant_max = std::max(resonant_max, normalized[k]);
    }
    CHECK(resonant_max == 1.0);
    CHECK(normalized[17] == 0.0);  // phonon scheme at zero area
    CHECK(power[0] == 0.0);
    // Same intra-cavity area costs more power off resonance.
    CHECK(power[17 + 4] > power[4]);
}

TEST_CASE("power scan") {
    Config config = test::sample_b();
    config.powerscan.points = 5;
    const auto result = run_power_scan(config, 2);
    REQUIRE(result.rows.size() == 10);
    const auto brightness = result.column("brightness");
    const auto g2 = result.column("g2");
    const auto status = result.text_column("status");
    const auto ratio = result.column("p_over_pmax");
    for (std::size_t k : {std::size_t{0}, std::size_t{5}}) {
        CHECK(ratio[k] == 0.0);
        CHECK(brightness[k] == 0.0);
        CHECK(std::isnan(g2[k]));
        CHECK(status[k] == "no_emission");
    }
    for (std::size_t k = 1; k < 10; ++k) {
        if (k == 5) continue;
        CHECK(status[k] == "ok");
        CHECK(g2[k] >= 0.0);
        CHECK(brightness[k] <= config.cavity.eta_ext * 1.5);
    }
}

TEST_CASE("map rows follow the grid and failures are flagged") {
    Config config = test::sample_b();
    SweepSpec spec;
    spec.axes = {{"laser.pulse_fwhm_tau", {-1.0, 13.0}}, {"laser.detuning_delta_lambda", {0.5, 0.7}}};
    spec.metrics = {"occupation", "bfl"};
    const auto result = run_fom_map(spec, config, 2);
    CHECK(result.columns == std::vector<std::string>{"tau_ps", "delta_lambda_nm", "area_pi", "occupation", "bfl",
                                                     "status", "steps", "rejected"});
    REQUIRE(result.rows.size() == 4);
    const auto tau = result.column("tau_ps");
    const auto detuning = result.column("delta_lambda_nm");
    const auto status = result.text_column("status");
    CHECK(tau == std::vector<double>{-1.0, -1.0, 13.0, 13.0});
    CHECK(detuning == std::vector<double>{0.5, 0.7, 0.5, 0.7});
    CHECK(status[0] == "config_error");
    CHECK(status[1] == "config_error");
    CHECK(status[2] == "ok");
    CHECK(status[3] == "ok");
    const auto occupation = result.column("occupation");
    const auto bfl = result.column("bfl");
    CHECK(std::isnan(occupation[0]));
    CHECK(bfl[2] == doctest::Approx(config.cavity.eta_ext * occupation[2]).epsilon(1e-15));

    SweepSpec bad = spec;
    bad.axes.clear();
    CHECK_THROWS_AS(run_fom_map(bad, config), ConfigError);
}

TEST_CASE("map output does not depend on the job count") {
    const Config config = load_config(test::config_path("map_small.ini"));
    const auto one = csv_text(run_fom_map(config.map, config, 1));
    const auto many = csv_text(run_fom_map(config.map, config, 8));
    CHECK(one == many);
}

TEST_CASE("csv and manifest") {
    SweepResult r;
    r.columns = {"a", "b", "c"};
    r.rows = {{1.5, 2LL, std::string("ok")}, {std::nan(""), -3LL, std::string("x")}};
    CHECK(csv_text(r) == "a,b,c\n1.5,2,ok\nnan,-3,x\n");
    CHECK(r.column("b") == std::vector<double>{2.0, -3.0});
    CHECK_THROWS_AS(r.column("c"), DomainError);
    CHECK_THROWS_AS(r.column_index("d"), DomainError);

    RunManifest manifest;
    manifest.command = "map";
    manifest.config_hash = "0123456789abcdef";
    manifest.outputs = {"map.csv"};
    std::ostringstream out;
    write_manifest(out, manifest);
    CHECK(out.str().find("0123456789abcdef") != std::string::npos);
    CHECK(out.str().find("map.csv") != std::string::npos);
}

}  // TEST_SUITE
