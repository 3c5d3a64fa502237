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

#include <cmath>
#include <sstream>
#include <string>

#include <doctest.h>

#include "qdsps/config.hpp"
#include "qdsps/errors.hpp"
#include "support.hpp"

using namespace qdsps;

namespace {

Config parse(const std::string& text, const std::filesystem::path& base = {}) {
    std::istringstream in(text);
    return parse_config(in, base);
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults and profiles") {
    const Config a = parse("");
    CHECK(a.qd.gamma == doctest::Approx(gamma_from_linewidth(0.005, 924.8)));
    CHECK(a.bath.alpha == 0.03);
    CHECK(a.bath.omega_b == doctest::Approx(meV_to_rate(1.0)));
    CHECK(a.qd.fss_ueV == 0.0);
    const Config b = parse("[qd]\nprofile = B\n");
    CHECK(b.qd.gamma == doctest::Approx(gamma_from_linewidth(0.010, 924.8)));
    CHECK(b.bath.temperature_K == 7.0);
    CHECK_THROWS_AS(parse("[qd]\nprofile = C\n"), ConfigError);
}

TEST_CASE("every schema field is a key") {
    const Config c = parse(
        "[qd]\ntransition_wavelength = 930\nfss = 12\nradiative_rate_gamma = 0.02\npure_dephasing_rate = 0.001\n"
        "[cavity]\nlinewidth_kappa = 250\nmode_splitting = 30\nextraction_efficiency_eta_ext = 0.8\n"
        "[phonon]\ncoupling_alpha = 0.05\ncutoff_omega_b = 1.4\ntemperature = 4\n"
        "[laser]\ndetuning_delta_lambda = 0.7\npulse_fwhm_tau = 13\nrepetition_rate = 80\npulse_area_theta = 9\n");
    CHECK(c.qd.transition_wavelength_nm == 930.0);
    CHECK(c.qd.fss_ueV == 12.0);
    CHECK(c.qd.gamma == 0.02);
    CHECK(c.qd.pure_dephasing == 0.001);
    CHECK(c.cavity.kappa_ueV == 250.0);
    CHECK(c.cavity.mode_splitting_ueV == 30.0);
    CHECK(c.cavity.eta_ext == 0.8);
    CHECK(c.bath.alpha == 0.05);
    CHECK(c.bath.omega_b == 1.4);
    CHECK(c.bath.temperature_K == 4.0);
    CHECK(c.laser.detuning_nm == 0.7);
    CHECK(c.laser.fwhm_ps == 13.0);
    CHECK(c.laser.repetition_MHz == 80.0);
    CHECK(c.laser.area_pi == 9.0);
}

TEST_CASE("derived dot keys") {
    const Config c = parse("[qd]\nemission_bandwidth = 0.010\nindistinguishability = 0.9\n");
    CHECK(c.qd.gamma == doctest::Approx(gamma_from_linewidth(0.010, 924.8)));
    CHECK(c.qd.gamma / (c.qd.gamma + 2.0 * c.qd.pure_dephasing) == doctest::Approx(0.9));
    CHECK_THROWS_AS(parse("[qd]\nemission_bandwidth = 0.01\nradiative_rate_gamma = 0.1\n"), ConfigError);
}

TEST_CASE("unknown or malformed input is rejected") {
    CHECK_THROWS_AS(parse("[qd]\nlifetime = 91\n"), ConfigError);
    CHECK_THROWS_AS(parse("[detector]\neta0 = 0.7\n"), ConfigError);
    CHECK_THROWS_AS(parse("[laser]\npulse_fwhm_tau = sixteen\n"), ConfigError);
    CHECK_THROWS_AS(parse("[laser]\npulse_fwhm_tau = 16ps\n"), ConfigError);
    CHECK_THROWS_AS(parse("[laser]\npulse_fwhm_tau = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[cavity]\nextraction_efficiency_eta_ext = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse("[phonon]\ntemperature = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse("[pulse]\nshape = square\n"), ConfigError);
    CHECK_THROWS_AS(parse("[map]\naxis1 = laser.nonsense: 1 2\n"), ConfigError);
    CHECK_THROWS_AS(parse("[map]\nmetrics = g2 visibility\n"), ConfigError);
    CHECK_THROWS_AS(parse("[map]\nfixed = laser.nonsense=3\n"), ConfigError);
    CHECK_THROWS_AS(parse("[calibration]\ntarget_ratio = 1.2\n"), ConfigError);
    CHECK_THROWS_AS(parse("[budget]\nelement1 = lens, 1.3\n"), ConfigError);
    CHECK_THROWS_AS(parse("[budget]\nchain_csv = does_not_exist.csv\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/qdsps.ini"), ConfigError);
}

TEST_CASE("sweep and budget keys") {
    const Config c = parse(
        "[map]\naxis1 = laser.pulse_fwhm_tau: 13 25\naxis2 = laser.detuning_delta_lambda: 0.4 0.6 0.8\n"
        "metrics = g2 ms\nfixed = phonon.temperature=5 cavity.extraction_efficiency_eta_ext=0.7\n"
        "[budget]\nelement1 = lens, 0.8, 0.02\nelement2 = mirror, 0.95\ndetector_points = 0.5:0.75 6:0.69\n"
        "[curves]\ndetunings = 0.5 0.7\n");
    REQUIRE(c.map.axes.size() == 2);
    CHECK(c.map.axes[0].parameter == "laser.pulse_fwhm_tau");
    CHECK(c.map.axes[1].values == std::vector<double>{0.4, 0.6, 0.8});
    CHECK(c.map.metrics == std::vector<std::string>{"g2", "ms"});
    REQUIRE(c.map.fixed.size() == 2);
    CHECK(c.map.fixed[1].second == 0.7);
    REQUIRE(c.budget.chain.elements.size() == 2);
    CHECK(c.budget.chain.elements[1].uncertainty == 0.0);
    CHECK(c.budget.detector_points.size() == 2);
    CHECK(c.curves.detunings_nm == std::vector<double>{0.5, 0.7});
}

TEST_CASE("parameter access by name") {
    Config c;
    for (const auto& name : parameter_names()) {
        CHECK(is_parameter(name));
        CHECK_FALSE(parameter_label(name).empty());
    }
    set_parameter(c, "laser.pulse_fwhm_tau", 19.5);
    CHECK(c.laser.fwhm_ps == 19.5);
    CHECK(get_parameter(c, "laser.pulse_fwhm_tau") == 19.5);
    CHECK(parameter_label("laser.detuning_delta_lambda") == "delta_lambda_nm");
    CHECK_FALSE(is_parameter("laser.power"));
    CHECK_THROWS_AS(set_parameter(c, "laser.power", 1.0), ConfigError);
    CHECK_THROWS_AS(get_parameter(c, "laser.power"), ConfigError);
}

TEST_CASE("canonical text and hash") {
    const Config a = parse("[laser]\npulse_fwhm_tau = 16\n");
    const Config b = parse("; comment\n[laser]\npulse_fwhm_tau   =   16.0\n");
    CHECK(canonical_text(a) == canonical_text(b));
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    Config c = a;
    c.laser.fwhm_ps = 16.000000001;
    CHECK(config_hash(c) != config_hash(a));
}

TEST_CASE("shipped configs load") {
    const Config b = load_config(test::config_path("sample_b.ini"));
    CHECK(b.laser.fwhm_ps == 16.0);
    CHECK(b.bath.temperature_K == 7.0);
    const Config a = load_config(test::config_path("sample_a.ini"));
    CHECK(a.budget.chain.elements.size() == 7);
    CHECK(a.numerics.etalon_bandwidth_nm == 0.010);
    CHECK(a.map.axes.size() == 2);
    CHECK_NOTHROW(load_config(test::config_path("map_small.ini")));
}

TEST_CASE("model assembly") {
    Config c = parse("[laser]\ndetuning_delta_lambda = 0.6\n");
    CHECK(laser_scheme(c).delta == doctest::Approx(detuning_rate_from_wavelength(0.6, 924.8)));
    CHECK(scheme_for_detuning(c, 0.0).delta == 0.0);
    c.numerics.etalon_bandwidth_nm = 0.01;
    const auto options = correlation_options(c, 3);
    CHECK(options.jobs == 3u);
    REQUIRE(options.etalon.has_value());
    CHECK(options.etalon->fwhm == doctest::Approx(gamma_from_linewidth(0.01, 924.8)));
    c.numerics.etalon_bandwidth_nm = 0.0;
    CHECK_FALSE(correlation_options(c).etalon.has_value());
    const auto model = make_source_model(c);
    CHECK(model.qd.gamma == c.qd.gamma);
    CHECK(model.pulse.fwhm_ps == c.laser.fwhm_ps);
}

}  // TEST_SUITE
