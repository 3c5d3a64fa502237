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
#include <vector>

#include <doctest.h>

#include "lindblad_fixtures.hpp"
#include "qdsps/errors.hpp"
#include "qdsps/experiment.hpp"
#include "qdsps/lindblad.hpp"
#include "support.hpp"

using namespace qdsps;

namespace {

constexpr double pi = constants::pi;

void check_physical(const StateTrajectory& trajectory) {
    for (const Operator& rho : trajectory.rho) {
        REQUIRE(std::abs(rho.trace() - Complex(1.0)) < 1e-8);
        REQUIRE(min_eigenvalue(rho) > -1e-9);
        REQUIRE((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
    }
}

SourceModel lossless_model(double fwhm) {
    SourceModel model;
    model.qd.gamma = 0.0;
    model.qd.pure_dephasing = 0.0;
    model.bath.alpha = 0.0;
    model.pulse.fwhm_ps = fwhm;
    return model;
}

}  // namespace

TEST_SUITE("lindblad-dynamics") {

TEST_CASE("phonon rates") {
    PhononBathParams bath;
    bath.alpha = 0.05;
    bath.omega_b = 1.5;
    bath.temperature_K = 7.0;
    const auto none = phonon_rates(0.0, 1.0, bath);
    CHECK(none.gamma_down == 0.0);
    CHECK(none.gamma_up == 0.0);
    const auto degenerate = phonon_rates(0.0, 0.0, bath);
    CHECK(degenerate.gamma_down == 0.0);
    CHECK(degenerate.lambda_gen == 0.0);

    // Detailed balance and ordering over a spread of drives.
    auto gen = test::rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        bath.temperature_K = 1.0 + 30.0 * u(gen);
        const double omega = 3.0 * u(gen) + 1e-3;
        const double delta = -2.0 + 4.0 * u(gen);
        const auto r = phonon_rates(omega, delta, bath);
        const double lambda = std::hypot(omega, delta);
        CHECK(r.lambda_gen == doctest::Approx(lambda).epsilon(1e-15));
        CHECK(r.gamma_down >= r.gamma_up);
        CHECK(r.gamma_up >= 0.0);
        CHECK(r.gamma_up / r.gamma_down == doctest::Approx(std::exp(-lambda / bath.kT_rate())).epsilon(1e-12));
    }

    // Zero-temperature limit.
    bath.temperature_K = 1e-3;
    const auto cold = phonon_rates(1.2, 0.9, bath);
    const double lambda = std::hypot(1.2, 0.9);
    CHECK(cold.gamma_up < 1e-300);
    CHECK(cold.gamma_down ==
          doctest::Approx(0.5 * pi * (1.2 / lambda) * (1.2 / lambda) * bath.spectral_density(lambda))
              .epsilon(1e-12));
}

TEST_CASE("dressed-state rates of the generator match the two-level closed form") {
    PhononBathParams bath;
    bath.alpha = 0.05;
    bath.omega_b = 1.5;
    bath.temperature_K = 7.0;
    DriveHamiltonian drive;
    drive.delta = 0.9;
    drive.envelope = make_gaussian_pulse(5.0, pi, 0.9, 30.0);
    const MasterEquation equation(drive, QDParams{}, bath, 2);
    const auto g = equation.snapshot(1.3);
    const auto r = phonon_rates(1.3, 0.9, bath);
    CHECK(g.rates(0, 1) == doctest::Approx(r.gamma_down).epsilon(1e-12));
    CHECK(g.rates(1, 0) == doctest::Approx(r.gamma_up).epsilon(1e-12));
    // Blue detuning: the lower dressed state is the exciton-rich one.
    CHECK(std::norm(g.dressed_basis(x_level, 0)) > 0.5);
}

TEST_CASE("free decay") {
    QDParams qd = QDParams::from_profile(SampleProfile::A);
    qd.pure_dephasing = 0.0;
    DriveHamiltonian drive;
    drive.envelope = PulseEnvelope::piecewise_constant({0.0, 5.0 / qd.gamma}, {0.0}, 0.0);
    EvolveOptions options;
    options.output_dt = 1.0;
    const auto trajectory = evolve(drive, qd, PhononBathParams{}, excited_state(2), options);
    check_physical(trajectory);
    for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
        CHECK(std::abs(trajectory.populations[k] - std::exp(-qd.gamma * trajectory.times[k])) < 1e-6);
    }
    CHECK(trajectory.times.back() == doctest::Approx(5.0 / qd.gamma));
    CHECK(occupation_at_end(trajectory) == doctest::Approx(std::exp(-5.0)).epsilon(1e-5));
}

TEST_CASE("lossless resonant pi pulse") {
    const auto model = lossless_model(5.0);
    const auto drive = make_drive(model, ExcitationScheme::resonant(), pi);
    const auto trajectory = evolve(drive, model.qd, model.bath, ground_state(2));
    check_physical(trajectory);
    CHECK(std::abs(occupation_at_end(trajectory) - 1.0) < 1e-6);
    CHECK(std::abs(occupation_after_pulse(model, ExcitationScheme::resonant(), pi) - 1.0) < 1e-6);
}

TEST_CASE("constant drive matches the superoperator exponential") {
    for (int levels : {2, 3}) {
        CAPTURE(levels);
        test::PiecewiseCase c;
        c.model.levels = levels;
        c.model.delta = 0.7;
        c.model.gamma = 0.02;
        c.model.gamma_d = 0.01;
        c.model.alpha = 0.06;
        c.model.omega_b = 1.5;
        c.model.kT = 0.9;
        c.model.fss = levels == 3 ? 0.05 : 0.0;
        c.model.angle = levels == 3 ? 0.4 : 0.0;
        c.bounds = {0.0, 1.5};
        c.values = {1.1};
        c.rho0 = oracle::Mat::Zero(levels, levels);
        c.rho0(0, 0) = 1.0;
        CHECK(test::oracle_deviation(c) < 1e-8);
    }
}

TEST_CASE("random piecewise-constant drives match the superoperator exponentials") {
    auto gen = test::rng(2026);
    for (int k = 0; k < 10; ++k) {
        const int levels = k < 5 ? 2 : 3;
        const auto c = test::random_case(levels, gen);
        CAPTURE(k);
        CHECK(test::oracle_deviation(c) < 1e-8);
    }
}

TEST_CASE("trajectories stay physical") {
    const Config config = test::sample_b();
    SourceModel model = make_source_model(config);
    const double delta = detuning_rate_from_wavelength(0.6, model.qd.transition_wavelength_nm);
    std::vector<StateTrajectory> set;
    set.push_back(evolve(make_drive(model, ExcitationScheme::resonant(), pi), model.qd, model.bath,
                         ground_state(2)));
    set.push_back(evolve(make_drive(model, ExcitationScheme::phonon(delta), 10.0 * pi), model.qd,
                         model.bath, ground_state(2)));
    set.push_back(evolve(make_drive(model, ExcitationScheme::phonon(-delta), 10.0 * pi), model.qd,
                         model.bath, ground_state(2)));
    SourceModel three = model;
    three.levels = 3;
    three.qd.fss_ueV = 10.0;
    three.polarization_angle = 0.3;
    set.push_back(evolve(make_drive(three, ExcitationScheme::phonon(delta), 8.0 * pi), three.qd, three.bath,
                         ground_state(3)));
    SourceModel tophat = model;
    tophat.pulse.shape = PulseShape::tophat;
    tophat.pulse.fwhm_ps = 10.0;
    set.push_back(evolve(make_drive(tophat, ExcitationScheme::phonon(delta), 6.0 * pi), tophat.qd,
                         tophat.bath, ground_state(2)));
    for (const auto& trajectory : set) check_physical(trajectory);
}

TEST_CASE("emission probability") {
    SourceModel model;
    model.qd = QDParams::from_profile(SampleProfile::A);
    model.qd.pure_dephasing = 0.0;
    model.bath.alpha = 0.0;
    model.pulse.fwhm_ps = 2.0;
    const double single = emission_after_pulse(model, ExcitationScheme::resonant(), pi);
    CHECK(single == doctest::Approx(1.0).epsilon(2e-3));
    // Re-excitation after an early decay inside the pulse can add a second
    // photon; its probability is of order gamma * fwhm.
    CHECK(single - 1.0 < model.qd.gamma * model.pulse.fwhm_ps);
    CHECK(emission_after_pulse(model, ExcitationScheme::resonant(), 0.0) == 0.0);

    // A long phonon-assisted pulse re-excites the dot: more than one photon.
    const Config config = test::sample_b();
    SourceModel longer = make_source_model(config);
    longer.pulse.fwhm_ps = 25.0;
    const double delta = detuning_rate_from_wavelength(0.4, longer.qd.transition_wavelength_nm);
    const double many = emission_after_pulse(longer, ExcitationScheme::phonon(delta), 20.0 * pi);
    CHECK(many > single);
    CHECK(many > occupation_after_pulse(longer, ExcitationScheme::phonon(delta), 20.0 * pi));

    // A window that stops inside the pulse is flagged.
    const auto drive = make_drive(model, ExcitationScheme::resonant(), pi);
    EvolveOptions options;
    options.t_end = 0.0;
    const auto cut = evolve(drive, model.qd, model.bath, ground_state(2), options);
    CHECK(emission_probability(cut, model.qd.gamma).window_short);
}

TEST_CASE("resonant Rabi curve") {
    const auto model = lossless_model(2.0);
    const std::vector<double> areas{pi, 2.0 * pi, 3.0 * pi};
    const auto curve = excitation_curve(areas, ExcitationScheme::resonant(), model);
    REQUIRE(curve.size() == 3);
    CHECK(curve[0].occupation == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(curve[1].occupation < 1e-6);
    CHECK(curve[2].occupation == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("phonon-assisted curve rises monotonically at first") {
    const Config config = test::sample_b();
    const SourceModel model = make_source_model(config);
    const auto scheme = laser_scheme(config);
    CHECK(scheme.delta > 0.0);
    std::vector<double> areas;
    for (int k = 0; k <= 24; ++k) areas.push_back(0.25 * pi * k);
    const auto curve = excitation_curve(areas, scheme, model);
    CHECK(curve.front().occupation == 0.0);
    for (std::size_t k = 1; k < curve.size(); ++k) CHECK(curve[k].occupation >= curve[k - 1].occupation);
}

TEST_CASE("blue detuning prepares the exciton, red does not") {
    const Config config = test::sample_b();
    SourceModel model = make_source_model(config);
    model.bath.temperature_K = 0.5;
    const double delta = detuning_rate_from_wavelength(0.6, model.qd.transition_wavelength_nm);
    const double blue = emission_after_pulse(model, ExcitationScheme::phonon(delta), 12.0 * pi);
    const double red = emission_after_pulse(model, ExcitationScheme::phonon(-delta), 12.0 * pi);
    CHECK(blue > 0.5);
    CHECK(red < 0.2 * blue);
}

TEST_CASE("zero detuning through the phonon path is the resonant curve") {
    for (double alpha : {0.0, 0.0563042545}) {
        Config config = test::sample_b();
        config.bath.alpha = alpha;
        config.laser.detuning_nm = 0.0;
        const SourceModel model = make_source_model(config);
        const std::vector<double> areas{0.5 * pi, pi, 2.0 * pi, 3.5 * pi};
        const auto via_config = excitation_curve(areas, laser_scheme(config), model);
        const auto phonon = excitation_curve(areas, ExcitationScheme::phonon(0.0), model);
        const auto resonant = excitation_curve(areas, ExcitationScheme::resonant(), model);
        for (std::size_t k = 0; k < areas.size(); ++k) {
            CHECK(via_config[k].occupation == resonant[k].occupation);
            CHECK(phonon[k].occupation == resonant[k].occupation);
        }
    }
}

TEST_CASE("solver failures carry diagnostics") {
    const auto model = lossless_model(5.0);
    DriveHamiltonian drive;
    drive.envelope = PulseEnvelope::piecewise_constant(std::vector<double>{0.0, 100.0}, std::vector<double>{1.0}, 0.0);
    EvolveOptions options;
    options.control.max_steps = 3;
    try {
        evolve(drive, model.qd, model.bath, ground_state(2), options);
        FAIL("expected an integration error");
    } catch (const IntegrationError& e) {
        CHECK(std::string(e.what()).find("steps") != std::string::npos);
    }
    Operator bad = ground_state(2);
    bad(0, 0) = 2.0;
    CHECK_THROWS_AS(evolve(drive, model.qd, model.bath, bad), DomainError);
}

TEST_CASE("trajectory csv") {
    const auto model = lossless_model(5.0);
    EvolveOptions options;
    options.output_dt = 5.0;
    const auto trajectory =
        evolve(make_drive(model, ExcitationScheme::resonant(), pi), model.qd, model.bath, ground_state(2), options);
    std::ostringstream out;
    write_trajectory_csv(out, trajectory);
    CHECK(out.str().rfind("time_ps,p_e,re_coh,im_coh\n", 0) == 0);
}

}  // TEST_SUITE
