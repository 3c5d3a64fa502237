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

// Qualitative trends of the measured device that the model is expected to
// reproduce. Where no numeric tolerance is implied, the one pinned here is
// given next to each check.

#include <algorithm>
#include <cmath>
#include <map>

#include <doctest.h>

#include "qdsps/experiment.hpp"
#include "support.hpp"

using namespace qdsps;

TEST_SUITE("device-trends") {

TEST_CASE("phonon-assisted curves at 0.4-0.8 nm nearly overlap") {
    Config config = test::sample_b();
    config.curves.points = 41;
    config.curves.detunings_nm = {0.4, 0.6, 0.8};
    const auto result = run_excitation_curves(config, 1);
    const auto detuning = result.column("detuning_nm");
    const auto area = result.column("area_pi");
    const auto normalized = result.column("normalized");
    // Largest spread between the detuned curves on the plateau (area >= 10 pi);
    // "nearly overlap" taken as a spread of at most 0.1 of the resonant maximum.
    std::map<double, std::pair<double, double>> range;
    for (std::size_t k = 0; k < detuning.size(); ++k) {
        if (detuning[k] == 0.0 || area[k] < 10.0) continue;
        auto [it, fresh] = range.try_emplace(area[k], normalized[k], normalized[k]);
        it->second.first = std::min(it->second.first, normalized[k]);
        it->second.second = std::max(it->second.second, normalized[k]);
    }
    double spread = 0.0;
    for (const auto& [a, mm] : range) spread = std::max(spread, mm.second - mm.first);
    MESSAGE("plateau spread between 0.4 and 0.8 nm curves: " << spread);
    CHECK(spread <= 0.1);
}

TEST_CASE("power scan shapes") {
    Config config = test::sample_b();
    config.powerscan.points = 9;  // P/P_max = 0, 0.5, ..., 4
    const auto result = run_power_scan(config, 1);
    const auto scheme = result.text_column("scheme");
    const auto ratio = result.column("p_over_pmax");
    const auto brightness = result.column("brightness");
    const auto g2 = result.column("g2");
    auto value = [&](const std::string& s, double r, const std::vector<double>& column) {
        for (std::size_t k = 0; k < scheme.size(); ++k) {
            if (scheme[k] == s && std::abs(ratio[k] - r) < 1e-12) return column[k];
        }
        FAIL("missing row");
        return 0.0;
    };
    // Resonant: Rabi oscillation past P_max (4 P_max is a 2 pi pulse).
    CHECK(value("resonant", 4.0, brightness) < 0.5 * value("resonant", 1.0, brightness));
    // Phonon-assisted: plateau, within 10% of the maximum up to 4 P_max.
    CHECK(value("phonon", 4.0, brightness) > 0.9 * value("phonon", 1.0, brightness));
    // Phonon-assisted g2 slightly decreases with power.
    MESSAGE("phonon g2 at 0.5, 1, 2 P_max: " << value("phonon", 0.5, g2) << ", " << value("phonon", 1.0, g2) << ", "
                                             << value("phonon", 2.0, g2));
    CHECK(value("phonon", 2.0, g2) < value("phonon", 0.5, g2));
}

TEST_CASE("figures-of-merit map trends") {
    const Config config = load_config(test::config_path("sample_a.ini"));
    const auto result = run_fom_map(config.map, config, 1);
    const auto tau = result.column("tau_ps");
    const auto detuning = result.column("delta_lambda_nm");
    const auto bfl = result.column("bfl");
    const auto g2 = result.column("g2");
    const auto ms = result.column("ms");
    const auto status = result.text_column("status");
    const std::size_t n = tau.size();
    REQUIRE(n == 25);

    // Brightness grows as the detuning shrinks, at every pulse duration.
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (tau[k] == tau[k + 1]) CHECK(bfl[k] > bfl[k + 1]);
    }
    // g2 larger at 25 ps than at 13 ps for every detuning.
    for (std::size_t k = 0; k < n; ++k) {
        if (tau[k] != 13.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (tau[j] == 25.0 && detuning[j] == detuning[k]) CHECK(g2[j] > g2[k]);
        }
    }
    // M_s nearly constant over the map.
    const auto [lo, hi] = std::minmax_element(ms.begin(), ms.end());
    MESSAGE("M_s over the map: " << *lo << " .. " << *hi);
    CHECK(*hi - *lo < 0.02);
    // M_s at the operating point (16 ps, 0.6 nm) in [0.90, 0.93].
    for (std::size_t k = 0; k < n; ++k) {
        if (tau[k] == 16.0 && detuning[k] == 0.6) {
            MESSAGE("M_s at 16 ps, 0.6 nm: " << ms[k] << " (status " << status[k] << ")");
            CHECK(ms[k] >= 0.90);
            CHECK(ms[k] <= 0.93);
        }
    }
}

}  // TEST_SUITE
