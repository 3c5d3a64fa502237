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

// Random piecewise-constant drive instances shared by the oracle tests.

#include <random>
#include <vector>

#include "../oracles/liouvillian.hpp"
#include "qdsps/lindblad.hpp"

namespace qdsps::test {

struct PiecewiseCase {
    oracle::Model model;
    std::vector<double> bounds;
    std::vector<double> values;
    oracle::Mat rho0;

    QDParams qd() const {
        QDParams qd;
        qd.gamma = model.gamma;
        qd.pure_dephasing = model.gamma_d;
        qd.fss_ueV = rate_to_ueV(model.fss);
        return qd;
    }
    PhononBathParams bath() const {
        PhononBathParams bath;
        bath.alpha = model.alpha;
        bath.omega_b = model.omega_b;
        bath.temperature_K = model.kT * constants::hbar_meV_ps / constants::boltzmann_meV_per_K;
        return bath;
    }
    DriveHamiltonian drive() const {
        DriveHamiltonian d;
        d.delta = model.delta;
        d.envelope = PulseEnvelope::piecewise_constant(bounds, values, model.delta);
        d.polarization_angle = model.angle;
        return d;
    }
    Operator initial() const {
        Operator rho(model.levels, model.levels);
        for (int i = 0; i < model.levels; ++i)
            for (int j = 0; j < model.levels; ++j) rho(i, j) = rho0(i, j);
        return rho;
    }
};

/// Random unit-trace positive state: A A^dagger / tr.
inline oracle::Mat random_state(int n, std::mt19937_64& gen) {
    std::normal_distribution<double> normal;
    oracle::Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = {normal(gen), normal(gen)};
    oracle::Mat rho = a * a.adjoint();
    return rho / rho.trace();
}

inline PiecewiseCase random_case(int levels, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PiecewiseCase c;
    auto& m = c.model;
    m.levels = levels;
    m.delta = -1.5 + 3.0 * u(gen);
    m.gamma = 0.05 * u(gen);
    m.gamma_d = 0.05 * u(gen);
    m.alpha = 0.1 * u(gen);
    m.omega_b = 0.8 + 1.2 * u(gen);
    m.kT = (2.0 + 18.0 * u(gen)) * constants::boltzmann_meV_per_K / constants::hbar_meV_ps;
    if (levels == 3) {
        m.fss = 0.02 + 0.2 * u(gen);
        m.angle = 0.1 + 1.3 * u(gen);
    }
    const int segments = 3 + static_cast<int>(4.0 * u(gen));
    c.bounds.push_back(0.0);
    for (int k = 0; k < segments; ++k) {
        c.bounds.push_back(c.bounds.back() + 0.5 + 4.5 * u(gen));
        c.values.push_back(-2.0 + 4.0 * u(gen));
    }
    c.rho0 = random_state(levels, gen);
    return c;
}

/// Max-norm deviation between the adaptive solver and the exponential oracle
/// at every segment boundary.
inline double oracle_deviation(const PiecewiseCase& c, const StepControl& control = {}) {
    const MasterEquation equation(c.drive(), c.qd(), c.bath(), c.model.levels);
    Operator state = c.initial();
    std::vector<double> outputs(c.bounds.begin() + 1, c.bounds.end());
    std::vector<Operator> states;
    propagate(equation, state, c.bounds.front(), c.bounds.back(), outputs,
              [&](double, const Operator& rho) { states.push_back(rho); }, control);
    double worst = 0.0;
    oracle::Vec v = oracle::vec(c.rho0);
    for (std::size_t k = 0; k < c.values.size(); ++k) {
        v = (oracle::liouvillian(c.model, c.values[k]) * (c.bounds[k + 1] - c.bounds[k])).exp() * v;
        const oracle::Mat expected = oracle::unvec(v, c.model.levels);
        for (int i = 0; i < c.model.levels; ++i)
            for (int j = 0; j < c.model.levels; ++j)
                worst = std::max(worst, std::abs(states.at(k)(i, j) - expected(i, j)));
    }
    return worst;
}

}  // namespace qdsps::test
