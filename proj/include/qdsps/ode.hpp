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

// Adaptive Dormand-Prince 5(4) integrator with 4th-order dense output, for
// any Eigen matrix state. The state is advanced in place.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>

#include "qdsps/errors.hpp"

namespace qdsps {

struct StepControl {
    double abs_tol = 1e-10;   // per-entry absolute tolerance
    double rel_tol = 0.0;     // relative to max |y| of the step
    double initial_step = 0.02;
    double max_step = std::numeric_limits<double>::infinity();
    double min_step = 1e-12;
    std::size_t max_steps = 50'000'000;  // per advance() call, i.e. per drive segment
};

struct IntegrationStats {
    std::size_t steps = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evaluations = 0;

    IntegrationStats& operator+=(const IntegrationStats& other) {
        steps += other.steps;
        rejected += other.rejected;
        rhs_evaluations += other.rhs_evaluations;
        return *this;
    }
};

template <class State>
class DormandPrince {
public:
    explicit DormandPrince(StepControl control) : control_(control), h_(control.initial_step) {}

    const IntegrationStats& stats() const { return stats_; }
    double step_size() const { return h_; }

    /// Integrates y from t0 to t1. `rhs(t, y, dydt)` writes the derivative.
    /// `observe(t, y)` is called for every output time in (t0, t1], taken in
    /// order from [*next_output, output_end); next_output is advanced.
    template <class Rhs, class Observe>
    void advance(Rhs&& rhs, State& y, double t0, double t1, const double*& next_output,
                 const double* output_end, Observe&& observe) {
        if (!(t1 > t0)) return;
        double t = t0;
        double h = std::min(h_, control_.max_step);
        if (!fsal_valid_ || fsal_time_ != t0) {
            k1_.resizeLike(y);
            rhs(t, y, k1_);
            ++stats_.rhs_evaluations;
        }
        const double tiny = 1e-13 * std::max(1.0, std::abs(t1));
        std::size_t local_steps = 0;
        while (t < t1) {
            if (++local_steps > control_.max_steps) fail("maximum step count exceeded", t);
            double h_try = h;
            bool last = false;
            if (t + h_try >= t1 - tiny) {
                h_try = t1 - t;
                last = true;
            }
            const double t_next = last ? t1 : t + h_try;

            stage_ = y + h_try * (a21 * k1_);
            rhs(t + c2 * h_try, stage_, k2_);
            stage_ = y + h_try * (a31 * k1_ + a32 * k2_);
            rhs(t + c3 * h_try, stage_, k3_);
            stage_ = y + h_try * (a41 * k1_ + a42 * k2_ + a43 * k3_);
            rhs(t + c4 * h_try, stage_, k4_);
            stage_ = y + h_try * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
            rhs(t + c5 * h_try, stage_, k5_);
            stage_ = y + h_try * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
            rhs(t_next, stage_, k6_);
            y_new_ = y + h_try * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
            rhs(t_next, y_new_, k7_);
            stats_.rhs_evaluations += 6;

            const double scale =
                control_.abs_tol +
                control_.rel_tol * std::max(y.cwiseAbs().maxCoeff(), y_new_.cwiseAbs().maxCoeff());
            const double err =
                h_try *
                (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_).cwiseAbs().maxCoeff() /
                scale;
            if (!std::isfinite(err)) fail("non-finite error estimate", t);

            if (err <= 1.0) {
                ++stats_.steps;
                while (next_output != output_end && *next_output <= t_next) {
                    if (*next_output > t) {
                        if (*next_output == t_next) {
                            observe(*next_output, y_new_);
                        } else {
                            observe(*next_output, dense(y, h_try, (*next_output - t) / h_try));
                        }
                    }
                    ++next_output;
                }
                y.swap(y_new_);
                k1_.swap(k7_);
                t = t_next;
                const double factor =
                    err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                const double h_new = std::min(h_try * factor, control_.max_step);
                // A step shortened only to land on t1 says nothing against the
                // previous proposal.
                h = (last && h_try < h) ? std::max(h, h_new) : h_new;
            } else {
                ++stats_.rejected;
                h = h_try * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
                if (h < control_.min_step) fail("step size underflow", t);
            }
        }
        h_ = h;
        fsal_valid_ = true;
        fsal_time_ = t1;
    }

    /// Forget the cached derivative, e.g. after the state was modified externally.
    void reset() { fsal_valid_ = false; }

private:
    // Shampine's continuous extension for the Dormand-Prince pair.
    State dense(const State& y0, double h, double theta) const {
        const State r2 = y_new_ - y0;
        const State r3 = h * k1_ - r2;
        const State r4 = r2 - h * k7_ - r3;
        const State r5 = h * (d1 * k1_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ + d7 * k7_);
        return y0 + theta * (r2 + (1.0 - theta) * (r3 + theta * (r4 + (1.0 - theta) * r5)));
    }

    [[noreturn]] void fail(const char* what, double t) const {
        std::ostringstream msg;
        msg << "integration failed: " << what << " at t = " << t << " ps (steps " << stats_.steps
            << ", rejected " << stats_.rejected << ")";
        throw IntegrationError(msg.str());
    }

    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    StepControl control_;
    double h_;
    IntegrationStats stats_;
    bool fsal_valid_ = false;
    double fsal_time_ = 0.0;
    State k1_, k2_, k3_, k4_, k5_, k6_, k7_, stage_, y_new_;
};

}  // namespace qdsps
