// Copyright 2026 The sdkick Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "sdkick/errors.hpp"

namespace sdkick {

using cplx = std::complex<double>;
using StateVector = std::vector<cplx>;

inline constexpr double kLocalErrorFraction = 0.01;

struct PropagateOptions {
    double rtol = 1e-12;
    double atol = 1e-14;
    double min_step = 1e-18;  // s
    double max_step = 0.0;    // s, 0 means unbounded
};

struct PropagationStats {
    size_t steps = 0;
    size_t rejected = 0;
    double norm_drift = 0.0;  // |<psi|psi>(t1) - <psi|psi>(t0)|

    PropagationStats& operator+=(const PropagationStats& o) {
        steps += o.steps;
        rejected += o.rejected;
        norm_drift += o.norm_drift;
        return *this;
    }
};

inline double norm_squared(std::span<const cplx> psi) {
    double n = 0.0;
    for (const auto& c : psi) n += std::norm(c);
    return n;
}

/// Integrates i d(psi)/dt = H(t) psi from t0 to t1 with an adaptive embedded
/// Runge-Kutta-Fehlberg 7(8) pair. rtol/atol bound the global error of the amplitudes. `apply_h(psi, out, t)` must write H(t) psi into out.
/// H(t) must be smooth on (t0, t1); split at discontinuities with propagate_piecewise.
template <class ApplyH>
PropagationStats propagate(StateVector& psi, ApplyH&& apply_h, double t0, double t1,
                           const PropagateOptions& opt = {}) {
    namespace odeint = boost::numeric::odeint;
    if (t1 < t0) throw NumericalError("propagate: t1 < t0");
    if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw NumericalError("propagate: tolerances must be positive");
    PropagationStats stats;
    if (t1 == t0) return stats;

    const double n0 = norm_squared(psi);
    auto system = [&apply_h](const StateVector& x, StateVector& dxdt, double t) {
        apply_h(x, dxdt, t);
        for (auto& v : dxdt) v = cplx(v.imag(), -v.real());  // multiply by -i
    };
    using Base = odeint::runge_kutta_fehlberg78<StateVector>;
    using Checker = odeint::default_error_checker<double, Base::algebra_type, Base::operations_type>;
    // Local error is held at 1% of the requested tolerance and measured against |x| only,
    // so the error accumulated over the O(10^3) steps of a kick stays below rtol.
    odeint::controlled_runge_kutta<Base> stepper(
        Checker(kLocalErrorFraction * opt.atol, kLocalErrorFraction * opt.rtol, 1.0, 0.0));

    double t = t0;
    const double span = t1 - t0;
    double dt = span / 64.0;
    if (opt.max_step > 0.0) dt = std::min(dt, opt.max_step);
    while (t < t1) {
        if (t + dt > t1) dt = t1 - t;
        const double t_before = t;
        if (stepper.try_step(system, psi, t, dt) == odeint::success) {
            ++stats.steps;
            if (t == t_before) break;  // dt below the resolution of t
            if (opt.max_step > 0.0) dt = std::min(dt, opt.max_step);
            if (t1 - t <= 1e-15 * span) break;
        } else {
            ++stats.rejected;
        }
        if (dt < opt.min_step) {
            throw NumericalError("propagate: step size underflow (" + std::to_string(dt) + " s) at t = " +
                                 std::to_string(t) + " s");
        }
    }
    stats.norm_drift = std::abs(norm_squared(psi) - n0);
    return stats;
}

/// propagate() split at the given breakpoints, restarting step control at each one.
template <class ApplyH>
PropagationStats propagate_piecewise(StateVector& psi, ApplyH&& apply_h, double t0, double t1,
                                     std::span<const double> breakpoints, const PropagateOptions& opt = {}) {
    std::vector<double> cuts{t0};
    for (double b : breakpoints) {
        if (b > t0 && b < t1) cuts.push_back(b);
    }
    cuts.push_back(t1);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    PropagationStats stats;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        stats += propagate(psi, apply_h, cuts[i], cuts[i + 1], opt);
    }
    return stats;
}

}  // namespace sdkick
