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

#include <cmath>
#include <optional>

#include "sdkick/errors.hpp"
#include "sdkick/units.hpp"

namespace sdkick {

/// Two collimated Raman beams along the trap axis. Each beam carries only sigma+/sigma-
/// components, parametrized by beta (left/right mix) and psi (their relative phase).
struct BeamPair {
    double beta1 = kPi / 4.0;
    double beta2 = -kPi / 4.0;
    double dpsi = 0.0;       // psi_1 - psi_2
    double dk = 0.0;         // (k_1)_z - (k_2)_z, 1/m
    double dphi_rate = 0.0;  // Raman beat, the phase difference is dphi_rate * t
    std::optional<double> detuning;  // single-photon detuning, rad/s

    /// Counter-propagating lin-perp-lin beams with wavenumber k each.
    static BeamPair lin_perp_lin(double k, double raman_beat, std::optional<double> detuning = {}) {
        BeamPair p;
        p.beta1 = kPi / 4.0;
        p.beta2 = -kPi / 4.0;
        p.dpsi = 0.0;
        p.dk = 2.0 * k;
        p.dphi_rate = raman_beat;
        p.detuning = detuning;
        p.validate();
        return p;
    }

    void validate() const {
        if (detuning && !(*detuning > 0.0)) throw ConfigError("beams.detuning must be positive");
        if (!std::isfinite(dphi_rate)) throw ConfigError("beams.raman_beat must be finite");
    }
};

struct InterferenceParams {
    double amp = 0.0;
    double gamma = 0.0;
    double a_comp = 0.0;
    double b_comp = 0.0;
};

inline InterferenceParams interference_params(const BeamPair& pair) {
    InterferenceParams p;
    p.a_comp = std::sin(pair.beta1) * std::sin(pair.beta2) * std::sin(pair.dpsi);
    p.b_comp = std::cos(pair.beta1) * std::cos(pair.beta2) -
               std::sin(pair.beta1) * std::sin(pair.beta2) * std::cos(pair.dpsi);
    p.amp = std::hypot(p.a_comp, p.b_comp);
    p.gamma = std::atan2(p.a_comp, p.b_comp);
    return p;
}

/// Two-photon Rabi frequency seen by an ion at position z and time t, given the
/// single-beam Rabi frequencies omega1 and omega2 (both >= 0).
inline double effective_rabi(const BeamPair& pair, double omega1, double omega2, double z, double t) {
    if (omega1 < 0.0 || omega2 < 0.0) throw ConfigError("single-beam Rabi frequencies must be >= 0");
    const auto ip = interference_params(pair);
    return omega1 * std::cos(2.0 * pair.beta1) + omega2 * std::cos(2.0 * pair.beta2) +
           2.0 * std::sqrt(omega1 * omega2) * ip.amp *
               std::cos(pair.dk * z - pair.dphi_rate * t - ip.gamma);
}

/// Upper bound on |effective_rabi| over all z and t.
inline double effective_rabi_bound(const BeamPair& pair, double omega1, double omega2) {
    const auto ip = interference_params(pair);
    return omega1 * std::abs(std::cos(2.0 * pair.beta1)) + omega2 * std::abs(std::cos(2.0 * pair.beta2)) +
           2.0 * std::sqrt(omega1 * omega2) * ip.amp;
}

struct HierarchyReport {
    double beat_ratio = 0.0;       // raman_beat / detuning
    double qubit_ratio = 0.0;      // omega_a / detuning
    double bandwidth_ratio = 0.0;  // envelope bandwidth / detuning
    bool beat_ok = true;
    bool qubit_ok = true;
    bool bandwidth_ok = true;
    double threshold = 0.01;
    /// The differential light shift is dropped from the model; this records that assumption.
    bool small_differential_light_shift_assumed = true;

    bool ok() const { return beat_ok && qubit_ok && bandwidth_ok; }
};

/// Checks the frequency hierarchy behind the rotating-wave and adiabatic-elimination steps:
/// every rate must be far below the single-photon detuning.
inline HierarchyReport validate_hierarchy(const BeamPair& pair, double envelope_bandwidth, double omega_a,
                                          double threshold = 0.01) {
    if (!pair.detuning) throw ConfigError("validate_hierarchy requires beams.detuning");
    const double det = *pair.detuning;
    HierarchyReport r;
    r.threshold = threshold;
    r.beat_ratio = std::abs(pair.dphi_rate) / det;
    r.qubit_ratio = std::abs(omega_a) / det;
    r.bandwidth_ratio = std::abs(envelope_bandwidth) / det;
    r.beat_ok = r.beat_ratio < threshold;
    r.qubit_ok = r.qubit_ratio < threshold;
    r.bandwidth_ok = r.bandwidth_ratio < threshold;
    return r;
}

}  // namespace sdkick
