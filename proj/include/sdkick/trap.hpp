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
#include <string>

#include "sdkick/errors.hpp"
#include "sdkick/units.hpp"

namespace sdkick {

/// RF drive and Mathieu parameters of the trap axis along the Raman beams.
struct TrapParams {
    double omega_rf = units::mhz(40.0);  // rad/s
    double phi_rf = 0.0;                 // rad
    double a_z = 0.0;
    double q_z = 0.0;

    /// a_z + q_z^2 / 2; negative means the trap does not confine.
    double stability() const { return a_z + 0.5 * q_z * q_z; }

    void validate() const {
        if (!(omega_rf > 0.0) || !std::isfinite(omega_rf)) {
            throw ConfigError("trap.rf_frequency must be positive");
        }
        if (!std::isfinite(a_z) || !std::isfinite(q_z) || !std::isfinite(phi_rf)) {
            throw ConfigError("trap parameters must be finite");
        }
        if (stability() < 0.0) {
            throw UnstableTrapError("unstable trap: a_z + q_z^2/2 = " + std::to_string(stability()) +
                                    " < 0");
        }
    }
};

/// Secular frequency omega_rf * sqrt(a_z + q_z^2/2) / 2.
inline double secular_frequency(const TrapParams& trap) {
    trap.validate();
    return trap.omega_rf * std::sqrt(trap.stability()) / 2.0;
}

/// Lamb-Dicke parameter k * sqrt(hbar / (2 m omega_s)) in SI units.
inline double lamb_dicke_from(double mass_kg, double wavenumber, double omega_s) {
    return wavenumber * std::sqrt(kHbar / (2.0 * mass_kg * omega_s));
}

struct IonParams {
    double omega_a = units::ghz(10.0);  // rad/s
    double eta = 0.1;
    std::optional<double> mass;  // kg
    std::optional<double> k;     // 1/m

    /// Builds the ion from mass and wavenumber, deriving eta at the given secular frequency.
    static IonParams from_mass(double omega_a, double mass_kg, double wavenumber, double omega_s) {
        if (!(mass_kg > 0.0) || !(wavenumber > 0.0) || !(omega_s > 0.0)) {
            throw ConfigError("mass, wavenumber and secular frequency must be positive to derive eta");
        }
        IonParams ion;
        ion.omega_a = omega_a;
        ion.mass = mass_kg;
        ion.k = wavenumber;
        ion.eta = lamb_dicke_from(mass_kg, wavenumber, omega_s);
        ion.validate(omega_s);
        return ion;
    }

    /// omega_s is only needed when mass and k are both present.
    void validate(std::optional<double> omega_s = std::nullopt) const {
        if (!(omega_a > 0.0) || !std::isfinite(omega_a)) {
            throw ConfigError("ion.qubit_frequency must be positive");
        }
        if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("ion.lamb_dicke must be positive");
        if (mass.has_value() != k.has_value()) {
            throw ConfigError("ion.mass and ion.wavenumber must be given together");
        }
        if (mass && k && omega_s) {
            const double derived = lamb_dicke_from(*mass, *k, *omega_s);
            if (std::abs(derived - eta) > 1e-12 * derived) {
                throw ConfigError("ion.lamb_dicke " + std::to_string(eta) +
                                  " disagrees with k sqrt(hbar/(2 m omega_s)) = " +
                                  std::to_string(derived));
            }
        }
    }
};

struct FastSdkReport {
    double omega_s_tau = 0.0;
    bool fast = true;
    /// omega_rf * tau * q_z / 4, the term dropped from the approximate micromotion phase.
    double micromotion_correction = 0.0;
    double threshold = 0.1;
};

/// Advisory check of the frozen-secular regime omega_s * tau << 1.
inline FastSdkReport validate_fast_sdk(const TrapParams& trap, double tau, double threshold = 0.1) {
    FastSdkReport r;
    r.threshold = threshold;
    r.omega_s_tau = secular_frequency(trap) * tau;
    r.fast = r.omega_s_tau < threshold;
    r.micromotion_correction = trap.omega_rf * tau * trap.q_z / 4.0;
    return r;
}

}  // namespace sdkick
