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
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "sdkick/envelope.hpp"
#include "sdkick/errors.hpp"
#include "sdkick/integrator.hpp"

namespace sdkick {

/// Which terms of the interaction-picture Hamiltonian are switched on.
struct ModelFlags {
    bool include_micromotion = false;
    bool include_backward = true;
    bool frozen_secular = true;
};

/// Laser-side description of one kick: envelope, qubit splitting and Raman beat.
struct Drive {
    Envelope envelope = Envelope::sine(kPi, units::ns(5.0));
    double omega_a = units::ghz(10.0);
    double raman_beat = units::ghz(10.0);
};

/// Spin times momentum-ladder state. Ladder index n labels the momentum kick 2 n hbar k,
/// i.e. the displaced state |s, 2 i n eta> in the frozen-secular limit.
class KickState {
   public:
    explicit KickState(int n_max) : n_max_(n_max), coeffs_(2 * static_cast<size_t>(2 * n_max + 1)) {
        if (n_max < 1) throw ConfigError("kick ladder cutoff must be >= 1");
    }

    static KickState ground(int n_max) {
        KickState s(n_max);
        s.at(0, 0) = 1.0;
        return s;
    }

    int n_max() const { return n_max_; }
    size_t rungs() const { return static_cast<size_t>(2 * n_max_ + 1); }
    size_t index(int spin, int n) const { return static_cast<size_t>(spin) * rungs() + static_cast<size_t>(n + n_max_); }

    cplx& at(int spin, int n) { return coeffs_[index(spin, n)]; }
    cplx at(int spin, int n) const { return coeffs_[index(spin, n)]; }
    double population(int spin, int n) const { return std::norm(at(spin, n)); }

    StateVector& coeffs() { return coeffs_; }
    const StateVector& coeffs() const { return coeffs_; }

    double norm() const { return norm_squared(coeffs_); }

    /// Largest amplitude on the outermost rungs n = +-n_max.
    double edge_amplitude() const {
        double m = 0.0;
        for (int s = 0; s < 2; ++s) {
            m = std::max({m, std::abs(at(s, -n_max_)), std::abs(at(s, n_max_))});
        }
        return m;
    }

   private:
    int n_max_;
    StateVector coeffs_;
};

/// Frozen-secular Hamiltonian on the kick ladder:
/// (Omega_0/2)[L+ s+ e^{i(wa-dw)t} + L- s- e^{-i(wa-dw)t}] plus, with backward kicks,
/// (Omega_0/2)[L+ s- e^{-i(wa+dw)t} + L- s+ e^{i(wa+dw)t}], L+- shifting n by +-1.
class KickHamiltonian {
   public:
    KickHamiltonian(Drive drive, ModelFlags flags, int n_max)
        : drive_(std::move(drive)), flags_(flags), n_max_(n_max) {
        if (!flags_.frozen_secular) {
            throw ConfigError("the kick-ladder model requires frozen_secular = true; use the Fock model");
        }
    }

    const Drive& drive() const { return drive_; }
    const ModelFlags& flags() const { return flags_; }

    /// out = H(t) psi.
    void apply(std::span<const cplx> psi, std::span<cplx> out, double t) const {
        std::fill(out.begin(), out.end(), cplx{});
        const double g = 0.5 * drive_.envelope.value(t);
        if (g == 0.0) return;
        const int rungs = 2 * n_max_ + 1;
        const cplx ef = g * std::polar(1.0, (drive_.omega_a - drive_.raman_beat) * t);
        const cplx eb = g * std::polar(1.0, (drive_.omega_a + drive_.raman_beat) * t);
        const cplx* p0 = psi.data();
        const cplx* p1 = psi.data() + rungs;
        cplx* o0 = out.data();
        cplx* o1 = out.data() + rungs;
        for (int i = 0; i < rungs; ++i) {
            if (i > 0) o1[i] += ef * p0[i - 1];
            if (i + 1 < rungs) o0[i] += std::conj(ef) * p1[i + 1];
            if (flags_.include_backward) {
                if (i + 1 < rungs) o1[i] += eb * p0[i + 1];
                if (i > 0) o0[i] += std::conj(eb) * p1[i - 1];
            }
        }
    }

    void operator()(const StateVector& psi, StateVector& out, double t) const { apply(psi, out, t); }

   private:
    Drive drive_;
    ModelFlags flags_;
    int n_max_;
};

/// H(t) psi for the kick ladder; the derivative of the state is -i times this.
inline KickState kick_hamiltonian_apply(const KickState& state, double t, const Drive& drive,
                                        const ModelFlags& flags) {
    KickHamiltonian h(drive, flags, state.n_max());
    KickState out(state.n_max());
    h.apply(state.coeffs(), out.coeffs(), t);
    return out;
}

struct KickRun {
    KickState state;
    PropagationStats stats;
    double edge_amplitude = 0.0;
    bool truncated = false;  // edge amplitude above the 1e-12 guard
};

inline constexpr double kKickTruncationGuard = 1e-12;

/// Propagates `state` from t0 to t1 under the kick Hamiltonian. Intervals where the
/// envelope vanishes are skipped exactly, since H is zero there.
inline KickRun evolve_kick(KickState state, const KickHamiltonian& h, double t0, double t1,
                           const PropagateOptions& opt = {}) {
    KickRun run{std::move(state), {}, 0.0, false};
    for (const auto& [a, b] : h.drive().envelope.active_intervals()) {
        const double lo = std::max(a, t0);
        const double hi = std::min(b, t1);
        if (hi <= lo) continue;
        run.stats += propagate(run.state.coeffs(), h, lo, hi, opt);
    }
    run.edge_amplitude = run.state.edge_amplitude();
    run.truncated = run.edge_amplitude > kKickTruncationGuard;
    return run;
}

/// One complete kick from the ground state |0, 0> over the whole envelope.
inline KickRun simulate_kick(const Drive& drive, const ModelFlags& flags, int n_max = 6,
                             const PropagateOptions& opt = {}) {
    KickHamiltonian h(drive, flags, n_max);
    return evolve_kick(KickState::ground(n_max), h, drive.envelope.t_start(), drive.envelope.t_end(), opt);
}

/// 1 - |<1, +1|psi>|^2, the forward-kicked target on the ladder.
inline double kick_infidelity(const KickState& s) { return 1.0 - s.population(1, 1); }

}  // namespace sdkick
