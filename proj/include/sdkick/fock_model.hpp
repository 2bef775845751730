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
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sdkick/envelope.hpp"
#include "sdkick/errors.hpp"
#include "sdkick/integrator.hpp"
#include "sdkick/kick_model.hpp"
#include "sdkick/trap.hpp"

namespace sdkick {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Ladder operators and functions of the position quadrature X = a + a^dagger on the
/// Fock levels 0..m_max-1. Functions of X are built from the eigendecomposition of the
/// truncated X, so they are exactly unitary/Hermitian in the truncated space.
class FockOperators {
   public:
    FockOperators(int m_max, double eta) : m_max_(m_max), eta_(eta) {
        if (m_max < 2) throw ConfigError("Fock cutoff must be >= 2");
        const auto m = static_cast<Eigen::Index>(m_max);
        x_ = RealMatrix::Zero(m, m);
        for (Eigen::Index k = 0; k + 1 < m; ++k) {
            x_(k, k + 1) = x_(k + 1, k) = std::sqrt(static_cast<double>(k + 1));
        }
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(x_);
        vecs_ = es.eigenvectors();
        vals_ = es.eigenvalues();
        const Eigen::VectorXd arg = 2.0 * eta * vals_;
        kick_cos_ = vecs_ * arg.array().cos().matrix().asDiagonal() * vecs_.transpose();
        kick_sin_ = vecs_ * arg.array().sin().matrix().asDiagonal() * vecs_.transpose();
        const RealMatrix x2 = x_ * x_;
        x2_diag_.resize(m);
        x2_off2_.resize(m > 2 ? m - 2 : 0);
        for (Eigen::Index k = 0; k < m; ++k) x2_diag_(k) = x2(k, k);
        for (Eigen::Index k = 0; k + 2 < m; ++k) x2_off2_(k) = x2(k, k + 2);
    }

    int m_max() const { return m_max_; }
    double eta() const { return eta_; }
    const RealMatrix& x() const { return x_; }
    /// cos(2 eta X) and sin(2 eta X); D(+-2 i eta) = cos(2 eta X) +- i sin(2 eta X).
    const RealMatrix& kick_cos() const { return kick_cos_; }
    const RealMatrix& kick_sin() const { return kick_sin_; }

    /// exp(-i s f(X)) for a real function f, via the eigenbasis of X.
    template <class F>
    ComplexMatrix exp_of_x(double s, F&& f) const {
        ComplexVector ph(vals_.size());
        for (Eigen::Index k = 0; k < vals_.size(); ++k) ph(k) = std::polar(1.0, -s * f(vals_(k)));
        return vecs_.cast<cplx>() * ph.asDiagonal() * vecs_.transpose().cast<cplx>();
    }

    /// D(alpha) = exp(alpha a^dagger - alpha^* a), exponentiating the truncated generator.
    ComplexMatrix displacement(cplx alpha) const {
        const auto m = static_cast<Eigen::Index>(m_max_);
        // i (alpha a^dag - alpha^* a) is Hermitian; D = exp(-i H) with H = i (alpha a^dag - alpha^* a).
        ComplexMatrix h = ComplexMatrix::Zero(m, m);
        for (Eigen::Index k = 0; k + 1 < m; ++k) {
            const double s = std::sqrt(static_cast<double>(k + 1));
            h(k + 1, k) = cplx(0, 1) * alpha * s;
            h(k, k + 1) = cplx(0, -1) * std::conj(alpha) * s;
        }
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
        ComplexVector ph(m);
        for (Eigen::Index k = 0; k < m; ++k) ph(k) = std::polar(1.0, -es.eigenvalues()(k));
        return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    }

    /// out += c * X^2 in (X^2 is pentadiagonal with only even offsets).
    void add_x2(std::span<const cplx> in, std::span<cplx> out, cplx c) const {
        const auto m = static_cast<size_t>(m_max_);
        for (size_t k = 0; k < m; ++k) {
            cplx acc = x2_diag_(static_cast<Eigen::Index>(k)) * in[k];
            if (k + 2 < m) acc += x2_off2_(static_cast<Eigen::Index>(k)) * in[k + 2];
            if (k >= 2) acc += x2_off2_(static_cast<Eigen::Index>(k - 2)) * in[k - 2];
            out[k] += c * acc;
        }
    }

   private:
    int m_max_;
    double eta_;
    RealMatrix x_;
    RealMatrix vecs_;
    Eigen::VectorXd vals_;
    RealMatrix kick_cos_;
    RealMatrix kick_sin_;
    Eigen::VectorXd x2_diag_;
    Eigen::VectorXd x2_off2_;
};

/// Closed-form coherent amplitudes e^{-|alpha|^2/2} alpha^m / sqrt(m!).
inline ComplexVector coherent_state(cplx alpha, int m_max) {
    ComplexVector v(m_max);
    cplx term = std::exp(-0.5 * std::norm(alpha));
    for (int m = 0; m < m_max; ++m) {
        v(m) = term;
        term *= alpha / std::sqrt(static_cast<double>(m + 1));
    }
    return v;
}

/// Spin times truncated Fock-space state; index s * m_max + m.
class FockState {
   public:
    explicit FockState(int m_max) : m_max_(m_max), coeffs_(2 * static_cast<size_t>(m_max)) {
        if (m_max < 2) throw ConfigError("Fock cutoff must be >= 2");
    }

    static FockState ground(int m_max) {
        FockState s(m_max);
        s.at(0, 0) = 1.0;
        return s;
    }

    int m_max() const { return m_max_; }
    cplx& at(int spin, int m) { return coeffs_[static_cast<size_t>(spin * m_max_ + m)]; }
    cplx at(int spin, int m) const { return coeffs_[static_cast<size_t>(spin * m_max_ + m)]; }
    StateVector& coeffs() { return coeffs_; }
    const StateVector& coeffs() const { return coeffs_; }
    std::span<const cplx> spin_block(int spin) const {
        return std::span<const cplx>(coeffs_).subspan(static_cast<size_t>(spin * m_max_), static_cast<size_t>(m_max_));
    }
    std::span<cplx> spin_block(int spin) {
        return std::span<cplx>(coeffs_).subspan(static_cast<size_t>(spin * m_max_), static_cast<size_t>(m_max_));
    }

    double norm() const { return norm_squared(coeffs_); }
    double spin_population(int spin) const { return norm_squared(spin_block(spin)); }

    /// Probability in the top 10% of Fock levels (at least one level), both spins.
    double tail_mass() const {
        const int top = std::max(1, (m_max_ + 9) / 10);
        double p = 0.0;
        for (int s = 0; s < 2; ++s) {
            for (int m = m_max_ - top; m < m_max_; ++m) p += std::norm(at(s, m));
        }
        return p;
    }

    /// <spin, motion| psi> for a motional vector given in the Fock basis.
    cplx overlap(int spin, const ComplexVector& motion) const {
        cplx acc{};
        for (int m = 0; m < m_max_; ++m) acc += std::conj(motion(m)) * at(spin, m);
        return acc;
    }

   private:
    int m_max_;
    StateVector coeffs_;
};

inline constexpr double kFockTailGuard = 1e-8;

enum class MicromotionPhase { kApproximate, kExact };

/// Integrated RF phase factor over [t0, t0 + tau] in the frozen-secular limit.
/// Approximate: 2 cos(w t0 + phi + w tau/2) sin(w tau/2).
/// Exact: sin(w (t0+tau) + phi) - sin(w t0 + phi) - w tau q_z / 4.
inline double micromotion_phase(const TrapParams& trap, double t0, double tau,
                                MicromotionPhase kind = MicromotionPhase::kApproximate) {
    const double w = trap.omega_rf;
    if (kind == MicromotionPhase::kApproximate) {
        return 2.0 * std::cos(w * t0 + trap.phi_rf + 0.5 * w * tau) * std::sin(0.5 * w * tau);
    }
    return std::sin(w * (t0 + tau) + trap.phi_rf) - std::sin(w * t0 + trap.phi_rf) - w * tau * trap.q_z / 4.0;
}

/// Frozen-secular micromotion evolution exp[-i (w^2 / 16 ws) X^2 (2 q_z / w) theta_mm],
/// acting identically on both spin sectors.
class MicromotionPropagator {
   public:
    MicromotionPropagator(const TrapParams& trap, const FockOperators& ops, double t0, double tau,
                          MicromotionPhase kind = MicromotionPhase::kApproximate)
        : theta_mm_(micromotion_phase(trap, t0, tau, kind)) {
        const double ws = secular_frequency(trap);
        if (!(ws > 0.0)) throw ConfigError("micromotion propagator needs a positive secular frequency");
        strength_ = trap.omega_rf * trap.omega_rf / (16.0 * ws) * (2.0 * trap.q_z / trap.omega_rf) * theta_mm_;
        u_ = ops.exp_of_x(strength_, [](double x) { return x * x; });
    }

    double theta_mm() const { return theta_mm_; }
    /// Coefficient of X^2 in the exponent (without the -i).
    double strength() const { return strength_; }
    const ComplexMatrix& matrix() const { return u_; }

    FockState apply(const FockState& in) const {
        if (in.m_max() != u_.rows()) throw ConfigError("micromotion propagator and state cutoffs differ");
        FockState out(in.m_max());
        for (int s = 0; s < 2; ++s) {
            Eigen::Map<const ComplexVector> src(in.spin_block(s).data(), in.m_max());
            Eigen::Map<ComplexVector> dst(out.spin_block(s).data(), in.m_max());
            dst.noalias() = u_ * src;
        }
        if (out.tail_mass() > kFockTailGuard) {
            throw NumericalError("Fock cutoff inadequate after micromotion propagator: tail mass " +
                                 std::to_string(out.tail_mass()));
        }
        return out;
    }

   private:
    double theta_mm_;
    double strength_ = 0.0;
    ComplexMatrix u_;
};

/// Physical configuration of one kick in the Fock representation.
struct FockSetup {
    TrapParams trap;
    IonParams ion;
    Drive drive;
    ModelFlags flags{true, true, false};
    int m_max = 64;
};

/// Full interaction-picture Hamiltonian on spin times Fock space:
/// micromotion (w^2/16 ws)(e^{i ws t} a^dag + e^{-i ws t} a)^2 [2 q cos(w t + phi) - q^2/2]
/// plus forward and backward kicks with time-dependent displacements D(+-2 i eta e^{i ws t}).
/// With frozen_secular the e^{+-i ws t} phases are dropped.
class FockHamiltonian {
   public:
    explicit FockHamiltonian(FockSetup setup)
        : setup_(std::move(setup)), ops_(setup_.m_max, setup_.ion.eta), omega_s_(secular_frequency(setup_.trap)) {
        if (setup_.flags.include_micromotion && !(omega_s_ > 0.0)) {
            throw ConfigError("micromotion term needs a positive secular frequency (a_z + q_z^2/2 > 0)");
        }
        const auto m = static_cast<size_t>(setup_.m_max);
        rot_.resize(m);
        u_.resize(2 * m);
        cu_.resize(2 * static_cast<Eigen::Index>(m));
        su_.resize(2 * static_cast<Eigen::Index>(m));
    }

    const FockSetup& setup() const { return setup_; }
    const FockOperators& ops() const { return ops_; }
    double omega_s() const { return omega_s_; }

    double micromotion_coefficient(double t) const {
        const auto& tr = setup_.trap;
        return tr.omega_rf * tr.omega_rf / (16.0 * omega_s_) *
               (2.0 * tr.q_z * std::cos(tr.omega_rf * t + tr.phi_rf) - 0.5 * tr.q_z * tr.q_z);
    }

    /// out = H(t) psi. Not thread-safe: uses per-instance scratch buffers.
    void apply(std::span<const cplx> psi, std::span<cplx> out, double t) const {
        const int mm = setup_.m_max;
        const auto m = static_cast<size_t>(mm);
        std::fill(out.begin(), out.end(), cplx{});
        const double theta = setup_.flags.frozen_secular ? 0.0 : omega_s_ * t;
        for (size_t k = 0; k < m; ++k) rot_[k] = std::polar(1.0, theta * static_cast<double>(k));
        for (size_t k = 0; k < m; ++k) {
            u_[k] = std::conj(rot_[k]) * psi[k];
            u_[m + k] = std::conj(rot_[k]) * psi[m + k];
        }
        // Accumulate in the rotated frame, rotate back at the end.
        StateVector& acc = acc_;
        acc.assign(2 * m, cplx{});
        std::span<const cplx> u0(u_.data(), m), u1(u_.data() + m, m);
        std::span<cplx> a0(acc.data(), m), a1(acc.data() + m, m);

        if (setup_.flags.include_micromotion) {
            const double c = micromotion_coefficient(t);
            ops_.add_x2(u0, a0, c);
            ops_.add_x2(u1, a1, c);
        }

        const double g = 0.5 * setup_.drive.envelope.value(t);
        if (g != 0.0) {
            const auto& d = setup_.drive;
            const cplx ef = g * std::polar(1.0, (d.omega_a - d.raman_beat) * t);
            const cplx eb = g * std::polar(1.0, (d.omega_a + d.raman_beat) * t);
            Eigen::Map<const ComplexVector> v0(u0.data(), mm), v1(u1.data(), mm);
            const auto head = static_cast<Eigen::Index>(mm);
            cu_.head(head).noalias() = ops_.kick_cos() * v0;
            su_.head(head).noalias() = ops_.kick_sin() * v0;
            cu_.tail(head).noalias() = ops_.kick_cos() * v1;
            su_.tail(head).noalias() = ops_.kick_sin() * v1;
            const cplx i(0.0, 1.0);
            for (Eigen::Index k = 0; k < head; ++k) {
                const cplx dp0 = cu_(k) + i * su_(k);  // D+ u0
                const cplx dm0 = cu_(k) - i * su_(k);  // D- u0
                const cplx dp1 = cu_(head + k) + i * su_(head + k);
                const cplx dm1 = cu_(head + k) - i * su_(head + k);
                cplx to1 = ef * dp0;
                cplx to0 = std::conj(ef) * dm1;
                if (setup_.flags.include_backward) {
                    to1 += eb * dm0;
                    to0 += std::conj(eb) * dp1;
                }
                a1[static_cast<size_t>(k)] += to1;
                a0[static_cast<size_t>(k)] += to0;
            }
        }
        for (size_t k = 0; k < m; ++k) {
            out[k] = rot_[k] * acc[k];
            out[m + k] = rot_[k] * acc[m + k];
        }
    }

    void operator()(const StateVector& psi, StateVector& out, double t) const { apply(psi, out, t); }

   private:
    FockSetup setup_;
    FockOperators ops_;
    double omega_s_;
    mutable StateVector rot_;
    mutable StateVector u_;
    mutable StateVector acc_;
    mutable ComplexVector cu_;
    mutable ComplexVector su_;
};

/// H(t) psi in the Fock representation.
inline FockState full_fock_apply(const FockState& state, double t, const FockSetup& setup) {
    FockHamiltonian h(setup);
    FockState out(state.m_max());
    h.apply(state.coeffs(), out.coeffs(), t);
    return out;
}

struct FockRun {
    FockState state;
    PropagationStats stats;
    double tail_mass = 0.0;
};

/// Propagates over [t0, t1], splitting at envelope discontinuities. Throws NumericalError if
/// the final tail mass exceeds the cutoff guard.
inline FockRun evolve_fock(FockState state, const FockHamiltonian& h, double t0, double t1,
                           const PropagateOptions& opt = {}) {
    const auto cuts = h.setup().drive.envelope.breakpoints();
    FockRun run{std::move(state), {}, 0.0};
    run.stats = propagate_piecewise(run.state.coeffs(), h, t0, t1, cuts, opt);
    run.tail_mass = run.state.tail_mass();
    if (run.tail_mass > kFockTailGuard) {
        throw NumericalError("Fock cutoff " + std::to_string(h.setup().m_max) + " inadequate: tail mass " +
                             std::to_string(run.tail_mass));
    }
    return run;
}

/// One kick from |0> (spin) times the motional ground state over the whole envelope.
inline FockRun simulate_fock(const FockSetup& setup, const PropagateOptions& opt = {}) {
    FockHamiltonian h(setup);
    const auto& env = setup.drive.envelope;
    return evolve_fock(FockState::ground(setup.m_max), h, env.t_start(), env.t_end(), opt);
}

/// Coherent amplitude of the ideal forward kick, 2 i eta e^{i ws t_c} with t_c the envelope
/// centroid (interaction picture; the phase is dropped when the secular motion is frozen).
inline cplx fock_target_alpha(const FockSetup& setup) {
    const double ws = setup.flags.frozen_secular ? 0.0 : secular_frequency(setup.trap);
    return cplx(0.0, 2.0 * setup.ion.eta) * std::polar(1.0, ws * setup.drive.envelope.centroid());
}

/// 1 - |<1, alpha_target | psi>|^2.
inline double fock_infidelity(const FockState& s, cplx alpha) {
    return 1.0 - std::norm(s.overlap(1, coherent_state(alpha, s.m_max())));
}

}  // namespace sdkick
