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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <boost/math/tools/roots.hpp>

#include "sdkick/errors.hpp"
#include "sdkick/fock_model.hpp"
#include "sdkick/gauge.hpp"
#include "sdkick/integrator.hpp"
#include "sdkick/kick_model.hpp"

using namespace sdkick;

namespace {

constexpr double kTau = 5e-9;
const double kOmegaA = units::ghz(10.0);

Drive constant_drive(double theta = kPi, double tau = kTau, double beat_ratio = 1.0) {
    return Drive{Envelope::constant(theta, tau), kOmegaA, beat_ratio * kOmegaA};
}

ModelFlags kick_flags(bool backward = true) { return ModelFlags{false, backward, true}; }

TrapParams operating_trap(double phi = 0.0) {
    TrapParams t;
    t.omega_rf = units::mhz(33.64);
    t.phi_rf = phi;
    t.q_z = 0.15;
    return t;
}

IonParams ion(double eta = 0.1) {
    IonParams i;
    i.omega_a = kOmegaA;
    i.eta = eta;
    return i;
}

}  // namespace

// Integrator.

TEST(Propagate, ZeroHamiltonianLeavesStateUnchanged) {
    StateVector psi{cplx(0.6, 0.0), cplx(0.0, 0.8)};
    const auto before = psi;
    auto h = [](const StateVector&, StateVector& out, double) { std::fill(out.begin(), out.end(), cplx{}); };
    propagate(psi, h, 0.0, 1e-6);
    EXPECT_EQ(psi, before);
}

TEST(Propagate, TwoLevelRabiOscillation) {
    const double g = 2.0e8;
    StateVector psi{1.0, 0.0};
    auto h = [g](const StateVector& x, StateVector& out, double) {
        out[0] = g * x[1];
        out[1] = g * x[0];
    };
    const double t = 7.3e-9;
    const auto stats = propagate(psi, h, 0.0, t);
    EXPECT_NEAR(psi[0].real(), std::cos(g * t), 1e-11);
    EXPECT_NEAR(psi[1].imag(), -std::sin(g * t), 1e-11);
    EXPECT_LE(stats.norm_drift, 100 * 1e-12);
}

TEST(Propagate, StepUnderflowIsReported) {
    StateVector psi{1.0};
    auto h = [](const StateVector& x, StateVector& out, double t) { out[0] = 1e24 * (1.0 + 1e9 * t) * x[0]; };
    EXPECT_THROW(propagate(psi, h, 0.0, 1e-6), NumericalError);
}

TEST(Propagate, RejectsBackwardIntervalAndBadTolerance) {
    StateVector psi{1.0};
    auto h = [](const StateVector&, StateVector& out, double) { out[0] = 0.0; };
    EXPECT_THROW(propagate(psi, h, 1.0, 0.0), NumericalError);
    PropagateOptions o;
    o.rtol = 0.0;
    EXPECT_THROW(propagate(psi, h, 0.0, 1.0, o), NumericalError);
}

// Kick ladder.

TEST(KickHamiltonian, ZeroEnvelopeGivesZeroDerivative) {
    Drive d = constant_drive(0.0);
    auto s = KickState::ground(4);
    s.at(1, 1) = 0.5;
    const auto out = kick_hamiltonian_apply(s, 1e-9, d, kick_flags());
    for (const auto& c : out.coeffs()) EXPECT_EQ(c, cplx{});
}

TEST(KickHamiltonian, RequiresFrozenSecularMotion) {
    EXPECT_THROW(KickHamiltonian(constant_drive(), ModelFlags{false, true, false}, 4), ConfigError);
}

TEST(KickModel, ForwardOnlyResonantRabiFlop) {
    for (double theta : {kPi / 3, kPi / 2, 0.9 * kPi, kPi}) {
        for (const auto& env : {Envelope::constant(theta, kTau), Envelope::sine(theta, kTau)}) {
            Drive d{env, kOmegaA, kOmegaA};
            const auto r = simulate_kick(d, kick_flags(false), 4);
            EXPECT_NEAR(r.state.population(1, 1), std::pow(std::sin(theta / 2), 2), 1e-11);
            EXPECT_NEAR(r.state.population(0, 0), std::pow(std::cos(theta / 2), 2), 1e-11);
        }
    }
}

TEST(KickModel, ConstantPulseWithBackwardKick) {
    const auto r = simulate_kick(constant_drive(), kick_flags(), 6);
    const double inf = kick_infidelity(r.state);
    EXPECT_NEAR(inf, 1.875057098588151e-05, 1e-10);
    EXPECT_NEAR(inf, 1.9e-5, 0.2 * 1.9e-5);
    EXPECT_FALSE(r.truncated);
    EXPECT_NEAR(r.state.norm(), 1.0, 1e-9);
}

TEST(KickModel, BackwardKickIsolatesTheCounterRotatingError) {
    const auto off = simulate_kick(constant_drive(), kick_flags(false), 6);
    const auto on = simulate_kick(constant_drive(), kick_flags(true), 6);
    EXPECT_LT(kick_infidelity(off.state), 1e-12);
    EXPECT_NEAR(kick_infidelity(on.state) - kick_infidelity(off.state), 1.875e-5, 1e-8);
}

TEST(KickModel, MatchesFiveStateSolverAtRandomTimes) {
    const Drive d = constant_drive();
    KickHamiltonian h(d, kick_flags(), 2);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, kTau);
    const double g0 = kPi / (2 * kTau);
    for (int i = 0; i < 20; ++i) {
        const double t = u(rng);
        const auto run = evolve_kick(KickState::ground(2), h, 0.0, t);
        const auto g = gauge_solver_5(g0, kOmegaA, kOmegaA, t);
        const auto& s = run.state;
        EXPECT_NEAR(s.population(0, 0), std::norm(g[0]), 1e-10);
        EXPECT_NEAR(s.population(1, 1), std::norm(g[1]), 1e-10);
        EXPECT_NEAR(s.population(1, -1), std::norm(g[2]), 1e-10);
        EXPECT_NEAR(s.population(0, 2), std::norm(g[3]), 1e-10);
        EXPECT_NEAR(s.population(0, -2), std::norm(g[4]), 1e-10);
    }
}

TEST(KickModel, ParitySelection) {
    Drive d{Envelope::sine(kPi, kTau), kOmegaA, (1 + 5e-5) * kOmegaA};
    KickHamiltonian h(d, kick_flags(), 6);
    KickState s = KickState::ground(6);
    for (int k = 1; k <= 10; ++k) {
        s = evolve_kick(std::move(s), h, (k - 1) * kTau / 10, k * kTau / 10).state;
        for (int n = -6; n <= 6; ++n) {
            if ((n % 2) != 0) {
                EXPECT_EQ(s.at(0, n), cplx{}) << "n=" << n;
            } else {
                EXPECT_EQ(s.at(1, n), cplx{}) << "n=" << n;
            }
        }
    }
}

TEST(KickModel, NormConservedAndDriftBounded) {
    for (const auto& env : {Envelope::constant(kPi, kTau), Envelope::sine(kPi, kTau),
                            sine_sampled_train(kPi, 10, 1e-11, units::ghz(1.946))}) {
        Drive d{env, kOmegaA, kOmegaA};
        const auto r = simulate_kick(d, kick_flags(), 12);
        EXPECT_NEAR(r.state.norm(), 1.0, 1e-9);
        EXPECT_LE(r.stats.norm_drift, 100 * 1e-12);
    }
}

TEST(KickModel, ToleranceHalvingConverges) {
    for (double tol : {1e-9, 1e-10, 1e-11}) {
        PropagateOptions a, b;
        a.rtol = tol;
        a.atol = tol * 1e-2;
        b.rtol = tol / 2;
        b.atol = tol * 0.5e-2;
        Drive d{Envelope::sine(kPi, kTau), kOmegaA, (1 + 5e-5) * kOmegaA};
        const auto ra = simulate_kick(d, kick_flags(), 6, a);
        const auto rb = simulate_kick(d, kick_flags(), 6, b);
        for (int s = 0; s < 2; ++s) {
            for (int n = -6; n <= 6; ++n) EXPECT_LT(std::abs(ra.state.population(s, n) - rb.state.population(s, n)), tol);
        }
    }
}

TEST(KickModel, TruncationFlaggedForShortLadder) {
    const auto r = simulate_kick(constant_drive(), kick_flags(), 2);
    EXPECT_TRUE(r.truncated);
    EXPECT_GT(r.edge_amplitude, kKickTruncationGuard);
}

// Gauge-transform solvers.

TEST(GaugeSolver3, NoDriveStaysInGround) {
    for (double t : {0.0, 1e-9, 3.3e-9}) {
        const auto c = gauge_solver_3(0.0, kOmegaA, kOmegaA, t);
        EXPECT_NEAR(std::abs(c[0] - 1.0), 0.0, 1e-15);
        EXPECT_EQ(std::abs(c[1]), 0.0);
        EXPECT_EQ(std::abs(c[2]), 0.0);
    }
}

TEST(GaugeSolver3, ConstantPulseValues) {
    const double g0 = kPi / (2 * kTau);
    const auto c = gauge_solver_3(g0, kOmegaA, kOmegaA, 2e-9);
    EXPECT_NEAR(c[0].real(), 0.80901822699587744, 1e-9);
    EXPECT_NEAR(c[0].imag(), 0.0013701234508312872, 1e-9);
    EXPECT_NEAR(c[1].real(), 0.00046164565518701218, 1e-9);
    EXPECT_NEAR(c[1].imag(), -0.58778158363705468, 1e-9);
    const auto end = gauge_solver_3(g0, kOmegaA, kOmegaA, kTau);
    EXPECT_NEAR(1.0 - std::norm(end[1]), 7.8123270687e-06, 1e-10);
}

TEST(GaugeSolver3, Unitary) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 2e-8);
    for (int i = 0; i < 10; ++i) {
        const auto c = gauge_solver_3(3e8, kOmegaA, 0.97 * kOmegaA, u(rng));
        EXPECT_NEAR(std::norm(c[0]) + std::norm(c[1]) + std::norm(c[2]), 1.0, 1e-12);
    }
}

TEST(GaugeSolver5, NoDriveStaysInGround) {
    const auto c = gauge_solver_5(0.0, kOmegaA, kOmegaA, 4e-9);
    EXPECT_NEAR(std::abs(c[0] - 1.0), 0.0, 1e-15);
    for (int j = 1; j < 5; ++j) EXPECT_EQ(std::abs(c[j]), 0.0);
}

TEST(GaugeSolver5, ConstantPulseValues) {
    const double g0 = kPi / (2 * kTau);
    const auto c = gauge_solver_5(g0, kOmegaA, kOmegaA, 2e-9);
    const cplx expect[5] = {{0.80901814850375131, 0.001469472936051347},
                            {-9.8704138537895018e-11, -0.58777815323420368},
                            {9.7509306777384231e-11, 2.4830638064025408e-07},
                            {1.1936248843832106e-06, -0.0014694447497753441},
                            {-1.1541213481192263e-06, -0.001469472948016002}};
    for (int j = 0; j < 5; ++j) EXPECT_LT(std::abs(c[j] - expect[j]), 1e-9) << "j=" << j;
    const auto end = gauge_solver_5(g0, kOmegaA, kOmegaA, kTau);
    const double pops[5] = {6.2501412883295131e-06, 0.99998124982516712, 9.7655295702945112e-12,
                            6.2498772803060184e-06, 6.2501464855023994e-06};
    for (int j = 0; j < 5; ++j) EXPECT_NEAR(std::norm(end[j]), pops[j], 1e-11) << "j=" << j;
    EXPECT_NEAR(1.0 - std::norm(end[1]), 1.9e-5, 0.2 * 1.9e-5);
}

TEST(GaugeSolver5, SmallStatesConvergeWithLadderCutoff) {
    const double g0 = kPi / (2 * kTau);
    const auto r = simulate_kick(constant_drive(), kick_flags(), 3);
    const auto c = gauge_solver_5(g0, kOmegaA, kOmegaA, kTau);
    // The extra rung cancels the |1,-1> amplitude almost completely.
    EXPECT_NEAR(std::norm(c[2]), 9.765529559485151e-12, 1e-15);
    EXPECT_LT(r.state.population(1, -1), 1e-20);
    EXPECT_NEAR(r.state.population(0, 2), std::norm(c[3]), 1e-4 * std::norm(c[3]));
    EXPECT_NEAR(r.state.population(0, -2), std::norm(c[4]), 1e-4 * std::norm(c[4]));
}

TEST(GaugeSolver5, AgreesWithThreeStateSolver) {
    const double g0 = kPi / (2 * kTau);
    for (int i = 0; i <= 50; ++i) {
        const double t = kTau * i / 50.0;
        const auto a = gauge_solver_3(g0, kOmegaA, kOmegaA, t);
        const auto b = gauge_solver_5(g0, kOmegaA, kOmegaA, t);
        for (int j = 0; j < 3; ++j) EXPECT_LT(std::abs(std::norm(a[j]) - std::norm(b[j])), 1e-4);
    }
}

TEST(GaugeSolver5, SatisfiesLadderEquationsOfMotion) {
    // Amplitudes must solve i dc/dt = H(t) c on the five-state ladder (N = 2 holds exactly these).
    const double g0 = kPi / (2 * kTau);
    const double dw = 0.9 * kOmegaA;
    Drive d{Envelope::constant(2 * g0 * 1e-8, 1e-8), kOmegaA, dw};  // Omega_0 = 2 g0 throughout
    KickHamiltonian h(d, kick_flags(), 2);
    auto as_state = [](const std::array<cplx, 5>& c) {
        KickState s(2);
        s.at(0, 0) = c[0];
        s.at(1, 1) = c[1];
        s.at(1, -1) = c[2];
        s.at(0, 2) = c[3];
        s.at(0, -2) = c[4];
        return s;
    };
    for (double t : {0.4e-9, 1.7e-9, 3.1e-9}) {
        const double step = 1e-15;
        const auto plus = as_state(gauge_solver_5(g0, kOmegaA, dw, t + step));
        const auto minus = as_state(gauge_solver_5(g0, kOmegaA, dw, t - step));
        const auto mid = as_state(gauge_solver_5(g0, kOmegaA, dw, t));
        KickState hpsi(2);
        h.apply(mid.coeffs(), hpsi.coeffs(), t);
        for (size_t k = 0; k < mid.coeffs().size(); ++k) {
            const cplx dcdt = (plus.coeffs()[k] - minus.coeffs()[k]) / (2 * step);
            EXPECT_LT(std::abs(cplx(0, 1) * dcdt - hpsi.coeffs()[k]), 1e-6 * g0) << "k=" << k;
        }
    }
}

// Fock representation.

TEST(FockOperators, DisplacementMatchesCoherentState) {
    FockOperators ops(64, 0.1);
    for (cplx alpha : {cplx(0.2, 0.0), cplx(0.0, 0.2), cplx(0.3, -0.4), cplx(-0.5, 0.0), cplx(0.1, 0.35)}) {
        const ComplexVector col = ops.displacement(alpha).col(0);
        const ComplexVector ref = coherent_state(alpha, 64);
        EXPECT_LT((col - ref).cwiseAbs().maxCoeff(), 1e-10) << alpha;
    }
}

TEST(FockOperators, KickOperatorsAreDisplacements) {
    FockOperators ops(64, 0.1);
    const ComplexMatrix dplus = ops.kick_cos().cast<cplx>() + cplx(0, 1) * ops.kick_sin().cast<cplx>();
    EXPECT_LT((dplus.col(0) - coherent_state(cplx(0, 0.2), 64)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(MicromotionPhase, SymmetricConditionVanishes) {
    auto t = operating_trap(kPi / 2);
    EXPECT_NEAR(micromotion_phase(t, -kTau / 2, kTau), 0.0, 1e-15);
}

TEST(MicromotionPhase, ZeroDurationVanishes) {
    EXPECT_EQ(micromotion_phase(operating_trap(1.0), 0.0, 0.0), 0.0);
    EXPECT_NEAR(micromotion_phase(operating_trap(1.0), 0.0, 0.0, MicromotionPhase::kExact), 0.0, 1e-16);
}

TEST(MicromotionPhase, OperatingPointPhaseMatch) {
    const double w = units::mhz(33.64);
    const double phi = kPi / 2 - w * kTau / 2;
    EXPECT_NEAR(phi / kTwoPi, 0.1659, 1e-4);
    EXPECT_NEAR(micromotion_phase(operating_trap(phi), 0.0, kTau), 0.0, 1e-14);
}

TEST(MicromotionPhase, ExactVariantAddsSecularTerm) {
    const auto t = operating_trap(0.3);
    const double w = t.omega_rf;
    const double exact = std::sin(w * kTau + 0.3) - std::sin(0.3) - w * kTau * 0.15 / 4;
    EXPECT_NEAR(micromotion_phase(t, 0.0, kTau, MicromotionPhase::kExact), exact, 1e-15);
    EXPECT_NEAR(micromotion_phase(t, 0.0, kTau, MicromotionPhase::kExact) - micromotion_phase(t, 0.0, kTau),
                -w * kTau * 0.15 / 4, 1e-14);
}

TEST(MicromotionPropagator, IdentityWhenPhaseVanishes) {
    FockOperators ops(64, 0.1);
    const double phi = kPi / 2 - units::mhz(33.64) * kTau / 2;
    MicromotionPropagator u(operating_trap(phi), ops, 0.0, kTau);
    EXPECT_LT((u.matrix() - ComplexMatrix::Identity(64, 64)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MicromotionPropagator, UnitaryOnGroundState) {
    FockOperators ops(64, 0.1);
    MicromotionPropagator u(operating_trap(0.0), ops, 0.0, kTau);
    ASSERT_GT(std::abs(u.theta_mm()), 0.1);
    const auto out = u.apply(FockState::ground(64));
    EXPECT_NEAR(out.norm(), 1.0, 1e-10);
    EXPECT_GT(std::norm(out.at(0, 2)), 1e-4);  // squeezing populates even levels
    EXPECT_LT(std::abs(out.at(0, 1)), 1e-12);
}

TEST(MicromotionPropagator, InversePairIsIdentity) {
    FockOperators ops(64, 0.1);
    MicromotionPropagator u(operating_trap(0.4), ops, 0.0, kTau);
    MicromotionPropagator v(operating_trap(0.4 + kPi), ops, 0.0, kTau);
    EXPECT_NEAR(u.theta_mm(), -v.theta_mm(), 1e-14);
    EXPECT_LT((u.matrix() * v.matrix() - ComplexMatrix::Identity(64, 64)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(MicromotionPropagator, InadequateCutoffIsReported) {
    FockOperators ops(12, 0.1);
    TrapParams t = operating_trap(0.0);
    t.q_z = 0.9;
    t.omega_rf = units::mhz(200.0);
    MicromotionPropagator u(t, ops, 0.0, 2e-9);
    EXPECT_THROW(u.apply(FockState::ground(12)), NumericalError);
}

TEST(FockHamiltonian, ZeroDriveAndNoMicromotionGiveZeroDerivative) {
    FockSetup s;
    s.trap.a_z = 0.01;
    s.trap.q_z = 0.0;
    s.ion = ion(0.1);
    s.drive = Drive{Envelope::sine(0.0, kTau), kOmegaA, kOmegaA};
    s.m_max = 16;
    FockState st(16);
    st.at(0, 3) = 0.6;
    st.at(1, 5) = cplx(0, 0.8);
    const auto out = full_fock_apply(st, 1e-9, s);
    for (const auto& c : out.coeffs()) EXPECT_EQ(c, cplx{});
}

TEST(FockHamiltonian, MicromotionNeedsSecularFrequency) {
    FockSetup s;
    s.trap.q_z = 0.0;
    EXPECT_THROW(FockHamiltonian{s}, ConfigError);
}

TEST(FockModel, FrozenLimitMatchesKickLadder) {
    const Drive d{Envelope::sine(kPi, kTau), kOmegaA, (1 + 5e-5) * kOmegaA};
    FockSetup s{operating_trap(0.0), ion(0.1), d, ModelFlags{false, true, true}, 64};
    const auto fock = simulate_fock(s);
    const auto kick = simulate_kick(d, kick_flags(), 6);
    // Map the ladder state onto coherent kicks |s, 2 i n eta> and compare.
    FockState pred(64);
    for (int sp = 0; sp < 2; ++sp) {
        for (int n = -6; n <= 6; ++n) {
            const ComplexVector coh = coherent_state(cplx(0, 2 * 0.1 * n), 64);
            for (int m = 0; m < 64; ++m) pred.at(sp, m) += kick.state.at(sp, n) * coh(m);
        }
    }
    cplx ov{};
    for (size_t k = 0; k < pred.coeffs().size(); ++k) ov += std::conj(pred.coeffs()[k]) * fock.state.coeffs()[k];
    EXPECT_NEAR(std::norm(ov), 1.0, 1e-6);
    for (int sp = 0; sp < 2; ++sp) {
        for (int n = -3; n <= 3; ++n) {
            const ComplexVector coh = coherent_state(cplx(0, 2 * 0.1 * n), 64);
            EXPECT_NEAR(std::norm(fock.state.overlap(sp, coh)), std::norm(pred.overlap(sp, coh)), 1e-6);
        }
    }
    EXPECT_NEAR(fock_infidelity(fock.state, fock_target_alpha(s)), kick_infidelity(kick.state), 1e-6);
}

TEST(FockModel, NormAndTail) {
    const Drive d{Envelope::sine(kPi, kTau), kOmegaA, (1 + 5e-5) * kOmegaA};
    FockSetup s{operating_trap(0.16 * kTwoPi), ion(0.1), d, ModelFlags{true, true, false}, 64};
    const auto r = simulate_fock(s);
    EXPECT_NEAR(r.state.norm(), 1.0, 1e-9);
    EXPECT_LT(r.tail_mass, kFockTailGuard);
    EXPECT_LE(r.stats.norm_drift, 100 * 1e-12);
}

TEST(FockModel, TooSmallCutoffIsReported) {
    const Drive d{Envelope::sine(kPi, kTau), kOmegaA, kOmegaA};
    FockSetup s{operating_trap(0.0), ion(0.9), d, ModelFlags{true, true, false}, 12};
    EXPECT_THROW(simulate_fock(s), NumericalError);
}

TEST(FockModel, MatchedMicromotionIsNearIdentityWithoutDrive) {
    const double w = units::mhz(33.64);
    const Drive d{Envelope::sine(0.0, kTau), kOmegaA, kOmegaA};
    auto fidelity_at = [&](double phi) {
        FockSetup s{operating_trap(phi), ion(0.1), d, ModelFlags{true, true, false}, 64};
        FockHamiltonian h(s);
        const auto r = evolve_fock(FockState::ground(64), h, 0.0, kTau);
        return std::norm(r.state.at(0, 0));
    };
    TrapParams t = operating_trap();
    auto exact_phase = [&](double phi) {
        t.phi_rf = phi;
        return micromotion_phase(t, 0.0, kTau, MicromotionPhase::kExact);
    };
    const auto [lo, hi] = boost::math::tools::bisect(exact_phase, 0.1 * kTwoPi, 0.2 * kTwoPi,
                                                     boost::math::tools::eps_tolerance<double>(50));
    const double matched = fidelity_at(0.5 * (lo + hi));
    EXPECT_GT(matched, 1.0 - 1e-4);
    EXPECT_LT(fidelity_at(-w * kTau / 2), 1.0 - 1e-3);
}
