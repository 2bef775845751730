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

#include "sdkick/errors.hpp"
#include "sdkick/trap.hpp"
#include "sdkick/units.hpp"

using namespace sdkick;

namespace {

TrapParams trap(double omega_rf, double a, double q) {
    TrapParams t;
    t.omega_rf = omega_rf;
    t.a_z = a;
    t.q_z = q;
    return t;
}

}  // namespace

TEST(SecularFrequency, ZeroMathieuParametersGiveZero) {
    EXPECT_EQ(secular_frequency(trap(units::mhz(40.0), 0.0, 0.0)), 0.0);
}

TEST(SecularFrequency, OperatingPointValue) {
    // 33.64 MHz * sqrt(0.15^2 / 2) / 2 = 1.7840304089 MHz
    const double ws = secular_frequency(trap(units::mhz(33.64), 0.0, 0.15));
    EXPECT_NEAR(ws / units::mhz(1.0), 1.7840304089336593, 1e-12);
    EXPECT_NEAR(ws / units::mhz(1.0), 1.784, 5e-4);
}

TEST(SecularFrequency, UnstableTrapThrows) {
    EXPECT_THROW(secular_frequency(trap(units::mhz(40.0), -0.1, 0.1)), UnstableTrapError);
    EXPECT_THROW(trap(units::mhz(40.0), -0.1, 0.1).validate(), ConfigError);
}

TEST(SecularFrequency, StabilityBoundaryIsAccepted) {
    EXPECT_NO_THROW(secular_frequency(trap(units::mhz(40.0), -0.005, 0.1)));
    EXPECT_NO_THROW(secular_frequency(trap(units::mhz(40.0), -0.125, 0.5)));
}

TEST(SecularFrequency, RejectsNonPositiveDrive) {
    EXPECT_THROW(trap(0.0, 0.0, 0.1).validate(), ConfigError);
    EXPECT_THROW(trap(-1.0, 0.0, 0.1).validate(), ConfigError);
}

TEST(SecularFrequency, MonotoneInAbsQ) {
    for (double a : {0.0, 0.01, 0.2}) {
        double prev = -1.0;
        for (int i = 0; i <= 40; ++i) {
            const double q = 0.02 * i;
            const double ws = secular_frequency(trap(units::mhz(20.0), a, q));
            EXPECT_GT(ws, prev);
            EXPECT_EQ(ws, secular_frequency(trap(units::mhz(20.0), a, -q)));
            prev = ws;
        }
    }
}

TEST(FastSdk, OperatingPointIsFast) {
    const auto r = validate_fast_sdk(trap(units::mhz(40.0), 0.0, 0.15), units::ns(5.0));
    EXPECT_NEAR(r.omega_s_tau, 0.0666432440723755, 1e-12);
    EXPECT_TRUE(r.fast);
    EXPECT_NEAR(r.micromotion_correction, units::mhz(40.0) * 5e-9 * 0.15 / 4.0, 1e-15);
}

TEST(FastSdk, ZeroDurationIsFast) {
    const auto r = validate_fast_sdk(trap(units::mhz(40.0), 0.0, 0.15), 0.0);
    EXPECT_EQ(r.omega_s_tau, 0.0);
    EXPECT_TRUE(r.fast);
}

TEST(FastSdk, LongPulseInStiffTrapIsNotFast) {
    const auto r = validate_fast_sdk(trap(units::mhz(40.0), 0.5, 0.0), units::us(1.0));
    EXPECT_NEAR(r.omega_s_tau, 88.85765876316734, 1e-9);
    EXPECT_FALSE(r.fast);
}

TEST(FastSdk, ThresholdIsConfigurable) {
    const auto t = trap(units::mhz(40.0), 0.0, 0.15);
    EXPECT_FALSE(validate_fast_sdk(t, units::ns(5.0), 0.05).fast);
    EXPECT_TRUE(validate_fast_sdk(t, units::ns(5.0), 0.07).fast);
}

TEST(IonParams, LambDickeRoundTripFromMassAndWavenumber) {
    const double mass = 133.0 * 1.66053906660e-27;
    const double k = 2.0 * kPi / 532e-9;
    const double ws = secular_frequency(trap(units::mhz(33.64), 0.0, 0.15));
    const auto ion = IonParams::from_mass(units::ghz(10.0), mass, k, ws);
    const double expect = k * std::sqrt(kHbar / (2.0 * mass * ws));
    EXPECT_NEAR(ion.eta, expect, 1e-12 * expect);
    IonParams copy = ion;
    EXPECT_NO_THROW(copy.validate(ws));
}

TEST(IonParams, InconsistentEtaIsRejected) {
    const double ws = secular_frequency(trap(units::mhz(33.64), 0.0, 0.15));
    auto ion = IonParams::from_mass(units::ghz(10.0), 2.2e-25, 1.2e7, ws);
    ion.eta *= 1.0 + 1e-9;
    EXPECT_THROW(ion.validate(ws), ConfigError);
}

TEST(IonParams, InvalidFieldsAreRejected) {
    IonParams ion;
    ion.eta = 0.0;
    EXPECT_THROW(ion.validate(), ConfigError);
    ion = IonParams{};
    ion.omega_a = -1.0;
    EXPECT_THROW(ion.validate(), ConfigError);
    ion = IonParams{};
    ion.mass = 1e-25;
    EXPECT_THROW(ion.validate(), ConfigError);
}

TEST(Units, ParsesFrequenciesDurationsAndAngles) {
    using units::Quantity;
    EXPECT_DOUBLE_EQ(units::parse_quantity("33.64 MHz", Quantity::kFrequency), kTwoPi * 33.64e6);
    EXPECT_DOUBLE_EQ(units::parse_quantity("10 GHz", Quantity::kFrequency), kTwoPi * 1e10);
    EXPECT_DOUBLE_EQ(units::parse_quantity("5 rad/s", Quantity::kFrequency), 5.0);
    EXPECT_DOUBLE_EQ(units::parse_quantity("5 ns", Quantity::kDuration), 5e-9);
    EXPECT_DOUBLE_EQ(units::parse_quantity("10ps", Quantity::kDuration), 1e-11);
    EXPECT_DOUBLE_EQ(units::parse_quantity("0.17 turn", Quantity::kAngle), 0.17 * kTwoPi);
    EXPECT_DOUBLE_EQ(units::parse_quantity("1 pi", Quantity::kAngle), kPi);
    EXPECT_DOUBLE_EQ(units::parse_quantity("90 deg", Quantity::kAngle), kPi / 2.0);
    EXPECT_DOUBLE_EQ(units::parse_quantity("  2.5 ", Quantity::kAngle), 2.5);
}

TEST(Units, RejectsWrongOrMissingUnits) {
    using units::Quantity;
    EXPECT_THROW(units::parse_quantity("5 ns", Quantity::kFrequency), ConfigError);
    EXPECT_THROW(units::parse_quantity("5 MHz", Quantity::kAngle), ConfigError);
    EXPECT_THROW(units::parse_quantity("fast", Quantity::kDuration), ConfigError);
}
