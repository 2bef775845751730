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

#include <charconv>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "sdkick/errors.hpp"

namespace sdkick {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHbar = 1.054571817e-34;  // J s

namespace units {

/// Ordinary frequency in Hz to angular frequency in rad/s.
constexpr double hz(double f) { return kTwoPi * f; }
constexpr double khz(double f) { return hz(f * 1e3); }
constexpr double mhz(double f) { return hz(f * 1e6); }
constexpr double ghz(double f) { return hz(f * 1e9); }
constexpr double thz(double f) { return hz(f * 1e12); }

constexpr double ns(double t) { return t * 1e-9; }
constexpr double ps(double t) { return t * 1e-12; }
constexpr double us(double t) { return t * 1e-6; }

constexpr double turns(double x) { return kTwoPi * x; }

enum class Quantity { kFrequency, kDuration, kAngle };

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

/// Parses "<number> <unit>" into SI (rad/s, s, rad). A bare number is taken as SI.
///
/// Frequencies: Hz, kHz, MHz, GHz, THz (ordinary, converted with 2 pi) or rad/s.
/// Durations: s, ms, us, ns, ps, fs. Angles: rad, deg, turn, pi.
inline double parse_quantity(std::string_view text, Quantity kind) {
    auto s = trim(text);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{}) {
        throw ConfigError("cannot parse number in '" + std::string(text) + "'");
    }
    auto unit = trim(std::string_view(ptr, static_cast<size_t>(s.data() + s.size() - ptr)));
    if (unit.empty()) return value;

    auto bad_unit = [&]() {
        return ConfigError("unit '" + std::string(unit) + "' not valid for this field in '" +
                           std::string(text) + "'");
    };
    switch (kind) {
        case Quantity::kFrequency:
            if (unit == "rad/s") return value;
            if (unit == "Hz") return hz(value);
            if (unit == "kHz") return khz(value);
            if (unit == "MHz") return mhz(value);
            if (unit == "GHz") return ghz(value);
            if (unit == "THz") return thz(value);
            throw bad_unit();
        case Quantity::kDuration:
            if (unit == "s") return value;
            if (unit == "ms") return value * 1e-3;
            if (unit == "us") return value * 1e-6;
            if (unit == "ns") return value * 1e-9;
            if (unit == "ps") return value * 1e-12;
            if (unit == "fs") return value * 1e-15;
            throw bad_unit();
        case Quantity::kAngle:
            if (unit == "rad") return value;
            if (unit == "deg") return value * kPi / 180.0;
            if (unit == "turn" || unit == "turns") return turns(value);
            if (unit == "pi") return value * kPi;
            throw bad_unit();
    }
    throw bad_unit();
}

}  // namespace units
}  // namespace sdkick
