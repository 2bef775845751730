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
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sdkick/errors.hpp"
#include "sdkick/units.hpp"

namespace sdkick {

/// Flat-top pulse of area theta over [t_start, t_start + tau].
struct ConstantPulse {
    double theta = kPi;
    double tau = units::ns(5.0);
    double t_start = 0.0;
};

/// Half-period sine of area theta over [t_start, t_start + tau]; vanishes at both ends.
struct SinePulse {
    double theta = kPi;
    double tau = units::ns(5.0);
    double t_start = 0.0;
};

/// Rectangular sub-pulses of height amps[j] and common width, centred at
/// t_start + (j + 1/2) * 2 pi / rep_rate.
struct PulseTrain {
    std::vector<double> amps;  // rad/s
    double width = units::ps(10.0);
    double rep_rate = units::ghz(1.9);  // rad/s
    double t_start = 0.0;

    double period() const { return kTwoPi / rep_rate; }
    double center(size_t j) const { return t_start + (static_cast<double>(j) + 0.5) * period(); }
    std::pair<double, double> interval(size_t j) const {
        return {center(j) - 0.5 * width, center(j) + 0.5 * width};
    }
};

/// Rabi-frequency envelope Omega_0(t) of the Raman drive.
class Envelope {
   public:
    using Shape = std::variant<ConstantPulse, SinePulse, PulseTrain>;

    explicit Envelope(Shape shape) : shape_(std::move(shape)) { validate(); }

    static Envelope constant(double theta, double tau, double t_start = 0.0) {
        return Envelope(ConstantPulse{theta, tau, t_start});
    }
    static Envelope sine(double theta, double tau, double t_start = 0.0) {
        return Envelope(SinePulse{theta, tau, t_start});
    }
    static Envelope train(std::vector<double> amps, double width, double rep_rate, double t_start = 0.0) {
        return Envelope(PulseTrain{std::move(amps), width, rep_rate, t_start});
    }

    const Shape& shape() const { return shape_; }
    bool is_train() const { return std::holds_alternative<PulseTrain>(shape_); }
    const PulseTrain& as_train() const { return std::get<PulseTrain>(shape_); }

    double t_start() const {
        return std::visit([](const auto& s) { return s.t_start; }, shape_);
    }

    double duration() const {
        return std::visit(
            [](const auto& s) -> double {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, PulseTrain>) {
                    return static_cast<double>(s.amps.size()) * s.period();
                } else {
                    return s.tau;
                }
            },
            shape_);
    }

    double t_end() const { return t_start() + duration(); }

    double value(double t) const {
        return std::visit(
            [t](const auto& s) -> double {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, ConstantPulse>) {
                    if (t < s.t_start || t > s.t_start + s.tau) return 0.0;
                    return s.theta / s.tau;
                } else if constexpr (std::is_same_v<T, SinePulse>) {
                    if (t <= s.t_start || t >= s.t_start + s.tau) return 0.0;
                    return kPi * s.theta / (2.0 * s.tau) * std::sin(kPi * (t - s.t_start) / s.tau);
                } else {
                    const double rel = (t - s.t_start) / s.period();
                    if (rel < 0.0) return 0.0;
                    const auto j = static_cast<size_t>(rel);
                    // Neighbours are checked too so that interval endpoints always test as inside.
                    for (size_t k = j == 0 ? 0 : j - 1; k <= j + 1 && k < s.amps.size(); ++k) {
                        const auto [lo, hi] = s.interval(k);
                        if (t >= lo && t <= hi) return s.amps[k];
                    }
                    return 0.0;
                }
            },
            shape_);
    }

    /// Closed-form pulse area.
    double area() const {
        return std::visit(
            [](const auto& s) -> double {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, PulseTrain>) {
                    return s.width * std::accumulate(s.amps.begin(), s.amps.end(), 0.0);
                } else {
                    return s.theta;
                }
            },
            shape_);
    }

    double peak() const {
        return std::visit(
            [](const auto& s) -> double {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, ConstantPulse>) {
                    return s.theta / s.tau;
                } else if constexpr (std::is_same_v<T, SinePulse>) {
                    return kPi * s.theta / (2.0 * s.tau);
                } else {
                    double m = 0.0;
                    for (double a : s.amps) m = std::max(m, std::abs(a));
                    return m;
                }
            },
            shape_);
    }

    /// Area-weighted mean time of the drive, the instant an equivalent impulsive kick would act.
    double centroid() const {
        return std::visit(
            [](const auto& s) -> double {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, PulseTrain>) {
                    double w = 0.0, acc = 0.0;
                    for (size_t j = 0; j < s.amps.size(); ++j) {
                        w += s.amps[j];
                        acc += s.amps[j] * s.center(j);
                    }
                    return w != 0.0 ? acc / w : s.t_start + 0.5 * s.amps.size() * s.period();
                } else {
                    return s.t_start + 0.5 * s.tau;
                }
            },
            shape_);
    }

    /// Rough spectral width of the envelope, for advisory hierarchy checks.
    double bandwidth() const {
        return std::visit(
            [](const auto& s) -> double {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, PulseTrain>) {
                    return kTwoPi / s.width;
                } else {
                    return kTwoPi / s.tau;
                }
            },
            shape_);
    }

    /// Sorted times where the envelope or its derivative jumps; integrators restart there.
    std::vector<double> breakpoints() const {
        std::vector<double> out;
        for (const auto& [a, b] : active_intervals()) {
            out.push_back(a);
            out.push_back(b);
        }
        return out;
    }

    /// Disjoint closed intervals outside of which the envelope is exactly zero.
    std::vector<std::pair<double, double>> active_intervals() const {
        return std::visit(
            [](const auto& s) -> std::vector<std::pair<double, double>> {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, PulseTrain>) {
                    std::vector<std::pair<double, double>> iv;
                    for (size_t j = 0; j < s.amps.size(); ++j) {
                        if (s.amps[j] == 0.0) continue;
                        iv.push_back(s.interval(j));
                    }
                    return iv;
                } else {
                    if (s.theta == 0.0) return {};
                    return {{s.t_start, s.t_start + s.tau}};
                }
            },
            shape_);
    }

    /// Same shape with every amplitude multiplied by factor (pulse area scales alike).
    Envelope scaled(double factor) const {
        Shape s = shape_;
        std::visit(
            [factor](auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, PulseTrain>) {
                    for (double& a : v.amps) a *= factor;
                } else {
                    v.theta *= factor;
                }
            },
            s);
        return Envelope(std::move(s));
    }

    /// Pulse train copy with new sub-pulse amplitudes and optionally a new repetition rate.
    Envelope with_train(std::vector<double> amps, double rep_rate) const {
        PulseTrain t = as_train();
        t.amps = std::move(amps);
        t.rep_rate = rep_rate;
        return Envelope(std::move(t));
    }

    Envelope shifted_to(double t_start) const {
        Shape s = shape_;
        std::visit([t_start](auto& v) { v.t_start = t_start; }, s);
        return Envelope(std::move(s));
    }

   private:
    void validate() const {
        std::visit(
            [](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if (!std::isfinite(s.t_start)) throw ConfigError("envelope.t_start must be finite");
                if constexpr (std::is_same_v<T, PulseTrain>) {
                    if (s.amps.empty()) throw ConfigError("pulse train needs at least one sub-pulse");
                    if (!(s.width > 0.0)) throw ConfigError("pulse train width must be positive");
                    if (!(s.rep_rate > 0.0)) throw ConfigError("pulse train rep_rate must be positive");
                    if (s.width > s.period()) {
                        throw ConfigError("pulse train sub-pulses overlap: width " + std::to_string(s.width) +
                                          " s exceeds period " + std::to_string(s.period()) + " s");
                    }
                    for (double a : s.amps) {
                        if (!std::isfinite(a)) throw ConfigError("pulse train amplitude must be finite");
                    }
                } else {
                    if (!(s.tau > 0.0)) throw ConfigError("envelope duration must be positive");
                    if (!std::isfinite(s.theta)) throw ConfigError("envelope area must be finite");
                }
            },
            shape_);
    }

    Shape shape_;
};

/// Pulse train whose amplitudes sample a sine envelope, normalised to total area theta.
inline Envelope sine_sampled_train(double theta, size_t n, double width, double rep_rate, double t_start = 0.0) {
    if (n == 0) throw ConfigError("sine-sampled train needs n >= 1");
    std::vector<double> amps(n);
    double sum = 0.0;
    for (size_t j = 0; j < n; ++j) {
        amps[j] = std::sin(kPi * (static_cast<double>(j) + 0.5) / static_cast<double>(n));
        sum += amps[j];
    }
    for (double& a : amps) a *= theta / (width * sum);
    return Envelope::train(std::move(amps), width, rep_rate, t_start);
}

}  // namespace sdkick
