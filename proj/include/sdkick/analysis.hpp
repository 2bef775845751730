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
#include <atomic>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sdkick/envelope.hpp"
#include "sdkick/errors.hpp"
#include "sdkick/fock_model.hpp"
#include "sdkick/kick_model.hpp"
#include "sdkick/optimize.hpp"
#include "sdkick/trap.hpp"

namespace sdkick {

// Fidelity metrics and closed-form bounds.

/// 1 - |<1, +1 | psi>|^2 on the kick ladder.
inline double sdk_infidelity(const KickState& state) { return kick_infidelity(state); }

/// Infidelity against the ideal partial kick cos(theta/2)|0, 0> - i sin(theta/2)|1, +1>,
/// for pulse areas other than pi.
inline double sdk_rotation_infidelity(const KickState& state, double theta) {
    const cplx ov = std::cos(0.5 * theta) * state.at(0, 0) + cplx(0.0, std::sin(0.5 * theta)) * state.at(1, 1);
    return 1.0 - std::norm(ov);
}

/// 1 - |<1, alpha | psi>|^2 in the Fock representation.
inline double sdk_infidelity(const FockState& state, cplx target_alpha) { return fock_infidelity(state, target_alpha); }

/// Upper bound on the resonant counter-rotating error, (theta / (2 omega_a tau))^2.
inline double backward_bound(double theta, double omega_a, double tau) {
    const double r = theta / (2.0 * omega_a * tau);
    return r * r;
}

/// RF phase that nulls the integrated micromotion phase over [t0, t0 + tau]:
/// (2n + 1) pi / 2 - omega_rf (t0 + tau / 2), wrapped into [0, 2 pi).
inline double phase_match_phi(double omega_rf, double t0, double tau, int n) {
    const double phi = (2.0 * n + 1.0) * kPi / 2.0 - omega_rf * (t0 + 0.5 * tau);
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    if (w >= kTwoPi) w -= kTwoPi;
    return w;
}

// One fully specified kick and its evaluation.

enum class ModelKind { kKick, kFock };

struct Scenario {
    ModelKind model = ModelKind::kKick;
    TrapParams trap;
    IonParams ion;
    Drive drive;
    ModelFlags flags;
    int kick_cutoff = 6;
    int fock_cutoff = 64;
    PropagateOptions numerics;

    FockSetup fock_setup() const { return FockSetup{trap, ion, drive, flags, fock_cutoff}; }
};

struct Outcome {
    double infidelity = 1.0;
    PropagationStats stats;
    double truncation = 0.0;  // ladder edge amplitude or Fock tail mass
    bool truncated = false;
};

inline Outcome run_scenario(const Scenario& sc) {
    Outcome out;
    if (sc.model == ModelKind::kKick) {
        auto r = simulate_kick(sc.drive, sc.flags, sc.kick_cutoff, sc.numerics);
        out.infidelity = sdk_infidelity(r.state);
        out.stats = r.stats;
        out.truncation = r.edge_amplitude;
        out.truncated = r.truncated;
    } else {
        const auto setup = sc.fock_setup();
        auto r = simulate_fock(setup, sc.numerics);
        out.infidelity = sdk_infidelity(r.state, fock_target_alpha(setup));
        out.stats = r.stats;
        out.truncation = r.tail_mass;
    }
    return out;
}

inline double scenario_infidelity(const Scenario& sc) { return run_scenario(sc).infidelity; }

// Grids.

struct Axis {
    std::string name;
    std::string unit;
    std::vector<double> values;
};

/// Infidelity matrix over axis1 x axis2, stored row-major (row = axis1 index).
/// A one-dimensional sweep has an empty axis2 and one column.
struct SweepResult {
    Axis axis1;
    Axis axis2;
    std::vector<double> values;
    std::vector<std::string> errors;  // one message per failed cell
    bool interrupted = false;

    size_t rows() const { return axis1.values.size(); }
    size_t cols() const { return std::max<size_t>(1, axis2.values.size()); }
    double at(size_t r, size_t c) const { return values[r * cols() + c]; }

    double max_value() const {
        double m = -std::numeric_limits<double>::infinity();
        for (double v : values) {
            if (!std::isnan(v)) m = std::max(m, v);
        }
        return m;
    }
    double min_value() const {
        double m = std::numeric_limits<double>::infinity();
        for (double v : values) {
            if (!std::isnan(v)) m = std::min(m, v);
        }
        return m;
    }
};

inline std::vector<double> linspace(double lo, double hi, size_t n) {
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i) {
        v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

/// n points covering [0, 2 pi) with spacing 2 pi / n.
inline std::vector<double> periodic_grid(size_t n) {
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i) v[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    return v;
}

struct GridOptions {
    unsigned threads = 0;                   // 0: hardware concurrency
    const std::atomic<bool>* stop = nullptr;  // cooperative cancellation
    std::ostream* log = &std::cerr;
};

namespace detail {

inline unsigned worker_count(unsigned requested, size_t cells) {
    unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<size_t>(n, std::max<size_t>(1, cells)));
}

/// Evaluates cell(i) for i in [0, count) on a small worker pool. Each result lands in its own
/// slot, so the output does not depend on scheduling. Failed cells become NaN.
inline void evaluate_cells(size_t count, const std::function<double(size_t)>& cell, SweepResult& res,
                           const GridOptions& opt) {
    res.values.assign(count, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> messages(count);
    std::atomic<size_t> next{0};
    std::atomic<bool> cancelled{false};
    std::mutex log_mutex;
    auto worker = [&]() {
        while (true) {
            if (opt.stop != nullptr && opt.stop->load()) {
                cancelled = true;
                return;
            }
            const size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                res.values[i] = std::clamp(cell(i), 0.0, 1.0);
            } catch (const std::exception& e) {
                messages[i] = "cell " + std::to_string(i) + ": " + e.what();
                if (opt.log != nullptr) {
                    std::lock_guard lock(log_mutex);
                    *opt.log << "warning: " << messages[i] << '\n';
                }
            }
        }
    };
    const unsigned n = worker_count(opt.threads, count);
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& m : messages) {
        if (!m.empty()) res.errors.push_back(std::move(m));
    }
    res.interrupted = cancelled.load();
}

}  // namespace detail

/// Infidelity over an (RF phase, RF frequency) grid. Rows follow phi_rf, columns omega_rf.
inline SweepResult landscape(const Scenario& base, const std::vector<double>& omega_rf_grid,
                             const std::vector<double>& phi_rf_grid, const GridOptions& opt = {}) {
    if (omega_rf_grid.empty() || phi_rf_grid.empty()) throw ConfigError("landscape grids must be nonempty");
    SweepResult res;
    res.axis1 = {"phi_rf", "rad", phi_rf_grid};
    res.axis2 = {"omega_rf", "rad/s", omega_rf_grid};
    const size_t nc = omega_rf_grid.size();
    detail::evaluate_cells(
        phi_rf_grid.size() * nc,
        [&](size_t i) {
            Scenario sc = base;
            sc.trap.phi_rf = phi_rf_grid[i / nc];
            sc.trap.omega_rf = omega_rf_grid[i % nc];
            sc.trap.validate();
            return scenario_infidelity(sc);
        },
        res, opt);
    return res;
}

/// Analytic zero-micromotion loci phase_match_phi(omega_rf, t0, tau, n) for n = 0, 1 per column.
struct Locus {
    double omega_rf;
    double phi_n0;
    double phi_n1;
};

inline std::vector<Locus> analytic_loci(const std::vector<double>& omega_rf_grid, double t0, double tau) {
    std::vector<Locus> out;
    for (double w : omega_rf_grid) out.push_back({w, phase_match_phi(w, t0, tau, 0), phase_match_phi(w, t0, tau, 1)});
    return out;
}

/// Row indices of the local minima (cyclic in phi) of column c, deepest first.
inline std::vector<size_t> column_minima(const SweepResult& r, size_t c) {
    const size_t n = r.rows();
    std::vector<size_t> idx;
    for (size_t i = 0; i < n; ++i) {
        const double v = r.at(i, c);
        const double prev = r.at((i + n - 1) % n, c);
        const double next = r.at((i + 1) % n, c);
        if (std::isnan(v)) continue;
        if (v <= prev && v < next) idx.push_back(i);
    }
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return r.at(a, c) < r.at(b, c); });
    return idx;
}

/// Shortest distance between two angles.
inline double angular_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), kTwoPi);
    return std::min(d, kTwoPi - d);
}

enum class SweepParameter { kPulseArea, kRamanBeat };

inline const char* to_string(SweepParameter p) { return p == SweepParameter::kPulseArea ? "pulse_area" : "raman_beat"; }

/// Infidelity versus a relative error delta in [-span, +span] on the pulse area or the Raman
/// beat, n_points evenly spaced. The perturbed value is nominal * (1 + delta).
inline SweepResult robustness_sweep(const Scenario& base, SweepParameter param, double span, size_t n_points,
                                    const GridOptions& opt = {}) {
    if (n_points == 0) throw ConfigError("sweep needs at least one point");
    if (!(span >= 0.0)) throw ConfigError("sweep range must be nonnegative");
    SweepResult res;
    res.axis1 = {std::string("delta_") + to_string(param), "relative", linspace(-span, span, n_points)};
    detail::evaluate_cells(
        n_points,
        [&](size_t i) {
            Scenario sc = base;
            const double d = res.axis1.values[i];
            if (param == SweepParameter::kPulseArea) {
                sc.drive.envelope = sc.drive.envelope.scaled(1.0 + d);
            } else {
                sc.drive.raman_beat *= 1.0 + d;
            }
            return scenario_infidelity(sc);
        },
        res, opt);
    return res;
}

// Pulse-parameter optimization.

/// Optimizer result mapped back onto a concrete drive.
struct TunedDrive {
    OptimizationReport report;
    Drive drive;
};

/// Tunes the Raman beat alone. The optimizer coordinate is the fractional offset
/// x = raman_beat / omega_a - 1.
inline TunedDrive optimize_raman_beat(const Scenario& base, double init_offset, double step, size_t budget,
                                      std::optional<std::pair<double, double>> bounds = {}) {
    auto drive_at = [&](double x) {
        Drive d = base.drive;
        d.raman_beat = base.drive.omega_a * (1.0 + x);
        return d;
    };
    auto objective = [&](std::span<const double> x) {
        Scenario sc = base;
        sc.drive = drive_at(x[0]);
        return scenario_infidelity(sc);
    };
    OptimizeOptions o;
    o.budget = budget;
    o.step = {step};
    if (bounds) {
        o.lower = {bounds->first};
        o.upper = {bounds->second};
    }
    TunedDrive t{optimize(objective, {init_offset}, o, {"raman_beat_offset"}), {}};
    t.drive = drive_at(t.report.best_params[0]);
    return t;
}

/// Coordinates for pulse-train tuning: amplitudes relative to `amp_scale`, the Raman beat as
/// a fraction of omega_a, and the repetition rate in units of 2 pi GHz.
struct TrainCoordinates {
    double amp_scale = 1.0;
    double omega_a = 1.0;

    static constexpr double kRepUnit = kTwoPi * 1e9;

    std::vector<double> encode(const Drive& d) const {
        const auto& tr = d.envelope.as_train();
        std::vector<double> x;
        for (double a : tr.amps) x.push_back(a / amp_scale);
        x.push_back(d.raman_beat / omega_a);
        x.push_back(tr.rep_rate / kRepUnit);
        return x;
    }

    Drive decode(const Drive& base, std::span<const double> x) const {
        const size_t n = x.size() - 2;
        std::vector<double> amps(n);
        for (size_t j = 0; j < n; ++j) amps[j] = x[j] * amp_scale;
        Drive d = base;
        d.envelope = base.envelope.with_train(std::move(amps), x[n + 1] * kRepUnit);
        d.raman_beat = x[n] * omega_a;
        return d;
    }

    static std::vector<std::string> names(size_t n_pulses) {
        std::vector<std::string> v;
        for (size_t j = 0; j < n_pulses; ++j) v.push_back("amp_" + std::to_string(j));
        v.emplace_back("raman_beat_over_omega_a");
        v.emplace_back("rep_rate_ghz");
        return v;
    }
};

struct TrainSteps {
    double amplitude = 0.1;    // relative to the largest initial amplitude
    double raman_beat = 1e-3;  // fraction of omega_a
    double rep_rate_ghz = 5e-3;
};

/// Tunes every sub-pulse amplitude, the Raman beat and the repetition rate of a pulse train.
/// Amplitudes are kept nonnegative and the repetition rate keeps sub-pulses from overlapping.
inline TunedDrive optimize_pulse_train(const Scenario& base, size_t budget, const TrainSteps& steps = {}) {
    if (!base.drive.envelope.is_train()) throw ConfigError("pulse-train optimization needs a pulse_train envelope");
    const auto& tr = base.drive.envelope.as_train();
    TrainCoordinates coords{*std::max_element(tr.amps.begin(), tr.amps.end()), base.drive.omega_a};
    if (!(coords.amp_scale > 0.0)) throw ConfigError("pulse-train optimization needs a positive amplitude");
    const size_t n = tr.amps.size();
    auto objective = [&](std::span<const double> x) {
        Scenario sc = base;
        sc.drive = coords.decode(base.drive, x);
        return scenario_infidelity(sc);
    };
    OptimizeOptions o;
    o.budget = budget;
    o.step.assign(n, steps.amplitude);
    o.step.push_back(steps.raman_beat);
    o.step.push_back(steps.rep_rate_ghz);
    o.lower.assign(n + 2, 0.0);
    o.lower[n + 1] = 1e-6;
    o.upper.assign(n + 2, std::numeric_limits<double>::infinity());
    // Highest repetition rate at which sub-pulses still fit side by side.
    o.upper[n + 1] = kTwoPi / tr.width / TrainCoordinates::kRepUnit;
    TunedDrive t{optimize(objective, coords.encode(base.drive), o, TrainCoordinates::names(n)), {}};
    t.drive = coords.decode(base.drive, t.report.best_params);
    return t;
}

}  // namespace sdkick
