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

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdkick/analysis.hpp"
#include "sdkick/beams.hpp"
#include "sdkick/envelope.hpp"
#include "sdkick/errors.hpp"
#include "sdkick/trap.hpp"
#include "sdkick/units.hpp"

namespace sdkick {

using json = nlohmann::json;

struct LandscapeBlock {
    double rf_frequency_min = units::mhz(4.0);
    double rf_frequency_max = units::mhz(40.0);
    size_t rf_frequency_points = 64;
    size_t rf_phase_points = 64;
};

struct SweepBlock {
    SweepParameter parameter = SweepParameter::kPulseArea;
    double span = 0.01;
    size_t points = 11;
};

enum class OptimizeTarget { kRamanBeat, kPulseTrain };

struct OptimizeBlock {
    OptimizeTarget target = OptimizeTarget::kRamanBeat;
    size_t budget = 200;
    double raman_beat_offset = 5e-5;       // initial raman_beat / omega_a - 1
    double raman_beat_offset_step = 1e-5;  // initial simplex edge for that offset
    TrainSteps train;
};

/// Fully resolved run description, all quantities in SI with angular frequencies.
struct RunConfig {
    Scenario scenario;
    BeamPair beams;
    size_t samples = 201;
    double fast_sdk_threshold = 0.1;
    double hierarchy_threshold = 0.01;
    LandscapeBlock landscape;
    SweepBlock sweep;
    OptimizeBlock optimize;
    std::uint64_t seed = 0;
};

struct LoadOptions {
    /// Skip the trap stability check so that diagnostics can still report on an unstable trap.
    bool allow_unstable_trap = false;
};

namespace detail {

inline std::string child(const std::string& path, std::string_view key) { return path + "/" + std::string(key); }

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw ConfigError("expected an object at '" + (path.empty() ? "/" : path) + "'");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError("unknown key '" + child(path, key) + "'");
    }
}

inline double quantity(const json& v, const std::string& path, units::Quantity kind) {
    try {
        if (v.is_number()) return v.get<double>();
        if (v.is_string()) return units::parse_quantity(v.get<std::string>(), kind);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(e.what()) + " at '" + path + "'");
    }
    throw ConfigError("expected a number or a quantity string at '" + path + "'");
}

inline double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError("expected a number at '" + path + "'");
    return v.get<double>();
}

inline size_t count(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError("expected a nonnegative integer at '" + path + "'");
    }
    return v.get<size_t>();
}

inline bool boolean(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ConfigError("expected true or false at '" + path + "'");
    return v.get<bool>();
}

inline std::string text(const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError("expected a string at '" + path + "'");
    return v.get<std::string>();
}

template <class F>
void with(const json& obj, std::string_view key, F&& f) {
    if (auto it = obj.find(std::string(key)); it != obj.end()) f(*it);
}

}  // namespace detail

/// Builds a RunConfig from parsed JSON. Quantities accept either a bare SI number or a string
/// with a unit, for example "33.64 MHz", "5 ns", "0.17 turn". Unknown keys are rejected.
inline RunConfig parse_config(const json& root, const LoadOptions& lo = {}) {
    using namespace detail;
    using units::Quantity;
    RunConfig cfg;
    auto& sc = cfg.scenario;
    reject_unknown(root, "", {"trap", "ion", "beams", "envelope", "model", "numerics", "landscape", "sweep",
                              "optimize", "seed"});

    with(root, "trap", [&](const json& t) {
        const std::string p = "/trap";
        reject_unknown(t, p, {"rf_frequency", "rf_phase", "a_z", "q_z"});
        with(t, "rf_frequency", [&](const json& v) { sc.trap.omega_rf = quantity(v, child(p, "rf_frequency"), Quantity::kFrequency); });
        with(t, "rf_phase", [&](const json& v) { sc.trap.phi_rf = quantity(v, child(p, "rf_phase"), Quantity::kAngle); });
        with(t, "a_z", [&](const json& v) { sc.trap.a_z = number(v, child(p, "a_z")); });
        with(t, "q_z", [&](const json& v) { sc.trap.q_z = number(v, child(p, "q_z")); });
    });
    if (lo.allow_unstable_trap) {
        try {
            sc.trap.validate();
        } catch (const UnstableTrapError&) {
        }
    } else {
        sc.trap.validate();
    }
    const bool stable = sc.trap.stability() >= 0.0;

    bool eta_given = false;
    with(root, "ion", [&](const json& t) {
        const std::string p = "/ion";
        reject_unknown(t, p, {"qubit_frequency", "lamb_dicke", "mass", "wavenumber"});
        with(t, "qubit_frequency", [&](const json& v) { sc.ion.omega_a = quantity(v, child(p, "qubit_frequency"), Quantity::kFrequency); });
        with(t, "lamb_dicke", [&](const json& v) {
            sc.ion.eta = number(v, child(p, "lamb_dicke"));
            eta_given = true;
        });
        with(t, "mass", [&](const json& v) { sc.ion.mass = number(v, child(p, "mass")); });
        with(t, "wavenumber", [&](const json& v) { sc.ion.k = number(v, child(p, "wavenumber")); });
    });
    const double omega_s = stable ? secular_frequency(sc.trap) : 0.0;
    if (sc.ion.mass && sc.ion.k && !eta_given) {
        if (!(omega_s > 0.0)) throw ConfigError("ion.lamb_dicke cannot be derived without a positive secular frequency");
        sc.ion = IonParams::from_mass(sc.ion.omega_a, *sc.ion.mass, *sc.ion.k, omega_s);
    }
    sc.ion.validate(omega_s > 0.0 ? std::optional<double>(omega_s) : std::nullopt);

    double raman_beat = sc.ion.omega_a;
    cfg.beams = BeamPair::lin_perp_lin(sc.ion.k.value_or(0.0), raman_beat);
    with(root, "beams", [&](const json& t) {
        const std::string p = "/beams";
        reject_unknown(t, p, {"raman_beat", "raman_beat_ratio", "beta1", "beta2", "dpsi", "detuning"});
        if (t.contains("raman_beat") && t.contains("raman_beat_ratio")) {
            throw ConfigError("give only one of '/beams/raman_beat' and '/beams/raman_beat_ratio'");
        }
        with(t, "raman_beat", [&](const json& v) { raman_beat = quantity(v, child(p, "raman_beat"), Quantity::kFrequency); });
        with(t, "raman_beat_ratio", [&](const json& v) { raman_beat = sc.ion.omega_a * number(v, child(p, "raman_beat_ratio")); });
        with(t, "beta1", [&](const json& v) { cfg.beams.beta1 = quantity(v, child(p, "beta1"), Quantity::kAngle); });
        with(t, "beta2", [&](const json& v) { cfg.beams.beta2 = quantity(v, child(p, "beta2"), Quantity::kAngle); });
        with(t, "dpsi", [&](const json& v) { cfg.beams.dpsi = quantity(v, child(p, "dpsi"), Quantity::kAngle); });
        with(t, "detuning", [&](const json& v) { cfg.beams.detuning = quantity(v, child(p, "detuning"), Quantity::kFrequency); });
    });
    cfg.beams.dphi_rate = raman_beat;
    cfg.beams.validate();
    sc.drive.omega_a = sc.ion.omega_a;
    sc.drive.raman_beat = raman_beat;

    with(root, "envelope", [&](const json& t) {
        const std::string p = "/envelope";
        reject_unknown(t, p, {"shape", "theta", "tau", "t_start", "amps", "width", "rep_rate", "n_pulses"});
        const std::string shape = t.contains("shape") ? text(t["shape"], child(p, "shape")) : "sine";
        auto need = [&](std::string_view key) -> const json& {
            if (!t.contains(std::string(key))) {
                throw ConfigError("missing '" + child(p, key) + "' for shape '" + shape + "'");
            }
            return t[std::string(key)];
        };
        auto forbid = [&](std::initializer_list<std::string_view> keys) {
            for (auto k : keys) {
                if (t.contains(std::string(k))) throw ConfigError("key '" + child(p, k) + "' does not apply to shape '" + shape + "'");
            }
        };
        double t_start = 0.0;
        with(t, "t_start", [&](const json& v) { t_start = quantity(v, child(p, "t_start"), Quantity::kDuration); });
        if (shape == "constant" || shape == "sine") {
            forbid({"amps", "width", "rep_rate", "n_pulses"});
            const double theta = t.contains("theta") ? quantity(t["theta"], child(p, "theta"), Quantity::kAngle) : kPi;
            const double tau = quantity(need("tau"), child(p, "tau"), Quantity::kDuration);
            sc.drive.envelope = shape == "constant" ? Envelope::constant(theta, tau, t_start) : Envelope::sine(theta, tau, t_start);
        } else if (shape == "pulse_train") {
            forbid({"theta", "tau", "n_pulses"});
            const json& a = need("amps");
            if (!a.is_array()) throw ConfigError("expected an array at '" + child(p, "amps") + "'");
            std::vector<double> amps;
            for (size_t i = 0; i < a.size(); ++i) {
                amps.push_back(quantity(a[i], child(p, "amps") + "/" + std::to_string(i), Quantity::kFrequency));
            }
            sc.drive.envelope = Envelope::train(std::move(amps), quantity(need("width"), child(p, "width"), Quantity::kDuration),
                                                quantity(need("rep_rate"), child(p, "rep_rate"), Quantity::kFrequency), t_start);
        } else if (shape == "sine_train") {
            forbid({"tau", "amps"});
            const double theta = t.contains("theta") ? quantity(t["theta"], child(p, "theta"), Quantity::kAngle) : kPi;
            sc.drive.envelope = sine_sampled_train(theta, count(need("n_pulses"), child(p, "n_pulses")),
                                                   quantity(need("width"), child(p, "width"), Quantity::kDuration),
                                                   quantity(need("rep_rate"), child(p, "rep_rate"), Quantity::kFrequency), t_start);
        } else {
            throw ConfigError("unknown envelope shape '" + shape + "' at '" + child(p, "shape") +
                              "' (constant, sine, pulse_train, sine_train)");
        }
    });

    with(root, "model", [&](const json& t) {
        const std::string p = "/model";
        reject_unknown(t, p, {"kind", "include_micromotion", "include_backward", "frozen_secular"});
        if (t.contains("kind")) {
            const auto kind = text(t["kind"], child(p, "kind"));
            if (kind == "kick") {
                sc.model = ModelKind::kKick;
            } else if (kind == "fock") {
                sc.model = ModelKind::kFock;
                sc.flags = ModelFlags{true, true, false};
            } else {
                throw ConfigError("unknown model kind '" + kind + "' at '" + child(p, "kind") + "' (kick, fock)");
            }
        }
        with(t, "include_micromotion", [&](const json& v) { sc.flags.include_micromotion = boolean(v, child(p, "include_micromotion")); });
        with(t, "include_backward", [&](const json& v) { sc.flags.include_backward = boolean(v, child(p, "include_backward")); });
        with(t, "frozen_secular", [&](const json& v) { sc.flags.frozen_secular = boolean(v, child(p, "frozen_secular")); });
    });
    if (sc.model == ModelKind::kKick && (sc.flags.include_micromotion || !sc.flags.frozen_secular)) {
        throw ConfigError("the kick model supports only include_micromotion = false and frozen_secular = true at '/model'");
    }
    if (sc.model == ModelKind::kFock && sc.flags.include_micromotion && !(omega_s > 0.0)) {
        throw ConfigError("micromotion needs a positive secular frequency; set '/trap/q_z' or '/trap/a_z'");
    }

    with(root, "numerics", [&](const json& t) {
        const std::string p = "/numerics";
        reject_unknown(t, p, {"rtol", "atol", "kick_cutoff", "fock_cutoff", "samples", "fast_sdk_threshold",
                              "hierarchy_threshold"});
        with(t, "rtol", [&](const json& v) { sc.numerics.rtol = number(v, child(p, "rtol")); });
        with(t, "atol", [&](const json& v) { sc.numerics.atol = number(v, child(p, "atol")); });
        with(t, "kick_cutoff", [&](const json& v) { sc.kick_cutoff = static_cast<int>(count(v, child(p, "kick_cutoff"))); });
        with(t, "fock_cutoff", [&](const json& v) { sc.fock_cutoff = static_cast<int>(count(v, child(p, "fock_cutoff"))); });
        with(t, "samples", [&](const json& v) { cfg.samples = count(v, child(p, "samples")); });
        with(t, "fast_sdk_threshold", [&](const json& v) { cfg.fast_sdk_threshold = number(v, child(p, "fast_sdk_threshold")); });
        with(t, "hierarchy_threshold", [&](const json& v) { cfg.hierarchy_threshold = number(v, child(p, "hierarchy_threshold")); });
    });
    if (!(sc.numerics.rtol > 0.0) || !(sc.numerics.atol > 0.0)) throw ConfigError("'/numerics' tolerances must be positive");
    if (sc.kick_cutoff < 2) throw ConfigError("'/numerics/kick_cutoff' must be at least 2");
    if (sc.fock_cutoff < 10) throw ConfigError("'/numerics/fock_cutoff' must be at least 10");
    if (cfg.samples < 2) throw ConfigError("'/numerics/samples' must be at least 2");

    with(root, "landscape", [&](const json& t) {
        const std::string p = "/landscape";
        reject_unknown(t, p, {"rf_frequency_min", "rf_frequency_max", "rf_frequency_points", "rf_phase_points"});
        auto& L = cfg.landscape;
        with(t, "rf_frequency_min", [&](const json& v) { L.rf_frequency_min = quantity(v, child(p, "rf_frequency_min"), Quantity::kFrequency); });
        with(t, "rf_frequency_max", [&](const json& v) { L.rf_frequency_max = quantity(v, child(p, "rf_frequency_max"), Quantity::kFrequency); });
        with(t, "rf_frequency_points", [&](const json& v) { L.rf_frequency_points = count(v, child(p, "rf_frequency_points")); });
        with(t, "rf_phase_points", [&](const json& v) { L.rf_phase_points = count(v, child(p, "rf_phase_points")); });
    });
    {
        const auto& L = cfg.landscape;
        if (L.rf_frequency_points == 0 || L.rf_phase_points == 0) throw ConfigError("'/landscape' grids must be nonempty");
        if (!(L.rf_frequency_min > 0.0) || L.rf_frequency_max < L.rf_frequency_min) {
            throw ConfigError("'/landscape' needs 0 < rf_frequency_min <= rf_frequency_max");
        }
    }

    with(root, "sweep", [&](const json& t) {
        const std::string p = "/sweep";
        reject_unknown(t, p, {"parameter", "span", "points"});
        with(t, "parameter", [&](const json& v) {
            const auto s = text(v, child(p, "parameter"));
            if (s == "pulse_area") {
                cfg.sweep.parameter = SweepParameter::kPulseArea;
            } else if (s == "raman_beat") {
                cfg.sweep.parameter = SweepParameter::kRamanBeat;
            } else {
                throw ConfigError("unknown sweep parameter '" + s + "' at '" + child(p, "parameter") + "'");
            }
        });
        with(t, "span", [&](const json& v) { cfg.sweep.span = number(v, child(p, "span")); });
        with(t, "points", [&](const json& v) { cfg.sweep.points = count(v, child(p, "points")); });
    });
    if (cfg.sweep.points == 0 || !(cfg.sweep.span >= 0.0)) throw ConfigError("'/sweep' needs points >= 1 and span >= 0");

    with(root, "optimize", [&](const json& t) {
        const std::string p = "/optimize";
        reject_unknown(t, p, {"target", "budget", "raman_beat_offset", "raman_beat_offset_step", "amplitude_step",
                              "raman_beat_step", "rep_rate_step"});
        auto& O = cfg.optimize;
        with(t, "target", [&](const json& v) {
            const auto s = text(v, child(p, "target"));
            if (s == "raman_beat") {
                O.target = OptimizeTarget::kRamanBeat;
            } else if (s == "pulse_train") {
                O.target = OptimizeTarget::kPulseTrain;
            } else {
                throw ConfigError("unknown optimize target '" + s + "' at '" + child(p, "target") + "'");
            }
        });
        with(t, "budget", [&](const json& v) { O.budget = count(v, child(p, "budget")); });
        with(t, "raman_beat_offset", [&](const json& v) { O.raman_beat_offset = number(v, child(p, "raman_beat_offset")); });
        with(t, "raman_beat_offset_step", [&](const json& v) { O.raman_beat_offset_step = number(v, child(p, "raman_beat_offset_step")); });
        with(t, "amplitude_step", [&](const json& v) { O.train.amplitude = number(v, child(p, "amplitude_step")); });
        with(t, "raman_beat_step", [&](const json& v) { O.train.raman_beat = number(v, child(p, "raman_beat_step")); });
        with(t, "rep_rate_step", [&](const json& v) {
            O.train.rep_rate_ghz = quantity(v, child(p, "rep_rate_step"), Quantity::kFrequency) / TrainCoordinates::kRepUnit;
        });
    });

    with(root, "seed", [&](const json& v) {
        if (!v.is_number_unsigned()) throw ConfigError("expected a nonnegative integer at '/seed'");
        cfg.seed = v.get<std::uint64_t>();
    });
    return cfg;
}

/// Applies a dotted-path override such as "trap.rf_phase=0.16 turn". The value is read as
/// JSON when it parses as JSON and as a plain string otherwise.
inline void apply_override(json& root, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
    }
    const std::string path(assignment.substr(0, eq));
    const std::string raw(assignment.substr(eq + 1));
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;

    json* node = &root;
    std::string_view rest = path;
    while (true) {
        const auto dot = rest.find('.');
        const std::string key(rest.substr(0, dot));
        if (key.empty()) throw ConfigError("override path '" + path + "' has an empty component");
        if (!node->is_object()) throw ConfigError("override path '" + path + "' descends into a non-object");
        if (dot == std::string_view::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        if (node->is_null()) *node = json::object();
        rest.remove_prefix(dot + 1);
    }
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    json j = json::parse(ss.str(), nullptr, false, true);
    if (j.is_discarded()) throw ConfigError("config file '" + path + "' is not valid JSON");
    return j;
}

inline const char* to_string(ModelKind k) { return k == ModelKind::kKick ? "kick" : "fock"; }
inline const char* to_string(OptimizeTarget t) { return t == OptimizeTarget::kRamanBeat ? "raman_beat" : "pulse_train"; }

/// Resolved configuration in the input schema with every quantity as a bare SI number, so the
/// result can be fed back to parse_config unchanged.
inline json to_json(const RunConfig& cfg) {
    const auto& sc = cfg.scenario;
    json j;
    j["trap"] = {{"rf_frequency", sc.trap.omega_rf}, {"rf_phase", sc.trap.phi_rf}, {"a_z", sc.trap.a_z}, {"q_z", sc.trap.q_z}};
    j["ion"] = {{"qubit_frequency", sc.ion.omega_a}, {"lamb_dicke", sc.ion.eta}};
    if (sc.ion.mass) j["ion"]["mass"] = *sc.ion.mass;
    if (sc.ion.k) j["ion"]["wavenumber"] = *sc.ion.k;
    j["beams"] = {{"raman_beat", sc.drive.raman_beat}, {"beta1", cfg.beams.beta1}, {"beta2", cfg.beams.beta2}, {"dpsi", cfg.beams.dpsi}};
    if (cfg.beams.detuning) j["beams"]["detuning"] = *cfg.beams.detuning;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PulseTrain>) {
                j["envelope"] = {{"shape", "pulse_train"}, {"amps", s.amps}, {"width", s.width}, {"rep_rate", s.rep_rate}, {"t_start", s.t_start}};
            } else {
                const char* name = std::is_same_v<T, ConstantPulse> ? "constant" : "sine";
                j["envelope"] = {{"shape", name}, {"theta", s.theta}, {"tau", s.tau}, {"t_start", s.t_start}};
            }
        },
        sc.drive.envelope.shape());
    j["model"] = {{"kind", to_string(sc.model)},
                  {"include_micromotion", sc.flags.include_micromotion},
                  {"include_backward", sc.flags.include_backward},
                  {"frozen_secular", sc.flags.frozen_secular}};
    j["numerics"] = {{"rtol", sc.numerics.rtol},
                     {"atol", sc.numerics.atol},
                     {"kick_cutoff", sc.kick_cutoff},
                     {"fock_cutoff", sc.fock_cutoff},
                     {"samples", cfg.samples},
                     {"fast_sdk_threshold", cfg.fast_sdk_threshold},
                     {"hierarchy_threshold", cfg.hierarchy_threshold}};
    j["landscape"] = {{"rf_frequency_min", cfg.landscape.rf_frequency_min},
                      {"rf_frequency_max", cfg.landscape.rf_frequency_max},
                      {"rf_frequency_points", cfg.landscape.rf_frequency_points},
                      {"rf_phase_points", cfg.landscape.rf_phase_points}};
    j["sweep"] = {{"parameter", to_string(cfg.sweep.parameter)}, {"span", cfg.sweep.span}, {"points", cfg.sweep.points}};
    j["optimize"] = {{"target", to_string(cfg.optimize.target)},
                     {"budget", cfg.optimize.budget},
                     {"raman_beat_offset", cfg.optimize.raman_beat_offset},
                     {"raman_beat_offset_step", cfg.optimize.raman_beat_offset_step},
                     {"amplitude_step", cfg.optimize.train.amplitude},
                     {"raman_beat_step", cfg.optimize.train.raman_beat},
                     {"rep_rate_step", cfg.optimize.train.rep_rate_ghz * TrainCoordinates::kRepUnit}};
    j["seed"] = cfg.seed;
    return j;
}

/// Reads, overrides and validates a config file. An empty path starts from the defaults.
inline RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {},
                             const LoadOptions& lo = {}) {
    json root = path.empty() ? json::object() : read_json_file(path);
    for (const auto& o : overrides) apply_override(root, o);
    return parse_config(root, lo);
}

}  // namespace sdkick
