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

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sdkick/analysis.hpp"
#include "sdkick/beams.hpp"
#include "sdkick/config.hpp"
#include "sdkick/errors.hpp"
#include "sdkick/fock_model.hpp"
#include "sdkick/io.hpp"
#include "sdkick/kick_model.hpp"

namespace sdkick {

namespace fs = std::filesystem;

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitInterrupted = 130 };

/// Set from a signal handler to stop long sweeps; finished cells are still written.
inline std::atomic<bool>& interrupt_flag() {
    static std::atomic<bool> flag{false};
    return flag;
}

struct CliContext {
    RunConfig cfg;
    json resolved;
    fs::path out_dir;
    unsigned threads = 0;
    std::ostream& log;
};

namespace cli_detail {

inline std::string kick_label(int s, int n) { return "P" + std::to_string(s) + "[n=" + std::to_string(n) + "]"; }

inline int cmd_simulate(CliContext& ctx) {
    const auto& sc = ctx.cfg.scenario;
    const auto& env = sc.drive.envelope;
    const auto times = linspace(env.t_start(), env.t_end(), ctx.cfg.samples);
    std::ofstream csv(ctx.out_dir / "simulate.csv", std::ios::binary);
    if (!csv) throw ConfigError("cannot write into '" + ctx.out_dir.string() + "'");
    json summary;
    summary["model"] = to_string(sc.model);
    PropagationStats stats;

    if (sc.model == ModelKind::kKick) {
        const int n_max = sc.kick_cutoff;
        std::vector<std::string> header{"t", "omega0"};
        for (int s = 0; s < 2; ++s) {
            for (int n = -n_max; n <= n_max; ++n) header.push_back(kick_label(s, n));
        }
        CsvWriter w(csv, ctx.resolved, header);
        KickHamiltonian h(sc.drive, sc.flags, n_max);
        KickState state = KickState::ground(n_max);
        double edge = 0.0;
        for (size_t i = 0; i < times.size(); ++i) {
            if (i > 0) {
                auto run = evolve_kick(std::move(state), h, times[i - 1], times[i], sc.numerics);
                state = std::move(run.state);
                stats += run.stats;
                edge = std::max(edge, run.edge_amplitude);
            }
            std::vector<double> row{times[i], env.value(times[i])};
            for (int s = 0; s < 2; ++s) {
                for (int n = -n_max; n <= n_max; ++n) row.push_back(state.population(s, n));
            }
            w.row(row);
        }
        summary["infidelity"] = sdk_infidelity(state);
        summary["target_population"] = state.population(1, 1);
        summary["norm_drift"] = std::abs(state.norm() - 1.0);
        summary["ladder_edge_amplitude"] = edge;
        summary["truncated"] = edge > kKickTruncationGuard;
    } else {
        const auto setup = sc.fock_setup();
        const cplx alpha = fock_target_alpha(setup);
        const auto target = coherent_state(alpha, setup.m_max);
        CsvWriter w(csv, ctx.resolved, {"t", "omega0", "P0", "P1", "P_target", "mean_phonons"});
        FockHamiltonian h(setup);
        FockState state = FockState::ground(setup.m_max);
        double tail = 0.0;
        for (size_t i = 0; i < times.size(); ++i) {
            if (i > 0) {
                auto run = evolve_fock(std::move(state), h, times[i - 1], times[i], sc.numerics);
                state = std::move(run.state);
                stats += run.stats;
                tail = std::max(tail, run.tail_mass);
            }
            double mean_n = 0.0;
            for (int s = 0; s < 2; ++s) {
                for (int m = 0; m < setup.m_max; ++m) mean_n += m * std::norm(state.at(s, m));
            }
            w.row({times[i], env.value(times[i]), state.spin_population(0), state.spin_population(1),
                   std::norm(state.overlap(1, target)), mean_n});
        }
        summary["infidelity"] = sdk_infidelity(state, alpha);
        summary["target_alpha"] = {alpha.real(), alpha.imag()};
        summary["norm_drift"] = std::abs(state.norm() - 1.0);
        summary["fock_tail_mass"] = tail;
        summary["truncated"] = tail > kFockTailGuard;
    }
    summary["steps"] = stats.steps;
    summary["rejected_steps"] = stats.rejected;
    summary["pulse_area"] = env.area();
    summary["config"] = ctx.resolved;
    write_json(ctx.out_dir / "simulate_summary.json", summary);
    ctx.log << "simulate: infidelity " << format_double(summary["infidelity"].get<double>()) << '\n';
    return kExitOk;
}

inline GridOptions grid_options(const CliContext& ctx) { return GridOptions{ctx.threads, &interrupt_flag(), &ctx.log}; }

inline int cmd_landscape(CliContext& ctx) {
    const auto& sc = ctx.cfg.scenario;
    if (sc.model != ModelKind::kFock) throw ConfigError("landscape needs '/model/kind' = \"fock\"");
    const auto& L = ctx.cfg.landscape;
    const auto omegas = linspace(L.rf_frequency_min, L.rf_frequency_max, L.rf_frequency_points);
    const auto phis = periodic_grid(L.rf_phase_points);
    ctx.log << "landscape: " << phis.size() << " x " << omegas.size() << " cells\n";
    const auto res = landscape(sc, omegas, phis, grid_options(ctx));
    {
        std::ofstream f(ctx.out_dir / "landscape.csv", std::ios::binary);
        write_matrix_csv(f, res, ctx.resolved);
    }
    {
        std::ofstream f(ctx.out_dir / "landscape_loci.csv", std::ios::binary);
        CsvWriter w(f, ctx.resolved, {"omega_rf", "phi_rf_n0", "phi_rf_n1"});
        const auto& env = sc.drive.envelope;
        for (const auto& l : analytic_loci(omegas, env.t_start(), env.duration())) w.row({l.omega_rf, l.phi_n0, l.phi_n1});
    }
    write_json(ctx.out_dir / "landscape_meta.json", sweep_meta(res, ctx.resolved));
    ctx.log << "landscape: min " << format_double(res.min_value()) << ", " << res.errors.size() << " failed cells\n";
    return res.interrupted ? kExitInterrupted : kExitOk;
}

inline int cmd_sweep(CliContext& ctx) {
    const auto& S = ctx.cfg.sweep;
    const auto res = robustness_sweep(ctx.cfg.scenario, S.parameter, S.span, S.points, grid_options(ctx));
    {
        std::ofstream f(ctx.out_dir / "sweep.csv", std::ios::binary);
        write_matrix_csv(f, res, ctx.resolved);
    }
    write_json(ctx.out_dir / "sweep_summary.json", sweep_meta(res, ctx.resolved));
    ctx.log << "sweep: max infidelity " << format_double(res.max_value()) << '\n';
    return res.interrupted ? kExitInterrupted : kExitOk;
}

inline int cmd_optimize(CliContext& ctx) {
    const auto& O = ctx.cfg.optimize;
    TunedDrive tuned = O.target == OptimizeTarget::kRamanBeat
                           ? optimize_raman_beat(ctx.cfg.scenario, O.raman_beat_offset, O.raman_beat_offset_step, O.budget)
                           : optimize_pulse_train(ctx.cfg.scenario, O.budget, O.train);
    RunConfig best = ctx.cfg;
    best.scenario.drive = tuned.drive;
    best.beams.dphi_rate = tuned.drive.raman_beat;
    json j = report_json(tuned.report);
    j["target"] = to_string(O.target);
    j["optimized_config"] = to_json(best);
    j["config"] = ctx.resolved;
    write_json(ctx.out_dir / "optimize_report.json", j);
    ctx.log << "optimize: best infidelity " << format_double(tuned.report.best_infidelity) << " after "
            << tuned.report.evaluations << " evaluations\n";
    return kExitOk;
}

inline int cmd_check(CliContext& ctx) {
    const auto& cfg = ctx.cfg;
    const auto& sc = cfg.scenario;
    const auto& env = sc.drive.envelope;
    json j;
    const bool stable = sc.trap.stability() >= 0.0;
    j["stability"] = {{"a_z_plus_half_q_z_squared", sc.trap.stability()}, {"stable", stable}};
    if (stable) {
        const auto f = validate_fast_sdk(sc.trap, env.duration(), cfg.fast_sdk_threshold);
        j["secular_frequency"] = secular_frequency(sc.trap);
        j["fast_sdk"] = {{"omega_s_tau", f.omega_s_tau},
                         {"fast", f.fast},
                         {"micromotion_correction", f.micromotion_correction},
                         {"threshold", f.threshold}};
        j["micromotion_phase"] = {
            {"approximate", micromotion_phase(sc.trap, env.t_start(), env.duration(), MicromotionPhase::kApproximate)},
            {"exact", micromotion_phase(sc.trap, env.t_start(), env.duration(), MicromotionPhase::kExact)}};
    }
    if (cfg.beams.detuning) {
        const auto h = validate_hierarchy(cfg.beams, env.bandwidth(), sc.ion.omega_a, cfg.hierarchy_threshold);
        j["hierarchy"] = {{"raman_beat_over_detuning", h.beat_ratio},
                          {"qubit_over_detuning", h.qubit_ratio},
                          {"bandwidth_over_detuning", h.bandwidth_ratio},
                          {"ok", h.ok()},
                          {"threshold", h.threshold},
                          {"small_differential_light_shift_assumed", h.small_differential_light_shift_assumed}};
    } else {
        j["hierarchy"] = {{"skipped", "no /beams/detuning given"}};
    }
    j["backward_bound"] = backward_bound(env.area(), sc.ion.omega_a, env.duration());
    j["phase_match_phi"] = {phase_match_phi(sc.trap.omega_rf, env.t_start(), env.duration(), 0),
                            phase_match_phi(sc.trap.omega_rf, env.t_start(), env.duration(), 1)};
    j["config"] = ctx.resolved;
    write_json(ctx.out_dir / "check.json", j);
    if (!stable) {
        ctx.log << "check: unstable trap, a_z + q_z^2/2 = " << format_double(sc.trap.stability()) << " < 0\n";
        return kExitConfig;
    }
    ctx.log << "check: ok\n";
    return kExitOk;
}

}  // namespace cli_detail

/// Entry point shared by the executable and the tests. argv[0] is the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Raman spin-dependent kick simulator", "sdkick"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir;
    unsigned threads = 0;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_dir, "output directory (default: $SDKICK_OUT_DIR or .)");
    app.add_option("--threads", threads, "worker threads for sweeps, 0 = all cores");
    app.add_option("--override", overrides, "dotted-path override, e.g. trap.rf_phase=\"0.16 turn\"");
    app.fallthrough();
    auto* simulate = app.add_subcommand("simulate", "propagate one kick, write time series and summary");
    auto* land = app.add_subcommand("landscape", "infidelity over RF frequency and phase");
    auto* sweep = app.add_subcommand("sweep", "robustness to pulse-area or Raman-beat errors");
    auto* optimize = app.add_subcommand("optimize", "tune the Raman beat or a pulse train");
    auto* check = app.add_subcommand("check", "stability, fast-kick and frequency-hierarchy diagnostics");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfig;
    }

    try {
        LoadOptions lo;
        lo.allow_unstable_trap = check->parsed();
        CliContext ctx{load_config(config_path, overrides, lo), {}, {}, threads, err};
        ctx.resolved = to_json(ctx.cfg);
        if (!out_dir.empty()) {
            ctx.out_dir = out_dir;
        } else if (const char* env = std::getenv("SDKICK_OUT_DIR"); env != nullptr && *env != '\0') {
            ctx.out_dir = env;
        } else {
            ctx.out_dir = ".";
        }
        std::error_code ec;
        fs::create_directories(ctx.out_dir, ec);
        if (ec) throw ConfigError("cannot create output directory '" + ctx.out_dir.string() + "': " + ec.message());

        if (simulate->parsed()) return cli_detail::cmd_simulate(ctx);
        if (land->parsed()) return cli_detail::cmd_landscape(ctx);
        if (sweep->parsed()) return cli_detail::cmd_sweep(ctx);
        if (optimize->parsed()) return cli_detail::cmd_optimize(ctx);
        if (check->parsed()) return cli_detail::cmd_check(ctx);
    } catch (const ConfigError& e) {
        err << "sdkick: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        err << "sdkick: numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const nlohmann::json::exception& e) {
        err << "sdkick: config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}

}  // namespace sdkick
