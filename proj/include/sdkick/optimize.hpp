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
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "sdkick/errors.hpp"

namespace sdkick {

struct OptimizeOptions {
    size_t budget = 1000;            // objective evaluations
    std::vector<double> step;        // initial simplex edge per coordinate
    std::vector<double> lower;       // empty: unbounded
    std::vector<double> upper;       // empty: unbounded
    double xtol = 1e-10;             // simplex diameter, relative to max(1, |x_best|)
    double ftol = 0.0;               // stop when the simplex value spread is below this
    size_t max_restarts = 50;        // restarts from the best point after convergence
};

struct TraceEntry {
    size_t evaluations = 0;
    double best = 0.0;
};

struct OptimizationReport {
    std::vector<std::string> names;
    std::vector<double> best_params;
    double best_infidelity = std::numeric_limits<double>::infinity();
    double initial_value = std::numeric_limits<double>::infinity();
    std::vector<TraceEntry> trace;  // one entry per simplex iteration
    size_t evaluations = 0;
    size_t restarts = 0;
    bool budget_exhausted = false;
    bool converged = false;
};

/// Bounded Nelder-Mead simplex search (reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5). Bounds are enforced by projecting every trial point. After the simplex
/// collapses the search restarts around the best point until a restart no longer improves
/// or the budget runs out. Fully deterministic for a deterministic objective.
class NelderMead {
   public:
    using Objective = std::function<double(std::span<const double>)>;

    NelderMead(Objective f, OptimizeOptions opt) : f_(std::move(f)), opt_(std::move(opt)) {}

    OptimizationReport run(std::vector<double> init, std::vector<std::string> names = {}) {
        const size_t n = init.size();
        if (n == 0) throw ConfigError("optimize: empty parameter vector");
        if (opt_.budget < n + 1) throw ConfigError("optimize: budget must be at least dimension + 1");
        if (opt_.step.empty()) {
            opt_.step.resize(n);
            for (size_t i = 0; i < n; ++i) opt_.step[i] = init[i] != 0.0 ? 0.05 * std::abs(init[i]) : 0.00025;
        }
        if (opt_.step.size() != n) throw ConfigError("optimize: step size vector has wrong length");
        if ((!opt_.lower.empty() && opt_.lower.size() != n) || (!opt_.upper.empty() && opt_.upper.size() != n)) {
            throw ConfigError("optimize: bounds have wrong length");
        }
        report_ = {};
        report_.names = std::move(names);
        if (report_.names.empty()) {
            for (size_t i = 0; i < n; ++i) report_.names.push_back("x" + std::to_string(i));
        }
        project(init);
        report_.best_params = init;

        std::vector<double> step = opt_.step;
        double last_restart_best = std::numeric_limits<double>::infinity();
        for (size_t round = 0;; ++round) {
            const bool finished = simplex_round(report_.best_params, step);
            if (round == 0) report_.initial_value = first_value_;
            if (finished || report_.evaluations >= opt_.budget) break;
            // Converged: restart around the best point unless the last restart gained nothing.
            report_.converged = true;
            if (round >= opt_.max_restarts) break;
            if (report_.best_infidelity >= last_restart_best) break;
            last_restart_best = report_.best_infidelity;
            ++report_.restarts;
        }
        report_.budget_exhausted = report_.evaluations >= opt_.budget;
        return report_;
    }

   private:
    struct Vertex {
        std::vector<double> x;
        double f;
    };

    void project(std::vector<double>& x) const {
        for (size_t i = 0; i < x.size(); ++i) {
            if (!opt_.lower.empty()) x[i] = std::max(x[i], opt_.lower[i]);
            if (!opt_.upper.empty()) x[i] = std::min(x[i], opt_.upper[i]);
        }
    }

    /// Returns NaN-safe objective value and records the running best.
    double eval(std::vector<double>& x) {
        project(x);
        double v = f_(x);
        if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
        ++report_.evaluations;
        if (report_.evaluations == 1) first_value_ = v;
        if (v < report_.best_infidelity) {
            report_.best_infidelity = v;
            report_.best_params = x;
        }
        return v;
    }

    bool out_of_budget() const { return report_.evaluations >= opt_.budget; }

    /// One simplex search from x0. Returns true when the budget ran out.
    bool simplex_round(std::vector<double> x0, const std::vector<double>& step) {
        const size_t n = x0.size();
        std::vector<Vertex> s;
        s.reserve(n + 1);
        {
            auto x = x0;
            const double v = eval(x);
            s.push_back({x, v});
        }
        for (size_t i = 0; i < n; ++i) {
            if (out_of_budget()) return true;
            auto x = x0;
            x[i] += step[i];
            if (!opt_.upper.empty() && x[i] > opt_.upper[i]) x[i] = x0[i] - step[i];
            const double v = eval(x);
            s.push_back({x, v});
        }
        auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
        std::vector<double> centroid(n), trial(n);
        while (true) {
            std::stable_sort(s.begin(), s.end(), by_value);
            report_.trace.push_back({report_.evaluations, report_.best_infidelity});
            if (diameter(s) <= opt_.xtol * std::max(1.0, norm(s.front().x))) return false;
            if (opt_.ftol > 0.0 && s.back().f - s.front().f <= opt_.ftol) return false;
            if (out_of_budget()) return true;

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (size_t k = 0; k < n; ++k) {
                for (size_t i = 0; i < n; ++i) centroid[i] += s[k].x[i] / static_cast<double>(n);
            }
            auto along = [&](double coeff) {
                std::vector<double> x(n);
                for (size_t i = 0; i < n; ++i) x[i] = centroid[i] + coeff * (s[n].x[i] - centroid[i]);
                return x;
            };

            auto xr = along(-1.0);
            const double fr = eval(xr);
            if (fr < s[0].f) {
                if (out_of_budget()) {
                    s[n] = {xr, fr};
                    continue;
                }
                auto xe = along(-2.0);
                const double fe = eval(xe);
                s[n] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
                continue;
            }
            if (fr < s[n - 1].f) {
                s[n] = {xr, fr};
                continue;
            }
            if (out_of_budget()) continue;
            // Contraction: outside if the reflection beat the worst point, inside otherwise.
            const bool outside = fr < s[n].f;
            auto xc = along(outside ? -0.5 : 0.5);
            const double fc = eval(xc);
            if (fc < (outside ? fr : s[n].f)) {
                s[n] = {xc, fc};
                continue;
            }
            // Shrink towards the best vertex.
            for (size_t k = 1; k <= n; ++k) {
                if (out_of_budget()) break;
                for (size_t i = 0; i < n; ++i) s[k].x[i] = s[0].x[i] + 0.5 * (s[k].x[i] - s[0].x[i]);
                s[k].f = eval(s[k].x);
            }
        }
    }

    static double norm(const std::vector<double>& x) {
        return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
    }

    static double diameter(const std::vector<Vertex>& s) {
        double d = 0.0;
        for (size_t k = 1; k < s.size(); ++k) {
            double acc = 0.0;
            for (size_t i = 0; i < s[0].x.size(); ++i) acc += (s[k].x[i] - s[0].x[i]) * (s[k].x[i] - s[0].x[i]);
            d = std::max(d, std::sqrt(acc));
        }
        return d;
    }

    Objective f_;
    OptimizeOptions opt_;
    OptimizationReport report_;
    double first_value_ = std::numeric_limits<double>::infinity();
};

inline OptimizationReport optimize(NelderMead::Objective objective, std::vector<double> init, OptimizeOptions opt,
                                   std::vector<std::string> names = {}) {
    return NelderMead(std::move(objective), std::move(opt)).run(std::move(init), std::move(names));
}

}  // namespace sdkick
