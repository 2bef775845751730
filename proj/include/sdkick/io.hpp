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
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdkick/analysis.hpp"
#include "sdkick/errors.hpp"

namespace sdkick {

/// Shortest decimal that reads back to the same double; "nan", "inf" and "-inf" otherwise.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

inline double parse_double(std::string_view s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw ConfigError("bad number '" + std::string(s) + "' in CSV");
    return v;
}

/// Minimal CSV table: a "# config: ..." comment line, a header row, then numeric rows.
class CsvWriter {
   public:
    CsvWriter(std::ostream& out, const nlohmann::json& config, const std::vector<std::string>& header) : out_(out) {
        out_ << "# config: " << config.dump() << '\n';
        row_of(header);
    }

    void row(const std::vector<double>& values) {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) cells.push_back(format_double(v));
        row_of(cells);
    }

   private:
    void row_of(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }
    std::ostream& out_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
            continue;
        }
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_double(c));
        t.rows.push_back(std::move(row));
    }
    if (!have_header) throw ConfigError("CSV has no header row");
    return t;
}

/// Landscape matrix: the header carries the column axis values, the first column the row axis.
inline void write_matrix_csv(std::ostream& out, const SweepResult& r, const nlohmann::json& config) {
    std::vector<std::string> header{r.axis1.name + "\\" + (r.axis2.name.empty() ? std::string("value") : r.axis2.name)};
    if (r.axis2.values.empty()) {
        header.emplace_back("infidelity");
    } else {
        for (double v : r.axis2.values) header.push_back(format_double(v));
    }
    CsvWriter w(out, config, header);
    for (size_t i = 0; i < r.rows(); ++i) {
        std::vector<double> row{r.axis1.values[i]};
        for (size_t c = 0; c < r.cols(); ++c) row.push_back(r.at(i, c));
        w.row(row);
    }
}

/// Inverse of write_matrix_csv for the values and both axes.
inline SweepResult read_matrix_csv(std::istream& in) {
    const auto t = read_csv(in);
    SweepResult r;
    const auto& h0 = t.header.at(0);
    const auto slash = h0.find('\\');
    r.axis1.name = h0.substr(0, slash);
    const bool one_d = t.header.size() == 2 && t.header[1] == "infidelity";
    if (!one_d) {
        r.axis2.name = slash == std::string::npos ? "" : h0.substr(slash + 1);
        for (size_t c = 1; c < t.header.size(); ++c) r.axis2.values.push_back(parse_double(t.header[c]));
    }
    for (const auto& row : t.rows) {
        r.axis1.values.push_back(row.at(0));
        r.values.insert(r.values.end(), row.begin() + 1, row.end());
    }
    return r;
}

inline nlohmann::json axis_json(const Axis& a) { return {{"name", a.name}, {"unit", a.unit}, {"values", a.values}}; }

/// Everything but the value matrix, which lives in the CSV.
inline nlohmann::json sweep_meta(const SweepResult& r, const nlohmann::json& config) {
    nlohmann::json j;
    j["axis1"] = axis_json(r.axis1);
    if (!r.axis2.values.empty()) j["axis2"] = axis_json(r.axis2);
    j["shape"] = {r.rows(), r.cols()};
    j["min"] = r.min_value();
    j["max"] = r.max_value();
    j["failed_cells"] = r.errors;
    j["interrupted"] = r.interrupted;
    j["config"] = config;
    return j;
}

inline nlohmann::json report_json(const OptimizationReport& rep) {
    nlohmann::json j;
    j["names"] = rep.names;
    j["best_params"] = rep.best_params;
    j["best_infidelity"] = rep.best_infidelity;
    j["initial_infidelity"] = rep.initial_value;
    j["evaluations"] = rep.evaluations;
    j["restarts"] = rep.restarts;
    j["budget_exhausted"] = rep.budget_exhausted;
    j["converged"] = rep.converged;
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& e : rep.trace) trace.push_back({e.evaluations, e.best});
    j["trace"] = std::move(trace);
    return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path.string() + "'");
    f << body;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace sdkick
