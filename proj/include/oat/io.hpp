// Copyright 2026 The oatmetro Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file io.hpp
 * @brief CSV and JSON serialization of states, reports and sweeps.
 *
 * CSV: header row always present, '.' decimal separator, LF line endings,
 * 17 significant digits, non-finite values written as inf / -inf / nan.
 * JSON: one object {"metadata": ..., "records": [...]}; non-finite numbers
 * become the strings "inf" / "-inf" / "nan".
 */

#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "oat/experiments.hpp"
#include "oat/metrology.hpp"
#include "oat/spin_state.hpp"

namespace oat::io {

using json = nlohmann::ordered_json;

inline std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json number(double v)
{
    if (std::isfinite(v)) {
        return v;
    }
    return format_number(v);
}

/// Inverse of number(): accepts numbers and the non-finite string forms.
inline double to_double(const json& j)
{
    if (j.is_number()) {
        return j.get<double>();
    }
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::invalid_argument("to_double: not a number: " + s);
}

inline void write_csv_row(std::ostream& os, const std::vector<double>& values)
{
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os << ',';
        os << format_number(values[i]);
    }
    os << '\n';
}

inline void write_csv_header(std::ostream& os, const std::vector<std::string_view>& names)
{
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) os << ',';
        os << names[i];
    }
    os << '\n';
}

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

inline void write_state_csv(std::ostream& os, const SpinState& s)
{
    write_csv_header(os, {"m", "re", "im", "prob"});
    for (Eigen::Index i = 0; i < s.dim(); ++i) {
        const cplx c = s.amplitude(i);
        write_csv_row(os, {s.m(i), c.real(), c.imag(), std::norm(c)});
    }
}

inline json state_records(const SpinState& s)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < s.dim(); ++i) {
        const cplx c = s.amplitude(i);
        rows.push_back({{"m", number(s.m(i))},
                        {"re", number(c.real())},
                        {"im", number(c.imag())},
                        {"prob", number(std::norm(c))}});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json direction_json(const Direction& n)
{
    return json::array({number(n.x()), number(n.y()), number(n.z())});
}

inline json report_record(const MetrologyReport& r)
{
    return {{"alpha", number(r.alpha)},
            {"xi2_optimized", number(r.xi2_optimized)},
            {"xi2_direction", direction_json(r.xi2_direction)},
            {"qfi_bs", number(r.qfi_bs)},
            {"qfi_mzi", number(r.qfi_mzi)},
            {"qfi_optimized", number(r.qfi_optimized)},
            {"qfi_direction", direction_json(r.qfi_direction)},
            {"fi_bs", number(r.fi_bs)},
            {"fi_mzi", number(r.fi_mzi)},
            {"theta_probe", number(r.theta_probe)}};
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// CSV columns of each sweep kind; the first column is the grid value except
/// for scan-sigma, which leads with theta.
inline std::vector<std::string_view> sweep_columns(std::string_view kind)
{
    if (kind == "scan-alpha")
        return {"alpha", "xi2_opt", "inv_xi2_opt", "qfi_opt", "qfi_bs", "qfi_mzi", "fi_bs", "fi_mzi"};
    if (kind == "scan-sigma") return {"theta", "sigma", "fi", "fi_ratio"};
    if (kind == "scan-dalpha") return {"dalpha", "fi_simulated", "fi_predicted", "rel_dev"};
    if (kind == "fidelity") return {"dtheta", "fidelity", "fi_local_estimate"};
    throw std::invalid_argument("sweep_columns: unknown sweep kind " + std::string(kind));
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& result)
{
    const auto cols = sweep_columns(result.kind);
    write_csv_header(os, cols);
    const bool sigma = result.kind == "scan-sigma";
    for (const auto& r : result.records) {
        std::vector<double> row;
        if (sigma) {
            row = {r.context_value("theta"), r.grid_value};
        } else {
            row = {r.grid_value};
        }
        for (std::size_t c = row.size(); c < cols.size(); ++c) {
            row.push_back(r.metric(cols[c]));
        }
        write_csv_row(os, row);
    }
}

inline json named_values(const NamedValues& values)
{
    json out = json::object();
    for (const auto& [k, v] : values) {
        out[k] = number(v);
    }
    return out;
}

inline json sweep_records(const SweepResult& result)
{
    json rows = json::array();
    for (const auto& r : result.records) {
        rows.push_back({{"grid_value", number(r.grid_value)},
                        {"metrics", named_values(r.metrics)},
                        {"context", named_values(r.context)}});
    }
    return rows;
}

/// Sweep-derived metadata entries (fit and reference levels).
inline void add_sweep_metadata(json& metadata, const SweepResult& result)
{
    metadata["kind"] = result.kind;
    if (result.fit) {
        metadata["fit"] = {{"prefactor", number(result.fit->prefactor)},
                           {"exponent", number(result.fit->exponent)}};
    }
    if (!result.references.empty()) {
        metadata["references"] = named_values(result.references);
    }
}

inline json document(json metadata, json records)
{
    json doc = json::object();
    doc["metadata"] = std::move(metadata);
    doc["records"] = std::move(records);
    return doc;
}

// ---------------------------------------------------------------------------
// Two-column CSV input
// ---------------------------------------------------------------------------

/// Reads x,y pairs; a non-numeric first line is taken as a header. Blank
/// lines are skipped.
inline std::pair<std::vector<double>, std::vector<double>> read_two_column_csv(std::istream& is)
{
    std::vector<double> xs;
    std::vector<double> ys;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::invalid_argument("line " + std::to_string(lineno) + ": expected two columns");
        }
        try {
            std::size_t used_x = 0;
            std::size_t used_y = 0;
            const std::string a = line.substr(0, comma);
            const std::string b = line.substr(comma + 1);
            const double x = std::stod(a, &used_x);
            const double y = std::stod(b, &used_y);
            if (a.find_first_not_of(" \t", used_x) != std::string::npos ||
                b.substr(used_y).find_first_not_of(" \t") != std::string::npos) {
                throw std::invalid_argument("trailing characters");
            }
            xs.push_back(x);
            ys.push_back(y);
        } catch (const std::exception&) {
            if (lineno == 1 && xs.empty()) continue;
            throw std::invalid_argument("line " + std::to_string(lineno) + ": not numeric: " + line);
        }
    }
    return {xs, ys};
}

} // namespace oat::io
