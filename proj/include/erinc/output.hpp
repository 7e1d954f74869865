#pragma once

// Deterministic result tables. Cells carry native types; CSV rendering is
// locale-free (C locale, '.' decimal separator, doubles via %.17g) and JSON
// rendering goes through nlohmann's shortest-round-trip formatting. Both are
// byte-stable for identical inputs, which the determinism contract relies on.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace erinc {

using Cell = std::variant<std::monostate, std::int64_t, std::uint64_t, double, bool, std::string>;

std::string format_cell(const Cell& cell);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);

    // Header row, then data rows. A "# generated <UTC timestamp>" comment
    // line precedes the header unless deterministic is set.
    void write_csv(std::ostream& os, bool deterministic) const;

    nlohmann::json to_json() const;

    // Renders by extension: ".json" -> pretty JSON, anything else -> CSV.
    std::string render(const std::string& path_hint, bool deterministic) const;

    // Writes to the path (extension picks the format) or, for an empty
    // path, CSV to stdout.
    void emit(const std::string& out_path, bool deterministic) const;
};

// Wilson 95% score interval for k successes out of n trials.
std::pair<double, double> wilson_interval(std::int64_t successes, std::int64_t trials);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    std::int64_t points = 0;
};

// Unweighted least squares of y on x; requires at least two points.
LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

// Runs fn(i) for i in [0, tasks) on `workers` threads. Each index is an
// independent task writing only to its own slot, so results are identical
// for any worker count. The first exception, if any, is rethrown after join.
void run_parallel(std::int64_t tasks, int workers, const std::function<void(std::int64_t)>& fn);

} // namespace erinc
