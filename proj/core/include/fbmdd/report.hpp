#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fbmdd/core.hpp"

namespace fbmdd::report {

enum class OutputFormat { csv, markdown };

/// One experiment description shared by all commands. Flags override
/// config-file values; the CLI performs that merge and hands the final
/// struct here.
struct ExperimentConfig {
    std::vector<double> hurst_list{0.5, 0.6, 0.7, 0.8, 0.9};
    std::size_t n_steps = 2048;
    double horizon = 1.0;
    std::size_t n_paths = 5000;
    std::vector<std::size_t> vitale_n_list{5, 10, 20, 30, 40, 50};
    std::uint64_t master_seed = 42;
    OutputFormat format = OutputFormat::csv;
    std::string output_path;  // empty: no file written
    std::string factor_cache; // empty: no factor cache
    unsigned n_workers = 0;   // 0: automatic
};

/// Throws std::invalid_argument naming the offending field.
void validate_config(const ExperimentConfig& config, bool needs_simulation, bool needs_vitale);

struct Cell {
    enum class Kind { number, text };
    Kind kind = Kind::text;
    double num = 0.0;
    std::string text;

    static Cell number(double x) { return Cell{Kind::number, x, {}}; }
    static Cell label(std::string s) { return Cell{Kind::text, 0.0, std::move(s)}; }
    bool operator==(const Cell&) const = default;
};

struct Table {
    std::vector<std::string> manifest; // key=value lines, written as comments
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
    bool operator==(const Table&) const = default;
};

/// Full-precision round-trip rendering ("%.17g") used in CSV cells.
std::string format_full(double x);
/// Six-significant-digit rendering used for console echo and markdown.
std::string format_pretty(double x);

void write_table(const Table& table, std::ostream& out, OutputFormat format);
void save_table(const Table& table, const std::string& path, OutputFormat format);
/// Parse a CSV produced by write_table back into a Table (manifest
/// comments included). Numeric cells round-trip exactly.
Table parse_csv(std::istream& in);
/// Fixed-width console rendering with 6 significant digits.
std::string render_pretty(const Table& table);

struct SimulateOutcome {
    Table table;
    std::vector<double> row_seconds; // wall time per H row, echoed but not persisted
};

/// One Monte Carlo row per H: the unit-horizon expected maximum loss
/// (simulated at config.horizon and rescaled by self-similarity), its
/// standard error, and the path count.
SimulateOutcome simulate_table(const ExperimentConfig& config);

/// Closed-form bound table, one row per (H, bound entry). Entries whose
/// proof regime excludes the requested H are marked invalid rather than
/// omitted.
Table bounds_table(const ExperimentConfig& config);

/// Numerical lower-bound grid: rows H x {idd, pddd}, one column per
/// family size n.
Table vitale_table(const ExperimentConfig& config);

struct ComparisonRow {
    double h = 0.0;
    bool has_mc = false;
    double mc_mean = 0.0;
    double mc_se = 0.0;
    double baseline_lower = 0.0;
    double comparison_lower = 0.0;
    double comparison_upper = 0.0;
    double baseline_upper = 0.0;
    std::vector<std::pair<std::size_t, double>> idd;  // (n, bound)
    std::vector<std::pair<std::size_t, double>> pddd; // (n, bound)
    std::string closest_lower;
    std::string closest_upper;
    bool ordering_ok = true;
};

/// Check one row's ordering: every lower bound must not exceed any
/// upper bound, the comparison pair must lie strictly inside the
/// baseline pair, and when a Monte Carlo estimate is present every
/// lower bound must be <= mean + 3 SE and every upper bound >= mean -
/// 3 SE. Fills closest_lower/closest_upper and ordering_ok; returns
/// ordering_ok. Exposed so inconsistent inputs can be injected in
/// tests.
bool evaluate_row_ordering(ComparisonRow& row);

struct CompareOutcome {
    Table table;
    std::vector<ComparisonRow> rows;
    bool ordering_violation = false;
};

/// Merge simulation, closed-form bounds, and the numerical bounds into
/// one row per H. n_paths = 0 produces a bounds-only table without the
/// Monte Carlo columns. Any flagged row sets ordering_violation.
CompareOutcome compare_table(const ExperimentConfig& config);

} // namespace fbmdd::report
