#include "fbmdd/report.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fbmdd/bounds.hpp"
#include "fbmdd/simulation.hpp"
#include "fbmdd/vitale.hpp"

namespace fbmdd::report {

namespace {

std::string join_doubles(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += format_full(xs[i]);
    }
    return out;
}

std::string join_sizes(const std::vector<std::size_t>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += std::to_string(xs[i]);
    }
    return out;
}

std::vector<std::string> manifest_lines(const ExperimentConfig& config,
                                        const std::string& command) {
    std::vector<std::string> lines;
    lines.push_back("command=" + command);
    lines.push_back("hurst=" + join_doubles(config.hurst_list));
    lines.push_back("steps=" + std::to_string(config.n_steps));
    lines.push_back("horizon=" + format_full(config.horizon));
    lines.push_back("paths=" + std::to_string(config.n_paths));
    lines.push_back("vitale_n=" + join_sizes(config.vitale_n_list));
    lines.push_back("seed=" + std::to_string(config.master_seed));
    lines.push_back("algorithm=" + sim::SeedManifest::default_algorithm());
    return lines;
}

sim::CholeskyFactor make_factor(const ExperimentConfig& config, const HurstParameter& h) {
    const TimeGrid grid(config.horizon, config.n_steps);
    if (config.factor_cache.empty()) {
        return sim::cholesky_factorize(sim::build_covariance_matrix(grid, h));
    }
    if (config.horizon != 1.0) {
        throw std::invalid_argument("factor-cache: only unit-horizon factors are cached");
    }
    const std::filesystem::path path(config.factor_cache);
    if (std::filesystem::exists(path)) {
        sim::CholeskyFactor factor = sim::load_factor(path);
        if (factor.hurst().value() != h.value() || factor.dim() != config.n_steps) {
            throw std::runtime_error("factor-cache: cached factor has H=" +
                                     format_full(factor.hurst().value()) + ", n=" +
                                     std::to_string(factor.dim()) + " but the run requests H=" +
                                     format_full(h.value()) + ", n=" +
                                     std::to_string(config.n_steps));
        }
        return factor;
    }
    sim::CholeskyFactor factor = sim::cholesky_factorize(sim::build_covariance_matrix(grid, h));
    sim::save_factor(path, factor);
    return factor;
}

const char* target_name(bounds::BoundTarget target) {
    switch (target) {
        case bounds::BoundTarget::expected_sup: return "E(S)";
        case bounds::BoundTarget::expected_inf: return "E(I)";
        case bounds::BoundTarget::expected_range: return "E(R)";
        case bounds::BoundTarget::expected_max_loss: return "E(M)";
        case bounds::BoundTarget::tail_probability: return "P(M>x)";
    }
    return "?";
}

} // namespace

void validate_config(const ExperimentConfig& config, bool needs_simulation, bool needs_vitale) {
    if (config.hurst_list.empty()) {
        throw std::invalid_argument("config error: hurst list must not be empty");
    }
    for (double h : config.hurst_list) {
        if (!(h > 0.0 && h < 1.0)) {
            throw std::invalid_argument("config error: hurst values must lie in (0,1)");
        }
    }
    if (config.n_steps < 1) {
        throw std::invalid_argument("config error: steps must be >= 1");
    }
    if (!(config.horizon > 0.0)) {
        throw std::invalid_argument("config error: horizon must be positive");
    }
    if (needs_simulation && config.n_paths < 2) {
        throw std::invalid_argument("config error: paths must be >= 2 when simulation runs");
    }
    if (needs_vitale) {
        if (config.vitale_n_list.empty()) {
            throw std::invalid_argument("config error: vitale_n list must not be empty");
        }
        for (std::size_t n : config.vitale_n_list) {
            if (n < 1 || n > 200) {
                throw std::invalid_argument("config error: vitale_n values must lie in [1,200]");
            }
        }
    }
    if (!config.factor_cache.empty() && config.hurst_list.size() != 1) {
        throw std::invalid_argument(
            "config error: factor-cache holds one factor, so it requires a single hurst value");
    }
}

std::string format_full(double x) {
    // Shortest representation that parses back to the identical double.
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string format_pretty(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

void write_table(const Table& table, std::ostream& out, OutputFormat format) {
    if (format == OutputFormat::csv) {
        for (const auto& line : table.manifest) {
            out << "# " << line << '\n';
        }
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            out << (c ? "," : "") << table.header[c];
        }
        out << '\n';
        for (const auto& row : table.rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                out << (c ? "," : "");
                out << (row[c].kind == Cell::Kind::number ? format_full(row[c].num)
                                                          : row[c].text);
            }
            out << '\n';
        }
        return;
    }
    for (const auto& line : table.manifest) {
        out << "<!-- " << line << " -->\n";
    }
    out << '|';
    for (const auto& name : table.header) {
        out << ' ' << name << " |";
    }
    out << "\n|";
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        out << " --- |";
    }
    out << '\n';
    for (const auto& row : table.rows) {
        out << '|';
        for (const auto& cell : row) {
            out << ' '
                << (cell.kind == Cell::Kind::number ? format_pretty(cell.num) : cell.text)
                << " |";
        }
        out << '\n';
    }
}

void save_table(const Table& table, const std::string& path, OutputFormat format) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open output file: " + path);
    }
    write_table(table, out, format);
    if (!out) {
        throw std::runtime_error("write failed for output file: " + path);
    }
}

Table parse_csv(std::istream& in) {
    Table table;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            std::size_t start = 1;
            if (start < line.size() && line[start] == ' ') {
                ++start;
            }
            table.manifest.push_back(line.substr(start));
            continue;
        }
        std::vector<std::string> fields;
        std::string field;
        std::stringstream ss(line);
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        if (!line.empty() && line.back() == ',') {
            fields.push_back("");
        }
        if (!header_seen) {
            table.header = fields;
            header_seen = true;
            continue;
        }
        std::vector<Cell> row;
        row.reserve(fields.size());
        for (const auto& f : fields) {
            char* end = nullptr;
            const double x = std::strtod(f.c_str(), &end);
            if (!f.empty() && end == f.c_str() + f.size()) {
                row.push_back(Cell::number(x));
            } else {
                row.push_back(Cell::label(f));
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string render_pretty(const Table& table) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back(table.header);
    for (const auto& row : table.rows) {
        std::vector<std::string> r;
        r.reserve(row.size());
        for (const auto& cell : row) {
            r.push_back(cell.kind == Cell::Kind::number ? format_pretty(cell.num) : cell.text);
        }
        cells.push_back(std::move(r));
    }
    std::vector<std::size_t> width;
    for (const auto& row : cells) {
        if (width.size() < row.size()) {
            width.resize(row.size(), 0);
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            width[c] = std::max(width[c], row[c].size());
        }
    }
    std::string out;
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) {
                out += "  ";
            }
            out += row[c];
            out.append(width[c] - row[c].size(), ' ');
        }
        out += '\n';
    }
    return out;
}

SimulateOutcome simulate_table(const ExperimentConfig& config) {
    validate_config(config, true, false);
    SimulateOutcome outcome;
    outcome.table.manifest = manifest_lines(config, "simulate");
    outcome.table.header = {"h", "max_loss_mean", "std_error", "paths"};
    for (double hv : config.hurst_list) {
        const HurstParameter h(hv);
        const auto start = std::chrono::steady_clock::now();
        const sim::CholeskyFactor factor = make_factor(config, h);
        sim::SeedManifest seed;
        seed.master_seed = config.master_seed;
        const sim::McEstimate est =
            sim::monte_carlo_max_loss(factor, config.n_paths, seed, config.n_workers);
        const double scale = std::pow(config.horizon, hv);
        const auto stop = std::chrono::steady_clock::now();
        outcome.table.rows.push_back({Cell::number(hv), Cell::number(est.mean / scale),
                                      Cell::number(est.std_error / scale),
                                      Cell::number(static_cast<double>(est.n_paths))});
        outcome.row_seconds.push_back(std::chrono::duration<double>(stop - start).count());
    }
    return outcome;
}

Table bounds_table(const ExperimentConfig& config) {
    validate_config(config, false, false);
    Table table;
    table.manifest = manifest_lines(config, "bounds");
    table.header = {"h", "target", "kind", "label", "value", "valid", "source"};
    for (double hv : config.hurst_list) {
        const bounds::BoundReport report = bounds::full_report(HurstParameter(hv), config.horizon);
        for (const auto& entry : report.entries) {
            table.rows.push_back(
                {Cell::number(hv), Cell::label(target_name(entry.target)),
                 Cell::label(entry.kind == bounds::BoundKind::lower ? "lower" : "upper"),
                 Cell::label(entry.label), Cell::number(entry.value),
                 Cell::label(entry.in_regime ? "yes" : "out of proven regime"),
                 Cell::label(entry.source)});
        }
    }
    return table;
}

Table vitale_table(const ExperimentConfig& config) {
    validate_config(config, false, true);
    Table table;
    table.manifest = manifest_lines(config, "vitale");
    table.header = {"h", "bound"};
    for (std::size_t n : config.vitale_n_list) {
        table.header.push_back("n" + std::to_string(n));
    }
    for (double hv : config.hurst_list) {
        const HurstParameter h(hv);
        std::vector<Cell> idd_row{Cell::number(hv), Cell::label("idd")};
        std::vector<Cell> pddd_row{Cell::number(hv), Cell::label("pddd")};
        for (std::size_t n : config.vitale_n_list) {
            const vitale::VitaleBounds vb = vitale::lower_bounds(n, h);
            idd_row.push_back(Cell::number(vb.independent.bound));
            pddd_row.push_back(Cell::number(vb.comonotone.bound));
        }
        table.rows.push_back(std::move(idd_row));
        table.rows.push_back(std::move(pddd_row));
    }
    return table;
}

bool evaluate_row_ordering(ComparisonRow& row) {
    struct Named {
        std::string label;
        double value;
    };
    std::vector<Named> lowers{{"baseline", row.baseline_lower},
                              {"comparison", row.comparison_lower}};
    for (const auto& [n, b] : row.idd) {
        lowers.push_back({"idd(n=" + std::to_string(n) + ")", b});
    }
    for (const auto& [n, b] : row.pddd) {
        lowers.push_back({"pddd(n=" + std::to_string(n) + ")", b});
    }
    const std::vector<Named> uppers{{"comparison", row.comparison_upper},
                                    {"baseline", row.baseline_upper}};

    bool ok = true;
    for (const auto& lo : lowers) {
        for (const auto& up : uppers) {
            if (lo.value > up.value) {
                ok = false;
            }
        }
    }
    // The comparison pair must improve on the baseline pair strictly.
    if (!(row.comparison_lower > row.baseline_lower && row.comparison_upper < row.baseline_upper)) {
        ok = false;
    }
    if (row.has_mc) {
        const double lo_gate = row.mc_mean + 3.0 * row.mc_se;
        const double hi_gate = row.mc_mean - 3.0 * row.mc_se;
        for (const auto& lo : lowers) {
            if (lo.value > lo_gate) {
                ok = false;
            }
        }
        for (const auto& up : uppers) {
            if (up.value < hi_gate) {
                ok = false;
            }
        }
        auto closest = [&](const std::vector<Named>& named) {
            const Named* best = &named.front();
            for (const auto& cand : named) {
                if (std::abs(cand.value - row.mc_mean) < std::abs(best->value - row.mc_mean)) {
                    best = &cand;
                }
            }
            return best->label;
        };
        row.closest_lower = closest(lowers);
        row.closest_upper = closest(uppers);
    }
    row.ordering_ok = ok;
    return ok;
}

CompareOutcome compare_table(const ExperimentConfig& config) {
    const bool with_mc = config.n_paths > 0;
    validate_config(config, with_mc, true);
    CompareOutcome outcome;

    for (double hv : config.hurst_list) {
        const HurstParameter h(hv);
        ComparisonRow row;
        row.h = hv;
        if (with_mc) {
            const sim::CholeskyFactor factor = make_factor(config, h);
            sim::SeedManifest seed;
            seed.master_seed = config.master_seed;
            const sim::McEstimate est =
                sim::monte_carlo_max_loss(factor, config.n_paths, seed, config.n_workers);
            const double scale = std::pow(config.horizon, hv);
            row.has_mc = true;
            row.mc_mean = est.mean / scale;
            row.mc_se = est.std_error / scale;
        }
        const bounds::BoundReport report = bounds::full_report(h, 1.0);
        for (const auto& entry : report.entries) {
            if (entry.target != bounds::BoundTarget::expected_max_loss) {
                continue;
            }
            if (entry.label == "baseline") {
                (entry.kind == bounds::BoundKind::lower ? row.baseline_lower
                                                        : row.baseline_upper) = entry.value;
            } else if (entry.label == "comparison") {
                (entry.kind == bounds::BoundKind::lower ? row.comparison_lower
                                                        : row.comparison_upper) = entry.value;
            }
        }
        for (std::size_t n : config.vitale_n_list) {
            const vitale::VitaleBounds vb = vitale::lower_bounds(n, h);
            row.idd.emplace_back(n, vb.independent.bound);
            row.pddd.emplace_back(n, vb.comonotone.bound);
        }
        if (!evaluate_row_ordering(row)) {
            outcome.ordering_violation = true;
        }
        outcome.rows.push_back(std::move(row));
    }

    outcome.table.manifest = manifest_lines(config, "compare");
    outcome.table.header = {"h"};
    if (with_mc) {
        outcome.table.header.push_back("mc_mean");
        outcome.table.header.push_back("mc_se");
    }
    outcome.table.header.insert(outcome.table.header.end(),
                                {"baseline_lower", "comparison_lower", "comparison_upper",
                                 "baseline_upper"});
    for (std::size_t n : config.vitale_n_list) {
        outcome.table.header.push_back("idd_n" + std::to_string(n));
    }
    for (std::size_t n : config.vitale_n_list) {
        outcome.table.header.push_back("pddd_n" + std::to_string(n));
    }
    if (with_mc) {
        outcome.table.header.push_back("closest_lower");
        outcome.table.header.push_back("closest_upper");
    }
    outcome.table.header.push_back("ordering_ok");

    for (const auto& row : outcome.rows) {
        std::vector<Cell> cells{Cell::number(row.h)};
        if (with_mc) {
            cells.push_back(Cell::number(row.mc_mean));
            cells.push_back(Cell::number(row.mc_se));
        }
        cells.push_back(Cell::number(row.baseline_lower));
        cells.push_back(Cell::number(row.comparison_lower));
        cells.push_back(Cell::number(row.comparison_upper));
        cells.push_back(Cell::number(row.baseline_upper));
        for (const auto& [n, b] : row.idd) {
            cells.push_back(Cell::number(b));
        }
        for (const auto& [n, b] : row.pddd) {
            cells.push_back(Cell::number(b));
        }
        if (with_mc) {
            cells.push_back(Cell::label(row.closest_lower));
            cells.push_back(Cell::label(row.closest_upper));
        }
        cells.push_back(Cell::label(row.ordering_ok ? "yes" : "no"));
        outcome.table.rows.push_back(std::move(cells));
    }
    return outcome;
}

} // namespace fbmdd::report
