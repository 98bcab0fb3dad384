#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fbmdd/bounds.hpp"
#include "fbmdd/core.hpp"
#include "fbmdd/path_stats.hpp"
#include "fbmdd/report.hpp"
#include "fbmdd/simulation.hpp"
#include "fbmdd/vitale.hpp"

namespace {

using fbmdd::HurstParameter;
using fbmdd::TimeGrid;
namespace report = fbmdd::report;

std::vector<double> parse_double_list(const std::string& csv, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            continue;
        }
        char* end = nullptr;
        const double x = std::strtod(item.c_str(), &end);
        if (end != item.c_str() + item.size()) {
            throw CLI::ValidationError(flag, "cannot parse '" + item + "' as a number");
        }
        out.push_back(x);
    }
    if (out.empty()) {
        throw CLI::ValidationError(flag, "list must not be empty");
    }
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& csv, const std::string& flag) {
    std::vector<std::size_t> out;
    for (double x : parse_double_list(csv, flag)) {
        if (x < 0 || x != std::floor(x)) {
            throw CLI::ValidationError(flag, "expected nonnegative integers");
        }
        out.push_back(static_cast<std::size_t>(x));
    }
    return out;
}

unsigned workers_from_env() {
    const char* env = std::getenv("FBM_THREADS");
    if (env == nullptr || *env == '\0') {
        return 0;
    }
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0') {
        throw std::invalid_argument("FBM_THREADS must be an unsigned integer");
    }
    return static_cast<unsigned>(v);
}

struct RawOptions {
    std::string hurst = "0.5,0.6,0.7,0.8,0.9";
    std::size_t steps = 2048;
    std::size_t paths = 5000;
    std::string vitale_n = "5,10,20,30,40,50";
    std::uint64_t seed = 42;
    std::string format = "csv";
    std::string out;
    std::string factor_cache;
    std::string config_file;
};

void add_common_options(CLI::App* cmd, RawOptions& raw, bool with_paths) {
    cmd->add_option("--hurst", raw.hurst, "Comma-separated Hurst parameters in (0,1)")
        ->capture_default_str();
    cmd->add_option("--steps", raw.steps, "Time steps per path")->capture_default_str();
    if (with_paths) {
        cmd->add_option("--paths", raw.paths, "Monte Carlo paths per Hurst value")
            ->capture_default_str();
    }
    cmd->add_option("--vitale-n", raw.vitale_n, "Comma-separated family sizes (each <= 200)")
        ->capture_default_str();
    cmd->add_option("--seed", raw.seed, "Master seed")->capture_default_str();
    cmd->add_option("--format", raw.format, "Output format: csv or md")
        ->check(CLI::IsMember({"csv", "md"}))
        ->capture_default_str();
    cmd->add_option("--out", raw.out, "Output file path (omit to skip the file)");
    cmd->add_option("--factor-cache", raw.factor_cache,
                    "Binary Cholesky factor cache file (single --hurst value only)");
    cmd->add_option("--config", raw.config_file,
                    "Plain key=value config file; command-line flags override it");
}

// Fill raw options from a key=value file wherever the matching flag was
// not given on the command line.
void apply_config_file(const CLI::App* cmd, RawOptions& raw) {
    if (raw.config_file.empty()) {
        return;
    }
    std::ifstream in(raw.config_file);
    if (!in) {
        throw std::invalid_argument("config error: cannot open config file " + raw.config_file);
    }
    const auto given = [cmd](const char* flag) { return cmd->count(flag) > 0; };
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config error: expected key=value on line " +
                                        std::to_string(line_no) + " of " + raw.config_file);
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        auto parse_unsigned = [&](const char* what) {
            char* end = nullptr;
            const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
            if (end != value.c_str() + value.size() || value.empty()) {
                throw std::invalid_argument(std::string("config error: bad value for ") + what);
            }
            return v;
        };
        if (key == "hurst") {
            if (!given("--hurst")) raw.hurst = value;
        } else if (key == "steps") {
            if (!given("--steps")) raw.steps = static_cast<std::size_t>(parse_unsigned("steps"));
        } else if (key == "paths") {
            if (!given("--paths")) raw.paths = static_cast<std::size_t>(parse_unsigned("paths"));
        } else if (key == "vitale-n" || key == "vitale_n") {
            if (!given("--vitale-n")) raw.vitale_n = value;
        } else if (key == "seed") {
            if (!given("--seed")) raw.seed = parse_unsigned("seed");
        } else if (key == "format") {
            if (!given("--format")) raw.format = value;
        } else if (key == "out") {
            if (!given("--out")) raw.out = value;
        } else if (key == "factor-cache" || key == "factor_cache") {
            if (!given("--factor-cache")) raw.factor_cache = value;
        } else {
            throw std::invalid_argument("config error: unknown key '" + key + "' in " +
                                        raw.config_file);
        }
    }
    if (raw.format != "csv" && raw.format != "md") {
        throw std::invalid_argument("config error: format must be csv or md");
    }
}

report::ExperimentConfig to_config(const CLI::App* cmd, RawOptions& raw) {
    apply_config_file(cmd, raw);
    report::ExperimentConfig config;
    config.hurst_list = parse_double_list(raw.hurst, "--hurst");
    config.n_steps = raw.steps;
    config.n_paths = raw.paths;
    config.vitale_n_list = parse_size_list(raw.vitale_n, "--vitale-n");
    config.master_seed = raw.seed;
    config.format = raw.format == "md" ? report::OutputFormat::markdown
                                       : report::OutputFormat::csv;
    config.output_path = raw.out;
    config.factor_cache = raw.factor_cache;
    config.n_workers = workers_from_env();
    return config;
}

void emit(const report::Table& table, const report::ExperimentConfig& config) {
    std::cout << report::render_pretty(table);
    if (!config.output_path.empty()) {
        report::save_table(table, config.output_path, config.format);
        std::cerr << "wrote " << config.output_path << '\n';
    }
}

int run_simulate(const report::ExperimentConfig& config) {
    const report::SimulateOutcome outcome = report::simulate_table(config);
    emit(outcome.table, config);
    for (std::size_t i = 0; i < outcome.row_seconds.size(); ++i) {
        std::cerr << "h=" << report::format_pretty(config.hurst_list[i])
                  << " elapsed_s=" << report::format_pretty(outcome.row_seconds[i]) << '\n';
    }
    return 0;
}

int run_bounds(const report::ExperimentConfig& config) {
    emit(report::bounds_table(config), config);
    return 0;
}

int run_vitale(const report::ExperimentConfig& config) {
    emit(report::vitale_table(config), config);
    return 0;
}

int run_compare(const report::ExperimentConfig& config) {
    const report::CompareOutcome outcome = report::compare_table(config);
    emit(outcome.table, config);
    if (outcome.ordering_violation) {
        std::cerr << "ordering violation: at least one bound is inconsistent with the "
                     "Monte Carlo estimate or with another bound (see ordering_ok column)\n";
        return 2;
    }
    return 0;
}

int run_selftest() {
    namespace sim = fbmdd::sim;
    namespace stats = fbmdd::stats;
    namespace vitale = fbmdd::vitale;
    namespace bounds = fbmdd::bounds;

    int failures = 0;
    auto check = [&failures](const std::string& name, bool ok) {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << '\n';
        if (!ok) {
            ++failures;
        }
    };

    const HurstParameter h07(0.7);
    const HurstParameter h05(0.5);
    check("covariance symmetry",
          fbmdd::covariance(0.3, 0.8, h07) == fbmdd::covariance(0.8, 0.3, h07));
    check("brownian covariance is min(s,t)",
          std::abs(fbmdd::covariance(0.25, 0.9, h05) - 0.25) < 1e-14);

    {
        std::mt19937 gen(99);
        std::normal_distribution<double> dist;
        bool ok = true;
        for (int rep = 0; rep < 25 && ok; ++rep) {
            std::vector<double> path(40, 0.0);
            for (std::size_t k = 1; k < path.size(); ++k) {
                path[k] = path[k - 1] + dist(gen);
            }
            double brute = 0.0;
            for (std::size_t u = 0; u < path.size(); ++u) {
                for (std::size_t v = u; v < path.size(); ++v) {
                    brute = std::max(brute, path[u] - path[v]);
                }
            }
            ok = stats::maximum_loss(path) == brute;
        }
        check("drawdown equals pairwise brute force", ok);
    }

    {
        const TimeGrid grid(1.0, 64);
        const auto cov = sim::build_covariance_matrix(grid, h07);
        const auto factor = sim::cholesky_factorize(cov);
        double err = 0.0;
        double ref = 0.0;
        for (std::size_t i = 0; i < 64; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double rebuilt = 0.0;
                for (std::size_t k = 0; k <= j; ++k) {
                    rebuilt += factor.at(i, k) * factor.at(j, k);
                }
                err += (rebuilt - cov.at(i, j)) * (rebuilt - cov.at(i, j));
                ref += cov.at(i, j) * cov.at(i, j);
            }
        }
        check("cholesky residual below 1e-10", std::sqrt(err / ref) < 1e-10);
    }

    {
        const std::vector<double> a{-1.0, 0.0, 2.0};
        const double closed = vitale::expected_max_comonotone(a);
        const double quad = vitale::expected_max_comonotone_quadrature(a);
        check("comonotone closed form matches quadrature", std::abs(closed - quad) < 1e-8);
        const std::vector<double> sigma{1.0, 1.0};
        const double emax = vitale::expected_max_independent(sigma);
        check("independent pair expectation is 1/sqrt(pi)",
              std::abs(emax - 1.0 / std::sqrt(std::numbers::pi)) < 1e-7);
    }

    {
        const auto [lo, hi] = bounds::comparison_bounds(h07, 1.0);
        check("comparison bounds equal 1/sqrt(pi), 2/sqrt(pi)",
              std::abs(lo - 1.0 / std::sqrt(std::numbers::pi)) < 1e-15 &&
              std::abs(hi - 2.0 / std::sqrt(std::numbers::pi)) < 1e-15);
    }

    {
        const TimeGrid grid(1.0, 32);
        const auto factor = sim::cholesky_factorize(sim::build_covariance_matrix(grid, h07));
        sim::SeedManifest seed;
        seed.master_seed = 7;
        const auto a = sim::monte_carlo_max_loss(factor, 200, seed, 1);
        const auto b = sim::monte_carlo_max_loss(factor, 200, seed, 4);
        check("estimates identical across worker counts",
              a.mean == b.mean && a.std_error == b.std_error);
    }

    std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Expected maximum drawdown of fractional Brownian motion: exact Cholesky "
                 "simulation, closed-form bounds, and Gaussian-comparison lower bounds"};
    app.require_subcommand(1);

    RawOptions raw_simulate;
    RawOptions raw_bounds;
    RawOptions raw_vitale;
    RawOptions raw_compare;

    auto* cmd_simulate = app.add_subcommand(
        "simulate", "Monte Carlo estimate of the unit-horizon expected maximum loss per H");
    add_common_options(cmd_simulate, raw_simulate, true);
    auto* cmd_bounds =
        app.add_subcommand("bounds", "Closed-form bound table at the unit horizon");
    add_common_options(cmd_bounds, raw_bounds, false);
    auto* cmd_vitale = app.add_subcommand(
        "vitale", "Numerical comparison lower bounds (idd/pddd) per H and family size");
    add_common_options(cmd_vitale, raw_vitale, false);
    auto* cmd_compare = app.add_subcommand(
        "compare", "Combined report: simulation, closed-form and numerical bounds");
    add_common_options(cmd_compare, raw_compare, true);
    auto* cmd_selftest = app.add_subcommand("selftest", "Fast internal consistency checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e); // --help and friends
        }
        app.exit(e);
        return 1;
    }

    try {
        if (cmd_selftest->parsed()) {
            return run_selftest();
        }
        if (cmd_simulate->parsed()) {
            return run_simulate(to_config(cmd_simulate, raw_simulate));
        }
        if (cmd_bounds->parsed()) {
            report::ExperimentConfig config = to_config(cmd_bounds, raw_bounds);
            config.n_paths = 0;
            return run_bounds(config);
        }
        if (cmd_vitale->parsed()) {
            report::ExperimentConfig config = to_config(cmd_vitale, raw_vitale);
            config.n_paths = 0;
            return run_vitale(config);
        }
        if (cmd_compare->parsed()) {
            return run_compare(to_config(cmd_compare, raw_compare));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
