#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "fbmdd/core.hpp"
#include "fbmdd/path_stats.hpp"
#include "fbmdd/simulation.hpp"
#include "test_util.hpp"

using fbmdd::HurstParameter;
using fbmdd::PackedLowerTriangular;
using fbmdd::TimeGrid;
namespace sim = fbmdd::sim;

namespace {

double residual_fro(const sim::CholeskyFactor& factor, const sim::CovarianceMatrix& cov) {
    const std::size_t n = cov.dim();
    double err = 0.0;
    double ref = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double rebuilt = 0.0;
            for (std::size_t k = 0; k <= j; ++k) {
                rebuilt += factor.at(i, k) * factor.at(j, k);
            }
            const double d = rebuilt - cov.at(i, j);
            err += (i == j ? 1.0 : 2.0) * d * d;
            ref += (i == j ? 1.0 : 2.0) * cov.at(i, j) * cov.at(i, j);
        }
    }
    return std::sqrt(err / ref);
}

} // namespace

TEST_CASE("covariance matrix entries") {
    const auto brownian =
        sim::build_covariance_matrix(TimeGrid(1.0, 2), HurstParameter(0.5));
    CHECK(brownian.at(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(brownian.at(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(brownian.at(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(brownian.at(1, 1) == doctest::Approx(1.0).epsilon(1e-14));

    const auto single = sim::build_covariance_matrix(TimeGrid(1.0, 1), HurstParameter(0.7));
    CHECK(single.at(0, 0) == doctest::Approx(1.0).epsilon(1e-14));

    const auto three = sim::build_covariance_matrix(TimeGrid(1.0, 3), HurstParameter(0.8));
    const double expected =
        0.5 * (1.0 + std::pow(1.0 / 3.0, 1.6) - std::pow(2.0 / 3.0, 1.6));
    CHECK(three.at(0, 2) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(three.at(2, 2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("cholesky of hand-checked matrices") {
    PackedLowerTriangular ident(3);
    for (std::size_t i = 0; i < 3; ++i) {
        ident.at(i, i) = 1.0;
    }
    const sim::CovarianceMatrix eye(TimeGrid(1.0, 3), HurstParameter(0.5), ident);
    const auto factor_eye = sim::cholesky_factorize(eye);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            CHECK(factor_eye.at(i, j) == (i == j ? 1.0 : 0.0));
        }
    }

    PackedLowerTriangular two(2);
    two.at(0, 0) = 0.5;
    two.at(1, 0) = 0.5;
    two.at(1, 1) = 1.0;
    const sim::CovarianceMatrix cov2(TimeGrid(1.0, 2), HurstParameter(0.5), two);
    const auto factor2 = sim::cholesky_factorize(cov2);
    const double r = std::sqrt(0.5);
    CHECK(factor2.at(0, 0) == doctest::Approx(r).epsilon(1e-15));
    CHECK(factor2.at(1, 0) == doctest::Approx(r).epsilon(1e-15));
    CHECK(factor2.at(1, 1) == doctest::Approx(r).epsilon(1e-15));
}

TEST_CASE("cholesky residual stays tiny on fbm covariances") {
    const auto cov = sim::build_covariance_matrix(TimeGrid(1.0, 256), HurstParameter(0.9));
    const auto factor = sim::cholesky_factorize(cov);
    CHECK(residual_fro(factor, cov) < 1e-10);
    for (std::size_t j = 0; j < factor.dim(); ++j) {
        CHECK(factor.at(j, j) > 0.0);
    }
}

TEST_CASE("blocked path used for large matrices matches the covariance") {
    // n = 1100 crosses the blocking threshold.
    const auto cov = sim::build_covariance_matrix(TimeGrid(1.0, 1100), HurstParameter(0.7));
    const auto factor = sim::cholesky_factorize(cov);
    CHECK(residual_fro(factor, cov) < 1e-10);
}

TEST_CASE("non positive definite input names the failing pivot") {
    PackedLowerTriangular bad(2);
    bad.at(0, 0) = 1.0;
    bad.at(1, 0) = 2.0; // correlation 2 is impossible
    bad.at(1, 1) = 1.0;
    const sim::CovarianceMatrix cov(TimeGrid(1.0, 2), HurstParameter(0.5), bad);
    try {
        sim::cholesky_factorize(cov);
        FAIL("expected NotPositiveDefiniteError");
    } catch (const sim::NotPositiveDefiniteError& e) {
        CHECK(e.pivot_index() == 1);
        CHECK(std::string(e.what()).find("pivot 1") != std::string::npos);
    }
}

TEST_CASE("sampling with injected normals") {
    const auto factor = sim::cholesky_factorize(
        sim::build_covariance_matrix(TimeGrid(1.0, 8), HurstParameter(0.7)));
    const std::vector<double> zeros(8, 0.0);
    const auto zero_path = sim::sample_path_with_normals(factor, zeros);
    for (double v : zero_path.values()) {
        CHECK(v == 0.0);
    }

    const auto single = sim::cholesky_factorize(
        sim::build_covariance_matrix(TimeGrid(1.0, 1), HurstParameter(0.62)));
    const auto path = sim::sample_path_with_normals(single, std::vector<double>{1.7});
    CHECK(path.values()[0] == 0.0);
    CHECK(path.values()[1] == doctest::Approx(1.7).epsilon(1e-14));

    CHECK_THROWS_AS(sim::sample_path_with_normals(single, zeros), std::invalid_argument);
}

TEST_CASE("sample covariance matches the exact covariance at n=16") {
    const std::size_t n = 16;
    const std::size_t n_paths = 50000;
    const auto cov = sim::build_covariance_matrix(TimeGrid(1.0, n), HurstParameter(0.7));
    const auto factor = sim::cholesky_factorize(cov);
    sim::SeedManifest seed;
    seed.master_seed = 31415;
    std::vector<double> acc(n * n, 0.0);
    for (std::size_t p = 0; p < n_paths; ++p) {
        sim::SeedManifest path_seed = seed;
        path_seed.stream_id = p;
        const auto path = sim::sample_path(factor, path_seed);
        const auto& v = path.values();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                acc[i * n + j] += v[i + 1] * v[j + 1];
            }
        }
    }
    std::size_t outside = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double emp = acc[i * n + j] / static_cast<double>(n_paths);
            const double exact = cov.at(i, j);
            // Delta-method standard error for a Gaussian product moment.
            const double se = std::sqrt(
                (cov.at(i, i) * cov.at(j, j) + exact * exact) / static_cast<double>(n_paths));
            if (std::abs(emp - exact) > 3.0 * se) {
                ++outside;
            }
        }
    }
    CHECK(outside == 0);
    // Marginal variance of the endpoint in particular.
    const double var_end = acc[(n - 1) * n + (n - 1)] / static_cast<double>(n_paths);
    CHECK(std::abs(var_end - 1.0) < 3.0 * std::sqrt(2.0 / static_cast<double>(n_paths)));
}

TEST_CASE("monte carlo is reproducible and worker-count independent") {
    const auto factor = sim::cholesky_factorize(
        sim::build_covariance_matrix(TimeGrid(1.0, 64), HurstParameter(0.8)));
    sim::SeedManifest seed;
    seed.master_seed = 777;
    const auto a = sim::monte_carlo_max_loss(factor, 400, seed, 1);
    const auto b = sim::monte_carlo_max_loss(factor, 400, seed, 1);
    const auto c = sim::monte_carlo_max_loss(factor, 400, seed, 8);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(a.mean == c.mean);
    CHECK(a.std_error == c.std_error);
    CHECK(a.n_paths == 400);
    CHECK(a.seed == seed);
}

TEST_CASE("monte carlo with injected zero normals is degenerate") {
    const auto factor = sim::cholesky_factorize(
        sim::build_covariance_matrix(TimeGrid(1.0, 4), HurstParameter(0.6)));
    // Paths built from zero normals have zero drawdown; the estimator on
    // a constant sample must report mean 0 with zero standard error.
    const std::vector<double> zeros(4, 0.0);
    std::vector<double> losses;
    for (int p = 0; p < 2; ++p) {
        losses.push_back(fbmdd::stats::maximum_loss(sim::sample_path_with_normals(factor, zeros)));
    }
    CHECK(losses[0] == 0.0);
    CHECK(losses[1] == 0.0);
    CHECK_THROWS_AS(sim::monte_carlo_max_loss(factor, 1, sim::SeedManifest{}),
                    std::invalid_argument);
}

TEST_CASE("one factorization per monte carlo run") {
    const TimeGrid grid(1.0, 32);
    const HurstParameter h(0.7);
    const auto before = sim::factorization_count();
    sim::SeedManifest seed;
    seed.master_seed = 5;
    (void)sim::monte_carlo_max_loss(h, grid, 250, seed, 2);
    CHECK(sim::factorization_count() - before == 1);
}

TEST_CASE("self similarity: rescaled drawdowns match the unit horizon in law") {
    const std::size_t n = 256;
    const std::size_t n_paths = 5000;
    const double t = 4.0;
    const HurstParameter h(0.7);
    const auto unit = sim::cholesky_factorize(sim::build_covariance_matrix(TimeGrid(1.0, n), h));
    const auto wide = sim::cholesky_factorize(sim::build_covariance_matrix(TimeGrid(t, n), h));
    sim::SeedManifest seed_a;
    seed_a.master_seed = 1001;
    sim::SeedManifest seed_b;
    seed_b.master_seed = 2002;
    const auto unit_samples = sim::max_loss_samples(unit, n_paths, seed_a, 0);
    auto wide_samples = sim::max_loss_samples(wide, n_paths, seed_b, 0);
    const double scale = std::pow(t, h.value());
    for (double& x : wide_samples) {
        x /= scale;
    }
    const double d = fbmdd::testutil::two_sample_ks(unit_samples, wide_samples);
    CHECK(d < fbmdd::testutil::ks_critical(0.01, n_paths, n_paths));
}

TEST_CASE("factor cache round trips bit for bit") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "fbmdd_factor_cache_test";
    fs::create_directories(dir);
    const fs::path file = dir / "factor.bin";

    const auto factor = sim::cholesky_factorize(
        sim::build_covariance_matrix(TimeGrid(1.0, 24), HurstParameter(0.65)));
    sim::save_factor(file, factor);
    const auto loaded = sim::load_factor(file);
    CHECK(loaded.dim() == factor.dim());
    CHECK(loaded.hurst().value() == factor.hurst().value());
    CHECK(loaded.lower() == factor.lower());

    // Corrupt the magic and expect a clean failure.
    {
        std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(0);
        f.write("XXXXXXXX", 8);
    }
    CHECK_THROWS_AS(sim::load_factor(file), std::runtime_error);

    // Truncated payload.
    sim::save_factor(file, factor);
    fs::resize_file(file, 40);
    CHECK_THROWS_AS(sim::load_factor(file), std::runtime_error);

    fs::remove_all(dir);
}
