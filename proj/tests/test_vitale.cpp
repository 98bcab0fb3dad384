#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fbmdd/bounds.hpp"
#include "fbmdd/simulation.hpp"
#include "fbmdd/vitale.hpp"

using fbmdd::HurstParameter;
using fbmdd::TimeGrid;
namespace vitale = fbmdd::vitale;

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
const double kInvSqrtPi = 1.0 / std::sqrt(std::numbers::pi);

} // namespace

TEST_CASE("increment family shape and the degenerate member") {
    const auto fam = vitale::build_increment_family(1, HurstParameter(0.7));
    REQUIRE(fam.size() == 2);
    CHECK(fam.members[0] == std::pair<std::size_t, std::size_t>{0, 0});
    CHECK(fam.members[1] == std::pair<std::size_t, std::size_t>{1, 1});
    CHECK(fam.variance[0] == 0.0);
    CHECK(fam.variance[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fam.dist_sq_at(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fam.dist_sq_at(0, 0) == 0.0);
    CHECK(fam.dist_sq_at(1, 1) == 0.0);

    for (std::size_t n : {2u, 5u, 9u}) {
        const auto f = vitale::build_increment_family(n, HurstParameter(0.6));
        CHECK(f.size() == n * (n + 1) / 2 + 1);
        for (std::size_t p = 1; p < f.size(); ++p) {
            CHECK(f.dist_sq_at(0, p) == doctest::Approx(f.variance[p]).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(vitale::build_increment_family(0, HurstParameter(0.6)),
                    std::invalid_argument);
    CHECK_THROWS_AS(vitale::build_increment_family(201, HurstParameter(0.6)),
                    std::invalid_argument);
}

TEST_CASE("adjacent disjoint brownian increments are independent") {
    const auto fam = vitale::build_increment_family(2, HurstParameter(0.5));
    // Members: 0 -> zero, 1 -> (1,1) = B(d)-B(0), 2 -> (2,1) = B(2d)-B(d).
    CHECK(fam.dist_sq_at(1, 2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("family distances match the six-term expansion") {
    const HurstParameter h(0.7);
    const auto fam = vitale::build_increment_family(5, h);
    const double d = fam.grid.step();
    for (std::size_t p = 1; p < fam.size(); ++p) {
        for (std::size_t q = p + 1; q < fam.size(); ++q) {
            const auto [i, j] = fam.members[p];
            const auto [k, l] = fam.members[q];
            const double oracle = fbmdd::bounds::increment_distance_sq(
                static_cast<double>(i) * d, static_cast<double>(i - j) * d,
                static_cast<double>(k) * d, static_cast<double>(k - l) * d, h);
            CHECK(fam.dist_sq_at(p, q) == doctest::Approx(oracle).epsilon(1e-12));
        }
    }
}

TEST_CASE("comonotone expectation closed form") {
    CHECK(vitale::expected_max_comonotone(std::vector<double>{0.0, 0.8}) ==
          doctest::Approx(0.8 * kInvSqrt2Pi).epsilon(1e-14));
    CHECK(vitale::expected_max_comonotone(std::vector<double>{0.7, 0.7, 0.7}) ==
          doctest::Approx(0.0));
    CHECK(vitale::expected_max_comonotone(std::vector<double>{0.0, 3.0}) ==
          doctest::Approx(3.0 * kInvSqrt2Pi).epsilon(1e-14));
    CHECK(vitale::expected_max_comonotone(std::vector<double>{-1.0, 0.0, 2.0}) ==
          doctest::Approx(1.1968268412042980).epsilon(1e-14));
}

TEST_CASE("comonotone closed form agrees with quadrature and monte carlo") {
    std::mt19937 gen(31);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> a(1 + rep % 6, 0.0);
        for (double& c : a) {
            c = coeff(gen);
        }
        a[0] = 0.0;
        const double closed = vitale::expected_max_comonotone(a);
        const double quad = vitale::expected_max_comonotone_quadrature(a);
        CHECK(std::abs(closed - quad) < 1e-8);
    }

    // 10^7-draw Monte Carlo cross-check of the closed form.
    const std::vector<double> a{-1.0, 0.0, 2.0};
    std::mt19937_64 mc_gen(12345);
    std::normal_distribution<double> normal;
    const std::size_t n_draws = 10000000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n_draws; ++i) {
        const double z = normal(mc_gen);
        const double m = std::max({-1.0 * z, 0.0, 2.0 * z});
        sum += m;
        sum_sq += m * m;
    }
    const double mean = sum / static_cast<double>(n_draws);
    const double se = std::sqrt((sum_sq / static_cast<double>(n_draws) - mean * mean) /
                                static_cast<double>(n_draws));
    CHECK(std::abs(mean - vitale::expected_max_comonotone(a)) < 4.0 * se);
}

TEST_CASE("independent expectation closed forms") {
    CHECK(vitale::expected_max_independent(std::vector<double>{0.0, 0.6}) ==
          doctest::Approx(0.6 * kInvSqrt2Pi).epsilon(1e-7));
    CHECK(vitale::expected_max_independent(std::vector<double>{0.0}) == 0.0);
    CHECK(vitale::expected_max_independent(std::vector<double>{}) == 0.0);
    CHECK(std::abs(vitale::expected_max_independent(std::vector<double>{1.0, 1.0}) -
                   kInvSqrtPi) < 1e-7);
    CHECK_THROWS_AS(vitale::expected_max_independent(std::vector<double>{-0.1, 1.0}),
                    std::domain_error);
}

TEST_CASE("independent expectation is monotone in each coordinate") {
    std::mt19937 gen(404);
    std::uniform_real_distribution<double> sig(0.0, 2.0);
    std::uniform_int_distribution<std::size_t> pick(0, 4);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<double> sigma(5);
        for (double& s : sigma) {
            s = sig(gen);
        }
        const double base = vitale::expected_max_independent(sigma, 1e-9);
        auto bumped = sigma;
        bumped[pick(gen)] += 0.25;
        const double more = vitale::expected_max_independent(bumped, 1e-9);
        CHECK(more >= base - 1e-8);
    }
}

TEST_CASE("maximizers on the single-increment family") {
    const auto fam = vitale::build_increment_family(1, HurstParameter(0.9));
    const auto pddd = vitale::maximize_comonotone(fam);
    CHECK(pddd.bound == doctest::Approx(kInvSqrt2Pi).epsilon(1e-12));
    CHECK(pddd.family.coefficients[0] == 0.0);
    CHECK(vitale::comonotone_feasibility_residual(fam, pddd.family) <= 1e-10);

    const auto idd = vitale::maximize_independent(fam);
    CHECK(idd.bound == doctest::Approx(kInvSqrt2Pi).epsilon(1e-7));
    CHECK(idd.family.std_devs[0] == 0.0);
    CHECK(idd.family.std_devs[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(vitale::independent_feasibility_residual(fam, idd.family) <= 1e-10);
}

TEST_CASE("maximizers stay feasible and beat the trivial bound") {
    for (double hv : {0.5, 0.7, 0.9}) {
        for (std::size_t n : {3u, 8u}) {
            const auto fam = vitale::build_increment_family(n, HurstParameter(hv));
            const auto pddd = vitale::maximize_comonotone(fam);
            const auto idd = vitale::maximize_independent(fam);
            CHECK(vitale::comonotone_feasibility_residual(fam, pddd.family) <= 1e-10);
            CHECK(vitale::independent_feasibility_residual(fam, idd.family) <= 1e-10);
            // The pair (zero member, largest-variance member) is always
            // feasible, so the bound can never fall below it.
            double max_var = 0.0;
            for (double v : fam.variance) {
                max_var = std::max(max_var, v);
            }
            CHECK(pddd.bound >= std::sqrt(max_var) * kInvSqrt2Pi - 1e-12);
            CHECK(idd.bound > 0.0);
        }
    }
}

TEST_CASE("bounds scale linearly with the distance scale") {
    const auto fam = vitale::build_increment_family(4, HurstParameter(0.6));
    auto scaled = fam;
    for (double& d : scaled.dist_sq) {
        d *= 4.0;
    }
    for (double& v : scaled.variance) {
        v *= 4.0;
    }
    const auto base_p = vitale::maximize_comonotone(fam);
    const auto base_i = vitale::maximize_independent(fam);
    const auto scaled_p = vitale::maximize_comonotone(scaled);
    const auto scaled_i = vitale::maximize_independent(scaled);
    CHECK(scaled_p.bound == doctest::Approx(2.0 * base_p.bound).epsilon(1e-10));
    CHECK(scaled_i.bound == doctest::Approx(2.0 * base_i.bound).epsilon(1e-6));
}

TEST_CASE("lower bounds sit below the comparison upper bound and the monte carlo mean") {
    namespace sim = fbmdd::sim;
    const double upper = 2.0 * kInvSqrtPi;
    for (double hv : {0.5, 0.9}) {
        const HurstParameter h(hv);
        const auto vb = vitale::lower_bounds(5, h);
        CHECK(vb.independent.bound <= upper);
        CHECK(vb.comonotone.bound <= upper);

        sim::SeedManifest seed;
        seed.master_seed = 60601;
        const auto est = sim::monte_carlo_max_loss(h, TimeGrid(1.0, 512), 1500, seed, 0);
        CHECK(vb.independent.bound <= est.mean + 3.0 * est.std_error);
        CHECK(vb.comonotone.bound <= est.mean + 3.0 * est.std_error);
    }
    CHECK_THROWS_AS(vitale::lower_bounds(5, HurstParameter(0.4)), std::domain_error);
}
