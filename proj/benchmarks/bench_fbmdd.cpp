#include <benchmark/benchmark.h>

#include <vector>

#include "fbmdd/core.hpp"
#include "fbmdd/path_stats.hpp"
#include "fbmdd/rng.hpp"
#include "fbmdd/simulation.hpp"
#include "fbmdd/vitale.hpp"

using fbmdd::HurstParameter;
using fbmdd::TimeGrid;
namespace sim = fbmdd::sim;

static void BM_cholesky_factorize(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const auto cov = sim::build_covariance_matrix(TimeGrid(1.0, n), HurstParameter(0.7));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sim::cholesky_factorize(cov));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_cholesky_factorize)->RangeMultiplier(2)->Range(128, 2048)->Complexity();

static void BM_sample_path(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const auto factor =
        sim::cholesky_factorize(sim::build_covariance_matrix(TimeGrid(1.0, n), HurstParameter(0.7)));
    std::uint64_t stream = 0;
    for (auto _ : state) {
        sim::SeedManifest seed;
        seed.master_seed = 42;
        seed.stream_id = stream++;
        benchmark::DoNotOptimize(sim::sample_path(factor, seed));
    }
}
BENCHMARK(BM_sample_path)->RangeMultiplier(2)->Range(256, 2048);

static void BM_maximum_loss(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<double> path(n, 0.0);
    fbmdd::rng::GaussianStream stream(7, 0);
    for (std::size_t k = 1; k < n; ++k) {
        path[k] = path[k - 1] + stream.next();
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(fbmdd::stats::maximum_loss(path));
    }
}
BENCHMARK(BM_maximum_loss)->Arg(2048)->Arg(65536);

static void BM_gaussian_stream(benchmark::State& state) {
    std::vector<double> buf(4096);
    std::uint64_t stream_id = 0;
    for (auto _ : state) {
        fbmdd::rng::GaussianStream stream(42, stream_id++);
        stream.fill(buf);
        benchmark::DoNotOptimize(buf.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(buf.size()));
}
BENCHMARK(BM_gaussian_stream);

static void BM_build_increment_family(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fbmdd::vitale::build_increment_family(n, HurstParameter(0.7)));
    }
}
BENCHMARK(BM_build_increment_family)->Arg(10)->Arg(30)->Arg(50);

static void BM_maximize_comonotone(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const auto family = fbmdd::vitale::build_increment_family(n, HurstParameter(0.7));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fbmdd::vitale::maximize_comonotone(family));
    }
}
BENCHMARK(BM_maximize_comonotone)->Arg(10)->Arg(30);

static void BM_maximize_independent(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const auto family = fbmdd::vitale::build_increment_family(n, HurstParameter(0.7));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fbmdd::vitale::maximize_independent(family));
    }
}
BENCHMARK(BM_maximize_independent)->Arg(10)->Arg(30);

BENCHMARK_MAIN();
