#include "fbmdd/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <thread>

#include "fbmdd/path_stats.hpp"
#include "fbmdd/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "factor cache assumes a little-endian host");

namespace fbmdd::sim {

namespace {

std::atomic<std::uint64_t> g_factorizations{0};

constexpr std::size_t kBlockThreshold = 1024;
constexpr std::size_t kBlockSize = 128;

// Factor the columns [j0, j0+jb) in place, applying their updates only
// to columns left of `limit`.
void factor_panel(PackedLowerTriangular& a, std::size_t j0, std::size_t jb, std::size_t limit) {
    const std::size_t n = a.dim();
    for (std::size_t j = j0; j < j0 + jb; ++j) {
        double* cj = a.col(j);
        const double pivot = cj[0];
        if (!(pivot > 0.0) || !std::isfinite(pivot)) {
            throw NotPositiveDefiniteError(j, pivot);
        }
        const double d = std::sqrt(pivot);
        cj[0] = d;
        const double inv = 1.0 / d;
        for (std::size_t r = 1; r < n - j; ++r) {
            cj[r] *= inv;
        }
        for (std::size_t k = j + 1; k < limit; ++k) {
            const double lkj = cj[k - j];
            const double* src = cj + (k - j);
            double* ck = a.col(k);
            const std::size_t len = n - k;
            for (std::size_t r = 0; r < len; ++r) {
                ck[r] -= lkj * src[r];
            }
        }
    }
}

// Rank-jb update of the trailing columns [j0+jb, n) from the panel
// [j0, j0+jb). Each trailing column stays hot across the jb axpys.
void trailing_update(PackedLowerTriangular& a, std::size_t j0, std::size_t jb) {
    const std::size_t n = a.dim();
    for (std::size_t k = j0 + jb; k < n; ++k) {
        double* ck = a.col(k);
        const std::size_t len = n - k;
        for (std::size_t c = j0; c < j0 + jb; ++c) {
            const double* cc = a.col(c);
            const double lkc = cc[k - c];
            const double* src = cc + (k - c);
            for (std::size_t r = 0; r < len; ++r) {
                ck[r] -= lkc * src[r];
            }
        }
    }
}

void factor_in_place(PackedLowerTriangular& a, std::size_t block) {
    const std::size_t n = a.dim();
    if (block == 0 || n <= block) {
        factor_panel(a, 0, n, n);
        return;
    }
    for (std::size_t j0 = 0; j0 < n; j0 += block) {
        const std::size_t jb = std::min(block, n - j0);
        factor_panel(a, j0, jb, j0 + jb);
        trailing_update(a, j0, jb);
    }
}

unsigned resolve_workers(unsigned requested, std::size_t n_jobs) {
    unsigned w = requested;
    if (w == 0) {
        w = std::thread::hardware_concurrency();
        if (w == 0) {
            w = 1;
        }
    }
    return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(n_jobs, 1)));
}

// y += L z for the packed lower factor, streaming one column per z entry.
void apply_factor(const PackedLowerTriangular& l, std::span<const double> z,
                  std::span<double> y) {
    const std::size_t n = l.dim();
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double zj = z[j];
        const double* cj = l.col(j);
        const std::size_t len = n - j;
        for (std::size_t r = 0; r < len; ++r) {
            y[j + r] += cj[r] * zj;
        }
    }
}

} // namespace

NotPositiveDefiniteError::NotPositiveDefiniteError(std::size_t pivot_index, double pivot_value)
    : std::runtime_error("matrix not positive definite: pivot " + std::to_string(pivot_index) +
                         " = " + std::to_string(pivot_value)),
      pivot_index_(pivot_index) {}

CovarianceMatrix build_covariance_matrix(const TimeGrid& grid, const HurstParameter& h) {
    const std::size_t n = grid.n_steps();
    PackedLowerTriangular entries(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double tj = grid.time(j + 1);
        double* cj = entries.col(j);
        for (std::size_t i = j; i < n; ++i) {
            cj[i - j] = covariance(tj, grid.time(i + 1), h);
        }
    }
    return CovarianceMatrix(grid, h, std::move(entries));
}

CholeskyFactor cholesky_factorize(const CovarianceMatrix& cov) {
    PackedLowerTriangular a = cov.lower();
    const std::size_t block = cov.dim() >= kBlockThreshold ? kBlockSize : 0;
    factor_in_place(a, block);
    g_factorizations.fetch_add(1, std::memory_order_relaxed);
    return CholeskyFactor(cov.grid(), cov.hurst(), std::move(a));
}

FbmPath sample_path(const CholeskyFactor& factor, const SeedManifest& seed) {
    const std::size_t n = factor.dim();
    std::vector<double> z(n);
    rng::GaussianStream stream(seed.master_seed, seed.stream_id);
    stream.fill(z);
    return sample_path_with_normals(factor, z);
}

FbmPath sample_path_with_normals(const CholeskyFactor& factor, std::span<const double> z) {
    const std::size_t n = factor.dim();
    if (z.size() != n) {
        throw std::invalid_argument("sample_path_with_normals: expected " + std::to_string(n) +
                                    " normals, got " + std::to_string(z.size()));
    }
    std::vector<double> values(n + 1, 0.0);
    apply_factor(factor.lower(), z, std::span<double>(values).subspan(1));
    return FbmPath(factor.grid(), std::move(values));
}

std::vector<double> max_loss_samples(const CholeskyFactor& factor, std::size_t n_paths,
                                     const SeedManifest& seed, unsigned n_workers) {
    const std::size_t n = factor.dim();
    std::vector<double> losses(n_paths);
    const unsigned workers = resolve_workers(n_workers, n_paths);

    auto run_range = [&](std::size_t begin, std::size_t end) {
        std::vector<double> z(n);
        std::vector<double> values(n + 1, 0.0);
        for (std::size_t p = begin; p < end; ++p) {
            rng::GaussianStream stream(seed.master_seed, p);
            stream.fill(z);
            apply_factor(factor.lower(), z, std::span<double>(values).subspan(1));
            values[0] = 0.0;
            losses[p] = stats::maximum_loss(values);
        }
    };

    if (workers <= 1) {
        run_range(0, n_paths);
        return losses;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n_paths + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = std::min<std::size_t>(w * chunk, n_paths);
        const std::size_t end = std::min<std::size_t>(begin + chunk, n_paths);
        if (begin < end) {
            pool.emplace_back(run_range, begin, end);
        }
    }
    for (auto& t : pool) {
        t.join();
    }
    return losses;
}

McEstimate monte_carlo_max_loss(const CholeskyFactor& factor, std::size_t n_paths,
                                const SeedManifest& seed, unsigned n_workers) {
    if (n_paths < 2) {
        throw std::invalid_argument("monte_carlo_max_loss: n_paths must be >= 2");
    }
    const std::vector<double> losses = max_loss_samples(factor, n_paths, seed, n_workers);
    // Serial reduction in path order keeps the result independent of the
    // worker count.
    double sum = 0.0;
    for (double x : losses) {
        sum += x;
    }
    const double mean = sum / static_cast<double>(n_paths);
    double ss = 0.0;
    for (double x : losses) {
        const double d = x - mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(n_paths - 1);
    McEstimate est;
    est.mean = mean;
    est.std_error = std::sqrt(var / static_cast<double>(n_paths));
    est.n_paths = n_paths;
    est.seed = seed;
    return est;
}

McEstimate monte_carlo_max_loss(const HurstParameter& h, const TimeGrid& grid,
                                std::size_t n_paths, const SeedManifest& seed,
                                unsigned n_workers) {
    const CholeskyFactor factor = cholesky_factorize(build_covariance_matrix(grid, h));
    return monte_carlo_max_loss(factor, n_paths, seed, n_workers);
}

std::uint64_t factorization_count() {
    return g_factorizations.load(std::memory_order_relaxed);
}

namespace {

constexpr char kFactorMagic[8] = {'F', 'B', 'M', 'C', 'H', 'O', 'L', '1'};

} // namespace

void save_factor(const std::filesystem::path& file, const CholeskyFactor& factor) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("save_factor: cannot open " + file.string());
    }
    out.write(kFactorMagic, sizeof kFactorMagic);
    const double h = factor.hurst().value();
    out.write(reinterpret_cast<const char*>(&h), sizeof h);
    const std::uint64_t n = factor.dim();
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = factor.lower().at(i, j);
            out.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
    }
    if (!out) {
        throw std::runtime_error("save_factor: write failed for " + file.string());
    }
}

CholeskyFactor load_factor(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw std::runtime_error("load_factor: cannot open " + file.string());
    }
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kFactorMagic, sizeof magic) != 0) {
        throw std::runtime_error("load_factor: bad magic in " + file.string());
    }
    double h = 0.0;
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&h), sizeof h);
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    if (!in || n == 0 || n > (1u << 20)) {
        throw std::runtime_error("load_factor: bad header in " + file.string());
    }
    PackedLowerTriangular lower(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double v = 0.0;
            in.read(reinterpret_cast<char*>(&v), sizeof v);
            if (!in || !std::isfinite(v)) {
                throw std::runtime_error("load_factor: truncated or non-finite data in " +
                                         file.string());
            }
            lower.at(i, j) = v;
        }
    }
    return CholeskyFactor(TimeGrid(1.0, static_cast<std::size_t>(n)), HurstParameter(h),
                          std::move(lower));
}

} // namespace fbmdd::sim
