#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbmdd/core.hpp"
#include "fbmdd/packed_lower.hpp"

namespace fbmdd::sim {

/// Everything needed to reproduce a sampled path set bit-for-bit on the
/// same build: master seed, stream index, and the generator identity.
struct SeedManifest {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
    std::string algorithm = default_algorithm();

    static std::string default_algorithm() { return "xoshiro256++/splitmix64/as241"; }
    bool operator==(const SeedManifest&) const = default;
};

/// Grid covariance of the process at times d, 2d, ..., nd (the t=0
/// point is deterministic and excluded). Symmetric positive definite
/// for any H in (0,1); stored as the packed lower triangle.
class CovarianceMatrix {
public:
    CovarianceMatrix(TimeGrid grid, HurstParameter h, PackedLowerTriangular entries)
        : grid_(grid), h_(h), entries_(std::move(entries)) {}

    std::size_t dim() const noexcept { return entries_.dim(); }
    const TimeGrid& grid() const noexcept { return grid_; }
    const HurstParameter& hurst() const noexcept { return h_; }
    const PackedLowerTriangular& lower() const noexcept { return entries_; }

    /// Symmetric accessor, any (i,j) in [0,n).
    double at(std::size_t i, std::size_t j) const noexcept {
        return i >= j ? entries_.at(i, j) : entries_.at(j, i);
    }

private:
    TimeGrid grid_;
    HurstParameter h_;
    PackedLowerTriangular entries_;
};

/// Lower-triangular Cholesky factor L with L L^T equal to the grid
/// covariance, tagged with the (H, grid) it was built from.
class CholeskyFactor {
public:
    CholeskyFactor(TimeGrid grid, HurstParameter h, PackedLowerTriangular lower)
        : grid_(grid), h_(h), lower_(std::move(lower)) {}

    std::size_t dim() const noexcept { return lower_.dim(); }
    const TimeGrid& grid() const noexcept { return grid_; }
    const HurstParameter& hurst() const noexcept { return h_; }
    const PackedLowerTriangular& lower() const noexcept { return lower_; }

    double at(std::size_t i, std::size_t j) const noexcept {
        return i >= j ? lower_.at(i, j) : 0.0;
    }

private:
    TimeGrid grid_;
    HurstParameter h_;
    PackedLowerTriangular lower_;
};

/// Thrown when a pivot of the factorization is not strictly positive,
/// which signals an invalid H/grid combination or numerical breakdown.
class NotPositiveDefiniteError : public std::runtime_error {
public:
    NotPositiveDefiniteError(std::size_t pivot_index, double pivot_value);
    std::size_t pivot_index() const noexcept { return pivot_index_; }

private:
    std::size_t pivot_index_;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    SeedManifest seed;
};

CovarianceMatrix build_covariance_matrix(const TimeGrid& grid, const HurstParameter& h);

/// Right-looking Cholesky factorization; blocked panels for large
/// matrices. Deterministic for a fixed input. No regularization is
/// applied: a non-positive pivot throws NotPositiveDefiniteError.
CholeskyFactor cholesky_factorize(const CovarianceMatrix& cov);

/// One exact path: values = [0, (Lz)_1, ..., (Lz)_n] with z i.i.d.
/// standard normal from the manifest's stream.
FbmPath sample_path(const CholeskyFactor& factor, const SeedManifest& seed);

/// Test hook: same as sample_path but with injected normals.
FbmPath sample_path_with_normals(const CholeskyFactor& factor, std::span<const double> z);

/// Per-path maximum-loss samples for n_paths independent paths. Path p
/// draws from stream_id = p of the manifest's master seed, so results
/// are identical for any worker count. n_workers = 0 picks a default.
std::vector<double> max_loss_samples(const CholeskyFactor& factor, std::size_t n_paths,
                                     const SeedManifest& seed, unsigned n_workers = 0);

/// Mean and standard error of the maximum loss over n_paths paths.
/// The factor is computed once and reused for every path.
McEstimate monte_carlo_max_loss(const HurstParameter& h, const TimeGrid& grid,
                                std::size_t n_paths, const SeedManifest& seed,
                                unsigned n_workers = 0);
McEstimate monte_carlo_max_loss(const CholeskyFactor& factor, std::size_t n_paths,
                                const SeedManifest& seed, unsigned n_workers = 0);

/// Cumulative count of factorizations performed by this process; lets
/// tests assert that a Monte Carlo run factorizes exactly once.
std::uint64_t factorization_count();

/// Binary factor cache. Layout: magic "FBMCHOL1", H as 8-byte float,
/// n as 8-byte unsigned, then the lower triangle row-major as 8-byte
/// floats, all little-endian. The grid is the unit-horizon grid with n
/// steps. load_factor validates the header and entry finiteness.
void save_factor(const std::filesystem::path& file, const CholeskyFactor& factor);
CholeskyFactor load_factor(const std::filesystem::path& file);

} // namespace fbmdd::sim
