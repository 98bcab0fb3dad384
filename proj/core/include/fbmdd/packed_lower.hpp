#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fbmdd {

/// Lower-triangular n x n matrix in packed column-major storage:
/// column j holds rows j..n-1 contiguously. Total n(n+1)/2 doubles.
class PackedLowerTriangular {
public:
    explicit PackedLowerTriangular(std::size_t n) : n_(n), a_(n * (n + 1) / 2, 0.0) {}

    std::size_t dim() const noexcept { return n_; }

    std::size_t col_offset(std::size_t j) const noexcept {
        return j * n_ - j * (j - 1) / 2;
    }

    /// Pointer to (j,j); entries (j..n-1, j) follow contiguously.
    double* col(std::size_t j) noexcept { return a_.data() + col_offset(j); }
    const double* col(std::size_t j) const noexcept { return a_.data() + col_offset(j); }

    /// Entry (i,j) with i >= j.
    double& at(std::size_t i, std::size_t j) noexcept { return a_[col_offset(j) + (i - j)]; }
    double at(std::size_t i, std::size_t j) const noexcept { return a_[col_offset(j) + (i - j)]; }

    std::span<const double> packed() const noexcept { return a_; }
    std::span<double> packed() noexcept { return a_; }

    bool operator==(const PackedLowerTriangular&) const = default;

private:
    std::size_t n_;
    std::vector<double> a_;
};

} // namespace fbmdd
