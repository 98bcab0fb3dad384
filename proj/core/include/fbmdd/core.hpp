#pragma once

#include <cstddef>
#include <vector>

namespace fbmdd {

/// Hurst exponent of a fractional Brownian motion, valid on the open
/// interval (0,1). Values in [1/2,1) give persistent (long-range
/// dependent) increments, which is the regime the comparison bounds
/// are established for.
class HurstParameter {
public:
    explicit HurstParameter(double h);

    double value() const noexcept { return h_; }

    /// True iff 1/2 <= H < 1.
    bool in_persistent_regime() const noexcept { return h_ >= 0.5; }

private:
    double h_;
};

/// Uniform grid 0, d, 2d, ..., n*d = horizon with d = horizon / n_steps.
class TimeGrid {
public:
    TimeGrid(double horizon, std::size_t n_steps);

    double horizon() const noexcept { return horizon_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    std::size_t n_points() const noexcept { return n_steps_ + 1; }
    double step() const noexcept { return horizon_ / static_cast<double>(n_steps_); }
    double time(std::size_t k) const noexcept { return step() * static_cast<double>(k); }

    bool operator==(const TimeGrid&) const = default;

private:
    double horizon_;
    std::size_t n_steps_;
};

/// Sampled process values on a grid: values[k] = B(k*d), values[0] = 0.
class FbmPath {
public:
    FbmPath(TimeGrid grid, std::vector<double> values);

    const TimeGrid& grid() const noexcept { return grid_; }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    TimeGrid grid_;
    std::vector<double> values_;
};

/// E[B_s B_t] = (t^2H + s^2H - |t-s|^2H) / 2. Requires s, t >= 0.
double covariance(double s, double t, const HurstParameter& h);

/// Autocovariance of unit-lag increments at lag n_lag on a grid of step
/// h_step: rho(n) = h_step^2H * ((n+1)^2H + (n-1)^2H - 2 n^2H) / 2.
/// n_lag = 0 returns the increment variance h_step^2H. Positive for
/// H > 1/2, zero for H = 1/2, negative for H < 1/2 (n_lag >= 1).
double increment_autocovariance(std::size_t n_lag, double h_step, const HurstParameter& h);

/// Scale an expected-max-loss estimate from horizon t to horizon 1 by
/// self-similarity: E(M_1) = E(M_t) / t^H. Requires t > 0.
double rescale_expected_max_loss(double estimate_at_t, double t, const HurstParameter& h);

/// Pointwise exponential asset transform Y_k = y0 * exp((r + mu) * t_k
/// + sigma * B_k) of a sampled path. Requires y0 > 0.
std::vector<double> asset_price_transform(const FbmPath& path, double y0, double r, double mu,
                                          double sigma);

} // namespace fbmdd
