#include "fbmdd/core.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fbmdd {

namespace {

// |x|^(2H) with an explicit zero branch so coincident times never go
// through pow at a denormal-or-zero base.
double abs_pow_2h(double x, double two_h) {
    const double ax = std::abs(x);
    if (ax < std::numeric_limits<double>::epsilon() * 4.0) {
        return 0.0;
    }
    return std::pow(ax, two_h);
}

} // namespace

HurstParameter::HurstParameter(double h) : h_(h) {
    if (!(h > 0.0 && h < 1.0)) {
        throw std::domain_error("HurstParameter: H must lie in (0,1), got " + std::to_string(h));
    }
}

TimeGrid::TimeGrid(double horizon, std::size_t n_steps) : horizon_(horizon), n_steps_(n_steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::domain_error("TimeGrid: horizon must be positive and finite");
    }
    if (n_steps < 1) {
        throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
    }
}

FbmPath::FbmPath(TimeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n_points()) {
        throw std::invalid_argument("FbmPath: expected " + std::to_string(grid_.n_points()) +
                                    " values, got " + std::to_string(values_.size()));
    }
    if (values_[0] != 0.0) {
        throw std::invalid_argument("FbmPath: values[0] must be 0");
    }
}

double covariance(double s, double t, const HurstParameter& h) {
    if (s < 0.0 || t < 0.0) {
        throw std::domain_error("covariance: times must be nonnegative");
    }
    const double two_h = 2.0 * h.value();
    return 0.5 * (abs_pow_2h(t, two_h) + abs_pow_2h(s, two_h) - abs_pow_2h(t - s, two_h));
}

double increment_autocovariance(std::size_t n_lag, double h_step, const HurstParameter& h) {
    if (!(h_step > 0.0)) {
        throw std::domain_error("increment_autocovariance: step must be positive");
    }
    const double two_h = 2.0 * h.value();
    const double step_pow = std::pow(h_step, two_h);
    if (n_lag == 0) {
        return step_pow;
    }
    if (n_lag == 1) {
        // (n-1)^2H is exactly 0 here; spell it out rather than relying
        // on pow(0, 2H).
        return 0.5 * step_pow * (std::pow(2.0, two_h) - 2.0);
    }
    // (n+1)^2H + (n-1)^2H - 2 n^2H evaluated as
    // n^2H * (expm1(2H log1p(1/n)) + expm1(2H log1p(-1/n))), which keeps
    // full precision at large lags where the direct second difference
    // loses ~2H*log2(n) bits.
    const double n = static_cast<double>(n_lag);
    const double fwd = std::expm1(two_h * std::log1p(1.0 / n));
    const double bwd = std::expm1(two_h * std::log1p(-1.0 / n));
    return 0.5 * step_pow * std::pow(n, two_h) * (fwd + bwd);
}

double rescale_expected_max_loss(double estimate_at_t, double t, const HurstParameter& h) {
    if (!(t > 0.0)) {
        throw std::domain_error("rescale_expected_max_loss: horizon must be positive");
    }
    return estimate_at_t / std::pow(t, h.value());
}

std::vector<double> asset_price_transform(const FbmPath& path, double y0, double r, double mu,
                                          double sigma) {
    if (!(y0 > 0.0)) {
        throw std::domain_error("asset_price_transform: y0 must be positive");
    }
    if (sigma < 0.0) {
        throw std::domain_error("asset_price_transform: sigma must be nonnegative");
    }
    const auto& values = path.values();
    const double drift = r + mu;
    std::vector<double> out(values.size());
    out[0] = y0;
    for (std::size_t k = 1; k < values.size(); ++k) {
        out[k] = y0 * std::exp(drift * path.grid().time(k) + sigma * values[k]);
    }
    return out;
}

} // namespace fbmdd
