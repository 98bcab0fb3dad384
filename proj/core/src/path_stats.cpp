#include "fbmdd/path_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fbmdd::stats {

namespace {

void reject_nan(double x) {
    if (std::isnan(x)) {
        // NaN would silently poison every running max below.
        throw std::invalid_argument("path statistics: NaN in path values");
    }
}

} // namespace

double maximum_loss(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("maximum_loss: empty path");
    }
    reject_nan(values[0]);
    double running_max = values[0];
    double loss = 0.0;
    for (std::size_t k = 1; k < values.size(); ++k) {
        const double x = values[k];
        reject_nan(x);
        running_max = std::max(running_max, x);
        loss = std::max(loss, running_max - x);
    }
    return loss;
}

double maximum_loss(const FbmPath& path) {
    return maximum_loss(std::span<const double>(path.values()));
}

PathFunctionals functionals(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("functionals: empty path");
    }
    reject_nan(values[0]);
    PathFunctionals f;
    f.supremum = values[0];
    f.infimum = values[0];
    double running_max = values[0];
    for (std::size_t k = 1; k < values.size(); ++k) {
        const double x = values[k];
        reject_nan(x);
        f.supremum = std::max(f.supremum, x);
        f.infimum = std::min(f.infimum, x);
        running_max = std::max(running_max, x);
        f.max_loss = std::max(f.max_loss, running_max - x);
    }
    f.range = f.supremum - f.infimum;
    return f;
}

PathFunctionals functionals(const FbmPath& path) {
    return functionals(std::span<const double>(path.values()));
}

} // namespace fbmdd::stats
