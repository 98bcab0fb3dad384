#pragma once

#include <span>

#include "fbmdd/core.hpp"

namespace fbmdd::stats {

/// Single-pass summary functionals of a sampled path starting at 0.
/// Invariants: range = supremum - infimum, supremum >= 0 >= infimum,
/// 0 <= max_loss <= range.
struct PathFunctionals {
    double supremum = 0.0;
    double infimum = 0.0;
    double range = 0.0;
    double max_loss = 0.0;
};

/// Largest peak-to-trough drop max over u <= v of values[u] - values[v]
/// (the discrete maximum drawdown). Always >= 0; rejects NaN input.
double maximum_loss(std::span<const double> values);
double maximum_loss(const FbmPath& path);

/// All four functionals in one pass over the path.
PathFunctionals functionals(std::span<const double> values);
PathFunctionals functionals(const FbmPath& path);

} // namespace fbmdd::stats
