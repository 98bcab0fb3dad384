#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fbmdd/core.hpp"

namespace fbmdd::bounds {

enum class BoundKind { lower, upper };

enum class BoundTarget {
    expected_sup,      // E(S_t)
    expected_inf,      // E(I_t)
    expected_range,    // E(R_t)
    expected_max_loss, // E(M_t)
    tail_probability,  // P(M_t > x)
};

struct BoundEntry {
    std::string label;
    BoundKind kind = BoundKind::lower;
    BoundTarget target = BoundTarget::expected_max_loss;
    double value = 0.0;
    std::string source; // closed-form expression the value comes from
    bool in_regime = true;
};

struct BoundReport {
    double h = 0.0;
    double t = 0.0;
    std::vector<BoundEntry> entries;
};

/// Two-sided Gaussian-comparison bound on E(M_t):
/// t^H/sqrt(pi) <= E(M_t) <= 2 t^H/sqrt(pi). Established for H in
/// [1/2,1); other H throws a domain error. At H = 1/2 the upper
/// comparison is an equality with the sup of sqrt(2)-scaled Brownian
/// motion.
std::pair<double, double> comparison_bounds(const HurstParameter& h, double t);

/// Earlier reflection/sup-based bounds: E(S) upper sqrt(2/pi) t^H,
/// E(I) lower, E(R) upper, two-sided E(S), and the two-sided E(M)
/// bound sqrt(2)/(2 sqrt(pi)) t^H <= E(M_t) <= 2 sqrt(2)/sqrt(pi) t^H.
std::vector<BoundEntry> baseline_bounds(const HurstParameter& h, double t);

/// Markov bound P(M_t > x) <= 2 t^H / (x sqrt(pi)), clamped to [0,1].
/// Requires x > 0 and H in [1/2,1).
double markov_tail_bound(double x, const HurstParameter& h, double t);

/// Same bound without the probability clamp.
double markov_tail_bound_raw(double x, const HurstParameter& h, double t);

/// E[((B_u - B_v) - (B_u2 - B_v2))^2], the squared L2 distance between
/// two path increments, as the six-term |.|^2H expansion. Times must be
/// nonnegative; the comparison-inequality context uses times in [0,1].
double increment_distance_sq(double u, double v, double u2, double v2, const HurstParameter& h);

/// Combined report: baseline entries plus the comparison pair, the
/// latter marked out-of-regime instead of omitted when H < 1/2.
BoundReport full_report(const HurstParameter& h, double t);

/// True iff, per target, every lower-bound entry is <= every
/// upper-bound entry (ignoring out-of-regime entries).
bool report_ordering_ok(const BoundReport& report);

} // namespace fbmdd::bounds
