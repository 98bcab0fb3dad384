#include "fbmdd/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fbmdd::bounds {

namespace {

// Constants derived from pi at run time rather than transcribed
// decimals.
const double kSqrtPi = std::sqrt(std::numbers::pi);
const double kInvSqrtPi = 1.0 / kSqrtPi;
const double kSqrt2OverSqrtPi = std::numbers::sqrt2 / kSqrtPi;

void require_regime(const HurstParameter& h, const char* what) {
    if (!h.in_persistent_regime()) {
        throw std::domain_error(std::string(what) +
                                ": bound requires H in [1/2,1), got H = " +
                                std::to_string(h.value()));
    }
}

void require_positive_time(double t, const char* what) {
    if (!(t > 0.0)) {
        throw std::domain_error(std::string(what) + ": t must be positive");
    }
}

double abs_pow(double x, double e) {
    const double ax = std::abs(x);
    return ax == 0.0 ? 0.0 : std::pow(ax, e);
}

} // namespace

std::pair<double, double> comparison_bounds(const HurstParameter& h, double t) {
    require_regime(h, "comparison_bounds");
    require_positive_time(t, "comparison_bounds");
    const double scale = std::pow(t, h.value());
    return {scale * kInvSqrtPi, scale * 2.0 * kInvSqrtPi};
}

std::vector<BoundEntry> baseline_bounds(const HurstParameter& h, double t) {
    require_positive_time(t, "baseline_bounds");
    const double scale = std::pow(t, h.value());
    std::vector<BoundEntry> entries;
    entries.push_back({"reflection_sup", BoundKind::upper, BoundTarget::expected_sup,
                       scale * kSqrt2OverSqrtPi, "sqrt(2)/sqrt(pi) * t^H"});
    entries.push_back({"reflection_inf", BoundKind::lower, BoundTarget::expected_inf,
                       -scale * kSqrt2OverSqrtPi, "-sqrt(2)/sqrt(pi) * t^H"});
    entries.push_back({"reflection_range", BoundKind::upper, BoundTarget::expected_range,
                       scale * 2.0 * kSqrt2OverSqrtPi, "2 sqrt(2)/sqrt(pi) * t^H"});
    entries.push_back({"sup_two_sided", BoundKind::lower, BoundTarget::expected_sup,
                       scale * 0.5 * kSqrt2OverSqrtPi, "sqrt(2)/(2 sqrt(pi)) * t^H"});
    entries.push_back({"sup_two_sided", BoundKind::upper, BoundTarget::expected_sup,
                       scale * kSqrt2OverSqrtPi, "sqrt(2)/sqrt(pi) * t^H"});
    entries.push_back({"baseline", BoundKind::lower, BoundTarget::expected_max_loss,
                       scale * 0.5 * kSqrt2OverSqrtPi, "sqrt(2)/(2 sqrt(pi)) * t^H"});
    entries.push_back({"baseline", BoundKind::upper, BoundTarget::expected_max_loss,
                       scale * 2.0 * kSqrt2OverSqrtPi, "2 sqrt(2)/sqrt(pi) * t^H"});
    return entries;
}

double markov_tail_bound_raw(double x, const HurstParameter& h, double t) {
    if (!(x > 0.0)) {
        throw std::domain_error("markov_tail_bound: x must be positive");
    }
    require_regime(h, "markov_tail_bound");
    require_positive_time(t, "markov_tail_bound");
    return 2.0 * std::pow(t, h.value()) * kInvSqrtPi / x;
}

double markov_tail_bound(double x, const HurstParameter& h, double t) {
    return std::min(1.0, markov_tail_bound_raw(x, h, t));
}

double increment_distance_sq(double u, double v, double u2, double v2, const HurstParameter& h) {
    if (u < 0.0 || v < 0.0 || u2 < 0.0 || v2 < 0.0) {
        throw std::domain_error("increment_distance_sq: times must be nonnegative");
    }
    const double e = 2.0 * h.value();
    return abs_pow(u - v, e) + abs_pow(u2 - v2, e) + abs_pow(u - u2, e) - abs_pow(u - v2, e) -
           abs_pow(v - u2, e) + abs_pow(v - v2, e);
}

BoundReport full_report(const HurstParameter& h, double t) {
    BoundReport report;
    report.h = h.value();
    report.t = t;
    report.entries = baseline_bounds(h, t);
    const bool in_regime = h.in_persistent_regime();
    if (in_regime) {
        const auto [lo, hi] = comparison_bounds(h, t);
        report.entries.push_back({"comparison", BoundKind::lower,
                                  BoundTarget::expected_max_loss, lo, "t^H/sqrt(pi)"});
        report.entries.push_back({"comparison", BoundKind::upper,
                                  BoundTarget::expected_max_loss, hi, "2 t^H/sqrt(pi)"});
    } else {
        const double scale = std::pow(t, h.value());
        report.entries.push_back({"comparison", BoundKind::lower,
                                  BoundTarget::expected_max_loss, scale * kInvSqrtPi,
                                  "t^H/sqrt(pi)", false});
        report.entries.push_back({"comparison", BoundKind::upper,
                                  BoundTarget::expected_max_loss, scale * 2.0 * kInvSqrtPi,
                                  "2 t^H/sqrt(pi)", false});
    }
    return report;
}

bool report_ordering_ok(const BoundReport& report) {
    for (const auto& lo : report.entries) {
        if (lo.kind != BoundKind::lower || !lo.in_regime) {
            continue;
        }
        for (const auto& hi : report.entries) {
            if (hi.kind != BoundKind::upper || !hi.in_regime || hi.target != lo.target) {
                continue;
            }
            if (lo.value > hi.value) {
                return false;
            }
        }
    }
    return true;
}

} // namespace fbmdd::bounds
