#include "fbmdd/vitale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "fbmdd/numeric.hpp"

namespace fbmdd::vitale {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

double abs_pow(double x, double e) {
    const double ax = std::abs(x);
    return ax == 0.0 ? 0.0 : std::pow(ax, e);
}

constexpr std::size_t kMaxFamilySteps = 200;

} // namespace

IncrementFamily build_increment_family(std::size_t n, const HurstParameter& h) {
    if (n < 1) {
        throw std::invalid_argument("build_increment_family: n must be >= 1");
    }
    if (n > kMaxFamilySteps) {
        throw std::invalid_argument(
            "build_increment_family: n = " + std::to_string(n) +
            " exceeds the supported maximum of 200 (dense distance matrix is O(n^4) memory)");
    }
    IncrementFamily fam{TimeGrid(1.0, n), h, {}, {}, {}};
    const std::size_t m = n * (n + 1) / 2 + 1;
    fam.members.reserve(m);
    fam.variance.reserve(m);
    fam.members.emplace_back(0, 0); // collapsed zero member
    fam.variance.push_back(0.0);
    const double d = fam.grid.step();
    const double e = 2.0 * h.value();
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= i; ++j) {
            fam.members.emplace_back(i, j);
            fam.variance.push_back(abs_pow(static_cast<double>(j) * d, e));
        }
    }
    fam.dist_sq.assign(m * m, 0.0);
    for (std::size_t p = 0; p < m; ++p) {
        for (std::size_t q = p + 1; q < m; ++q) {
            double dist;
            if (p == 0) {
                dist = fam.variance[q];
            } else {
                const auto [i, j] = fam.members[p];
                const auto [k, l] = fam.members[q];
                const double ti = static_cast<double>(i) * d;
                const double tij = static_cast<double>(i - j) * d;
                const double tk = static_cast<double>(k) * d;
                const double tkl = static_cast<double>(k - l) * d;
                const double cov = 0.5 * (abs_pow(ti - tkl, e) + abs_pow(tij - tk, e) -
                                          abs_pow(ti - tk, e) - abs_pow(tij - tkl, e));
                dist = std::max(0.0, fam.variance[p] + fam.variance[q] - 2.0 * cov);
            }
            fam.dist_sq[p * m + q] = dist;
            fam.dist_sq[q * m + p] = dist;
        }
    }
    return fam;
}

double expected_max_comonotone(std::span<const double> a) {
    if (a.empty()) {
        throw std::invalid_argument("expected_max_comonotone: empty coefficient vector");
    }
    double lo = a[0];
    double hi = a[0];
    for (double c : a) {
        if (!std::isfinite(c)) {
            throw std::domain_error("expected_max_comonotone: coefficients must be finite");
        }
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    // max_p a_p z is (max a) z for z >= 0 and (min a) z for z < 0; both
    // half-line integrals against the normal density give 1/sqrt(2 pi).
    return (hi - lo) * kInvSqrt2Pi;
}

double expected_max_comonotone_quadrature(std::span<const double> a, double abs_tol) {
    if (a.empty()) {
        throw std::invalid_argument("expected_max_comonotone_quadrature: empty vector");
    }
    double amax = 0.0;
    for (double c : a) {
        amax = std::max(amax, std::abs(c));
    }
    if (amax == 0.0) {
        return 0.0;
    }
    auto integrand = [&a](double z) {
        double best = -std::numeric_limits<double>::infinity();
        for (double c : a) {
            best = std::max(best, c * z);
        }
        return best * kInvSqrt2Pi * std::exp(-0.5 * z * z);
    };
    // Split at the kink of max_p a_p z.
    const double cut = 8.0;
    return numeric::adaptive_simpson(integrand, -cut, 0.0, 0.5 * abs_tol) +
           numeric::adaptive_simpson(integrand, 0.0, cut, 0.5 * abs_tol);
}

double expected_max_independent(std::span<const double> sigma, double abs_tol) {
    std::vector<double> positive;
    positive.reserve(sigma.size());
    bool has_degenerate = false;
    for (double s : sigma) {
        if (s < 0.0 || !std::isfinite(s)) {
            throw std::domain_error("expected_max_independent: std devs must be finite and >= 0");
        }
        if (s == 0.0) {
            has_degenerate = true;
        } else {
            positive.push_back(s);
        }
    }
    if (positive.empty()) {
        return 0.0;
    }
    const double smax = *std::max_element(positive.begin(), positive.end());
    auto integrand = [&positive, has_degenerate](double y) {
        double prod_up = 1.0;
        for (double s : positive) {
            prod_up *= numeric::norm_cdf(y / s);
            if (prod_up < 1e-300) {
                prod_up = 0.0;
                break;
            }
        }
        // Pr(0 <= -y) vanishes for y > 0, so any degenerate member
        // zeroes the down-side product.
        double prod_down = 0.0;
        if (!has_degenerate) {
            prod_down = 1.0;
            for (double s : positive) {
                prod_down *= numeric::norm_cdf(-y / s);
                if (prod_down < 1e-300) {
                    prod_down = 0.0;
                    break;
                }
            }
        }
        return 1.0 - prod_up - prod_down;
    };
    return numeric::adaptive_simpson(integrand, 0.0, 8.0 * smax, abs_tol);
}

ComonotoneResult maximize_comonotone(const IncrementFamily& family) {
    const std::size_t m = family.size();
    // Shortest-path closure of the root distances. The L2 distances
    // already satisfy the triangle inequality, so this mostly tightens
    // rounding noise, but it is the exact feasibility envelope.
    std::vector<double> sp(m * m);
    for (std::size_t idx = 0; idx < m * m; ++idx) {
        sp[idx] = std::sqrt(family.dist_sq[idx]);
    }
    for (std::size_t k = 0; k < m; ++k) {
        const double* row_k = sp.data() + k * m;
        for (std::size_t i = 0; i < m; ++i) {
            const double d_ik = sp[i * m + k];
            double* row_i = sp.data() + i * m;
            for (std::size_t j = 0; j < m; ++j) {
                row_i[j] = std::min(row_i[j], d_ik + row_k[j]);
            }
        }
    }
    std::size_t best_q = 0;
    double diameter = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
        for (std::size_t q = p + 1; q < m; ++q) {
            if (sp[p * m + q] > diameter) {
                diameter = sp[p * m + q];
                best_q = q;
            }
        }
    }
    // Distance profile from one diameter endpoint is feasible by the
    // triangle inequality and realizes the diameter as its range.
    ComonotoneResult result;
    result.family.coefficients.resize(m);
    for (std::size_t p = 0; p < m; ++p) {
        result.family.coefficients[p] = sp[p * m + best_q];
    }
    const double shift = result.family.coefficients[0];
    for (double& c : result.family.coefficients) {
        c -= shift;
    }
    result.bound = expected_max_comonotone(result.family.coefficients);
    return result;
}

IndependentResult maximize_independent(const IncrementFamily& family) {
    const std::size_t m = family.size();
    std::vector<double> s2(m, 0.0);
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t p = 1; p < m; ++p) {
        double row_min = inf;
        for (std::size_t q = 0; q < m; ++q) {
            if (q != p) {
                row_min = std::min(row_min, family.dist_sq_at(p, q));
            }
        }
        s2[p] = 0.5 * row_min;
    }
    auto objective = [&s2, m](double tol) {
        std::vector<double> sig(m);
        for (std::size_t p = 0; p < m; ++p) {
            sig[p] = std::sqrt(s2[p]);
        }
        return expected_max_independent(sig, tol);
    };
    double value = objective(1e-8);
    for (int sweep = 0; sweep < 100; ++sweep) {
        for (std::size_t p = 1; p < m; ++p) {
            double ceiling = inf;
            for (std::size_t q = 0; q < m; ++q) {
                if (q != p) {
                    ceiling = std::min(ceiling, family.dist_sq_at(p, q) - s2[q]);
                }
            }
            s2[p] = std::max(0.0, ceiling);
        }
        const double next = objective(1e-8);
        const bool converged = std::abs(next - value) <= 1e-9 * std::max(1.0, std::abs(next));
        value = next;
        if (converged) {
            break;
        }
    }
    IndependentResult result;
    result.family.std_devs.resize(m);
    for (std::size_t p = 0; p < m; ++p) {
        result.family.std_devs[p] = std::sqrt(s2[p]);
    }
    result.bound = value;
    return result;
}

double comonotone_feasibility_residual(const IncrementFamily& family,
                                       const ComonotoneFamily& assignment) {
    const std::size_t m = family.size();
    if (assignment.coefficients.size() != m) {
        throw std::invalid_argument("comonotone_feasibility_residual: size mismatch");
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < m; ++p) {
        for (std::size_t q = p + 1; q < m; ++q) {
            const double diff = assignment.coefficients[p] - assignment.coefficients[q];
            worst = std::max(worst, diff * diff - family.dist_sq_at(p, q));
        }
    }
    return worst;
}

double independent_feasibility_residual(const IncrementFamily& family,
                                        const IndependentFamily& assignment) {
    const std::size_t m = family.size();
    if (assignment.std_devs.size() != m) {
        throw std::invalid_argument("independent_feasibility_residual: size mismatch");
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < m; ++p) {
        const double sp2 = assignment.std_devs[p] * assignment.std_devs[p];
        for (std::size_t q = p + 1; q < m; ++q) {
            const double sq2 = assignment.std_devs[q] * assignment.std_devs[q];
            worst = std::max(worst, sp2 + sq2 - family.dist_sq_at(p, q));
        }
    }
    return worst;
}

VitaleBounds lower_bounds(std::size_t n, const HurstParameter& h) {
    if (!h.in_persistent_regime()) {
        throw std::domain_error("vitale::lower_bounds: requires H in [1/2,1)");
    }
    const IncrementFamily family = build_increment_family(n, h);
    VitaleBounds out;
    out.independent = maximize_independent(family);
    out.comonotone = maximize_comonotone(family);
    return out;
}

} // namespace fbmdd::vitale
