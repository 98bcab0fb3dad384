#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fbmdd/core.hpp"

namespace fbmdd::vitale {

/// Discretized increment family {B(i d) - B((i-j) d)} on the unit
/// horizon with d = 1/n, for i = 1..n and j = 0..i. All j = 0 members
/// are the same degenerate zero variable and are collapsed into the
/// single member with index 0, so the family has n(n+1)/2 + 1 members.
/// dist_sq holds the pairwise squared L2 distances E[(X_p - X_q)^2].
struct IncrementFamily {
    TimeGrid grid;
    HurstParameter h;
    std::vector<std::pair<std::size_t, std::size_t>> members; // (i,j); members[0] = {0,0}
    std::vector<double> variance;                             // (j d)^2H, 0 for the zero member
    std::vector<double> dist_sq;                              // dense m x m, row-major

    std::size_t size() const noexcept { return members.size(); }
    double dist_sq_at(std::size_t p, std::size_t q) const noexcept {
        return dist_sq[p * members.size() + q];
    }
};

/// Build the family from the covariance expansion of increment pairs.
/// Requires 1 <= n <= 200 (the dense distance matrix is O(n^4) memory).
IncrementFamily build_increment_family(std::size_t n, const HurstParameter& h);

/// Comonotone comparison family W_p = a_p * Z for one standard normal
/// Z. Feasible iff (a_p - a_q)^2 <= dist_sq(p,q) for every pair.
struct ComonotoneFamily {
    std::vector<double> coefficients;
};

/// Independent comparison family Y_p ~ N(0, sigma_p^2). Feasible iff
/// sigma_p^2 + sigma_q^2 <= dist_sq(p,q) for every pair p != q.
struct IndependentFamily {
    std::vector<double> std_devs;
};

/// E[max_p a_p Z] = (max a - min a) / sqrt(2 pi), in closed form.
double expected_max_comonotone(std::span<const double> a);

/// Same expectation by direct quadrature of E[max_p a_p z] against the
/// normal density; the independent cross-check path for the closed form.
double expected_max_comonotone_quadrature(std::span<const double> a, double abs_tol = 1e-10);

/// E[max_p Y_p] for independent centered normals via
/// int_0^inf (1 - prod Pr(Y_p <= y) - prod Pr(Y_p <= -y)) dy,
/// with degenerate sigma = 0 members contributing step functions.
/// Adaptive quadrature on [0, 8 max sigma]; all-zero input returns 0.
double expected_max_independent(std::span<const double> sigma, double abs_tol = 1e-8);

struct ComonotoneResult {
    ComonotoneFamily family;
    double bound = 0.0;
};

struct IndependentResult {
    IndependentFamily family;
    double bound = 0.0;
};

/// Maximize (max a - min a) subject to |a_p - a_q| <= sqrt(dist_sq).
/// The optimum is the diameter of the family under the shortest-path
/// closure of the pairwise distances (computed by Floyd-Warshall, the
/// tight envelope of the constraints); an optimal assignment is the
/// shortest-path distance profile from one diameter endpoint.
ComonotoneResult maximize_comonotone(const IncrementFamily& family);

/// Projected coordinate ascent on the variances: start from
/// sigma_p^2 = min_q dist_sq(p,q) / 2, then repeatedly raise each
/// coordinate to its per-coordinate ceiling min_q (dist_sq(p,q) -
/// sigma_q^2). The objective is nondecreasing in every coordinate, so
/// each step is an exact line maximization; iteration stops when the
/// objective's relative change drops below 1e-9 (at most 100 sweeps).
/// The result is feasible, hence a valid lower bound, regardless of
/// global optimality.
IndependentResult maximize_independent(const IncrementFamily& family);

/// Worst constraint violation of a comonotone assignment
/// (max over pairs of (a_p - a_q)^2 - dist_sq(p,q)).
double comonotone_feasibility_residual(const IncrementFamily& family,
                                       const ComonotoneFamily& assignment);

/// Worst constraint violation of an independent assignment
/// (max over pairs p != q of sigma_p^2 + sigma_q^2 - dist_sq(p,q)).
double independent_feasibility_residual(const IncrementFamily& family,
                                        const IndependentFamily& assignment);

struct VitaleBounds {
    IndependentResult independent;
    ComonotoneResult comonotone;
};

/// Both numerical lower bounds on E(M_1) for the n-point family.
/// Requires H in [1/2,1).
VitaleBounds lower_bounds(std::size_t n, const HurstParameter& h);

} // namespace fbmdd::vitale
