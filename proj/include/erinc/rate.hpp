#pragma once

// Rate functionals I_p on dyadic grids and the sup-norm projection distance
// onto the sublevel sets Gamma_a = { I <= 1/a }.
//
// I_p(g) = sum over cells of w * h(mass / w), w = 2^-pd. Membership and
// distance queries use I_p as the rate: the piecewise-uniform extension of a
// grid function minimizes I among all extensions with the given cell masses
// (Jensen), so I_p membership certifies the extension's membership in
// Gamma_a and the queries are well-defined on grids.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "erinc/grid.hpp"

namespace erinc {

struct RateBudget {
    double a = 1.0;  // Gamma_a = { I <= 1/a }

    explicit RateBudget(double a_) : a(a_) {
        if (!(a > 0.0)) throw std::invalid_argument("RateBudget: a must be > 0");
    }
    double inverse() const { return 1.0 / a; }
};

// sum over cells of 2^-pd h(2^pd mass); finite and >= 0 since masses are >= 0.
double rate_Ip(const GridFunction& gf);

// I_p(discretize(g_eval, p)) for p = 1..p_max; nondecreasing in p by Jensen.
std::vector<std::pair<int, double>> rate_I_sequence(const CornerFn& g_eval, int d, int p_max);

// true iff rate_Ip(gf) <= 1/a.
bool gamma_contains(const GridFunction& gf, const RateBudget& budget);

// Thrown when the projection's outer bisection hits its iteration cap; the
// best bracket travels with the error.
class ProjectionError : public std::runtime_error {
  public:
    ProjectionError(const std::string& what, double lo, double hi)
        : std::runtime_error(what), bracket_lo(lo), bracket_hi(hi) {}
    double bracket_lo;
    double bracket_hi;
};

// true iff some grid function x (masses >= 0, same grid) with
// rate_Ip(x) <= 1/a lies within sup-corner distance t of gf, i.e. the
// minimum of the separable objective over the cumulative band of width t
// around gf is <= 1/a.
bool gamma_reachable_within(const GridFunction& gf, const RateBudget& budget, double t);

// inf over x in Gamma_a (same grid) of sup_norm_dist(gf, x), to within tol
// (tol >= 1e-6 required). Outer bisection on the distance; the inner
// feasibility test minimizes sum w h(x/w) under the cumulative band
// constraints (exact taut-string solve for d = 1, coordinate descent with
// pairwise mass transfers for d >= 2).
double dist_to_gamma(const GridFunction& gf, const RateBudget& budget, double tol);

namespace detail {

// Taut string through the monotone corridor A_k <= S_k <= B_k, k = 1..K,
// from S_0 = 0 to the pinned endpoint S_K = v (caller guarantees
// A_K <= v <= B_K and A <= B, both nondecreasing). Returns the increment
// sequence; it minimizes every convex functional of the increments among
// corridor paths with these endpoints.
std::vector<double> taut_string_increments(std::span<const double> lower,
                                           std::span<const double> upper, double v);

// min over corridor paths with S_K = v of sum_k w h((S_k - S_{k-1}) / w).
double band_path_cost(std::span<const double> lower, std::span<const double> upper, double v,
                      double w);

// min over the free endpoint v in [lower.back(), upper.back()] of
// band_path_cost; returns early once a cost <= early_exit is seen.
double band_min_rate_1d(std::span<const double> lower, std::span<const double> upper, double w,
                        double early_exit);

// Generic-d minimizer of sum w h(x/w) under cumulative band constraints
// |prefix_x(c) - prefix_gf(c)| <= t at every extended corner c. Cyclic
// exact coordinate minimization plus pairwise mass-transfer sweeps.
double band_min_rate_nd(const GridFunction& gf, double t);

} // namespace detail

} // namespace erinc
