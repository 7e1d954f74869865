#pragma once

// Chernoff function h(x) = x log x - x + 1 and the Poisson tail machinery
// built on it. h is the Legendre transform of the centered Poisson log-MGF
// u -> e^u - 1, which is what makes exp(-lambda h(t/lambda)) a valid tail
// bound for Poisson(lambda).
//
// Extended-real convention: h(x) = +infinity for x < 0, represented by the
// IEEE double infinity (sticky under addition, as required).

#include <cstdint>

namespace erinc {

// x log x - x + 1 for x > 0, 1 at x = 0, +infinity for x < 0.
// Nonnegative with a unique zero at x = 1; decreasing on [0,1],
// increasing on [1,inf). Total function, never throws.
double chernoff_h(double x) noexcept;

// log E[e^{uX}] for X ~ Poisson(1), i.e. e^u - 1.
// Throws std::overflow_error when e^u overflows a double (u > ~709.78);
// saturating silently would corrupt downstream Legendre maximizations.
double poisson_log_mgf(double u);

// Numerically maximizes z*u - (e^u - 1) over |u| <= search_bound and returns
// the maximum. The maximizer is u* = log z, so the result must agree with
// chernoff_h(z) to ~1e-6; callers use the pair as a duality cross-check.
// Throws std::domain_error("bound too small") when log z lies outside
// [-search_bound, search_bound], std::domain_error for z <= 0.
double legendre_check(double z, double search_bound);

enum class RootBranch { lower, upper };

// Inverse of h on one of its two monotone branches: returns M with
// h(M) = y, M in [0,1] for the lower branch (requires y <= 1) and
// M in [1,inf) for the upper branch. Bisection to 1e-10 absolute.
// Throws std::domain_error for y <= 0 or lower-branch y > 1.
double h_root(double y, RootBranch branch);

enum class TailSide { upper, lower };

// Exact Poisson tail: P(X >= k) (upper) or P(X <= k) (lower) for
// X ~ Poisson(lambda). Log-space terms summed with compensation, pivoted at
// the largest term, absolute error < 1e-14. Oracle-grade, so the domain is
// deliberately narrow: requires 0 < lambda <= 1e4 (throws std::domain_error).
double poisson_tail_exact(double lambda, std::int64_t k, TailSide side);

// Chernoff bound exp(-lambda h(t/lambda)) for the Poisson tail on the given
// side. Valid (and only accepted) for t >= lambda on the upper side and
// t <= lambda on the lower side; the wrong side is a std::domain_error.
// Dominates poisson_tail_exact wherever both are defined.
double poisson_chernoff_bound(double lambda, double t, TailSide side);

} // namespace erinc
