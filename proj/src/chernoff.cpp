#include "erinc/chernoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace erinc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log of the largest finite double; e^u overflows above this.
constexpr double kLogMaxDouble = 709.782712893384;

} // namespace

double chernoff_h(double x) noexcept {
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x < 0.0) return kInf;
    if (x == 0.0) return 1.0;  // continuous extension, lim x log x = 0
    // x log x underflows gracefully for tiny x; no special casing needed
    // beyond the explicit x = 0 above.
    return x * std::log(x) - x + 1.0;
}

double poisson_log_mgf(double u) {
    if (u > kLogMaxDouble) {
        throw std::overflow_error("poisson_log_mgf: e^u overflows for u > ~709.78");
    }
    return std::expm1(u);
}

double legendre_check(double z, double search_bound) {
    if (!(z > 0.0)) {
        throw std::domain_error("legendre_check: z must be > 0");
    }
    if (!(search_bound > 0.0)) {
        throw std::domain_error("legendre_check: bound too small");
    }
    const double u_star = std::log(z);
    if (u_star < -search_bound || u_star > search_bound) {
        throw std::domain_error("legendre_check: bound too small");
    }
    // z*u - (e^u - 1) is strictly concave in u; golden-section on [-B, B].
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = -search_bound, hi = search_bound;
    auto objective = [z](double u) { return z * u - std::expm1(u); };
    double u1 = hi - gr * (hi - lo);
    double u2 = lo + gr * (hi - lo);
    double f1 = objective(u1), f2 = objective(u2);
    for (int iter = 0; iter < 200 && hi - lo > 1e-12 * (1.0 + std::abs(lo)); ++iter) {
        if (f1 < f2) {
            lo = u1;
            u1 = u2; f1 = f2;
            u2 = lo + gr * (hi - lo);
            f2 = objective(u2);
        } else {
            hi = u2;
            u2 = u1; f2 = f1;
            u1 = hi - gr * (hi - lo);
            f1 = objective(u1);
        }
    }
    return objective(0.5 * (lo + hi));
}

double h_root(double y, RootBranch branch) {
    if (!(y > 0.0)) {
        throw std::domain_error("h_root: y must be > 0");
    }
    double lo, hi;
    if (branch == RootBranch::lower) {
        if (y > 1.0) {
            throw std::domain_error("h_root: lower branch requires y <= 1");
        }
        lo = 0.0;  // h(0) = 1 >= y
        hi = 1.0;  // h(1) = 0 <= y
    } else {
        lo = 1.0;
        hi = 2.0;
        while (chernoff_h(hi) < y) hi *= 2.0;  // h grows superlinearly, few doublings
    }
    // h decreasing on the lower branch, increasing on the upper one.
    const double sign = (branch == RootBranch::lower) ? -1.0 : 1.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-10; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (sign * (chernoff_h(mid) - y) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

namespace {

// Sum exp(log_terms[i]) with the largest term as pivot, compensated
// (Kahan) so the absolute error stays at a few ulps of the total.
double sum_exp_pivoted(const std::vector<double>& log_terms) {
    if (log_terms.empty()) return 0.0;
    const double pivot = *std::max_element(log_terms.begin(), log_terms.end());
    if (pivot == -kInf) return 0.0;
    double sum = 0.0, comp = 0.0;
    for (double lt : log_terms) {
        const double term = std::exp(lt - pivot);
        const double yv = term - comp;
        const double tv = sum + yv;
        comp = (tv - sum) - yv;
        sum = tv;
    }
    return std::exp(pivot) * sum;
}

// log P(X = j) for X ~ Poisson(lambda).
double log_pmf(double lambda, std::int64_t j) {
    return -lambda + static_cast<double>(j) * std::log(lambda) - std::lgamma(static_cast<double>(j) + 1.0);
}

// Direct compensated sum of P(X = j) for j in [a, b] (log-space pivot).
double pmf_block_sum(double lambda, std::int64_t a, std::int64_t b) {
    if (b < a) return 0.0;
    std::vector<double> lt;
    lt.reserve(static_cast<std::size_t>(b - a + 1));
    for (std::int64_t j = a; j <= b; ++j) lt.push_back(log_pmf(lambda, j));
    return sum_exp_pivoted(lt);
}

// Index past which the neglected upper tail is far below the 1e-14 error
// budget: mode plus a generous Gaussian-width cushion, extended until the
// pmf itself is < e^-70 (the geometric remainder beyond that is smaller
// than ~1e-29).
std::int64_t tail_cutoff(double lambda, std::int64_t from) {
    std::int64_t hi = std::max<std::int64_t>(from, static_cast<std::int64_t>(lambda));
    hi += static_cast<std::int64_t>(12.0 * std::sqrt(lambda)) + 60;
    while (log_pmf(lambda, hi) > -70.0) hi += 32;
    return hi;
}

} // namespace

double poisson_tail_exact(double lambda, std::int64_t k, TailSide side) {
    if (!(lambda > 0.0)) {
        throw std::domain_error("poisson_tail_exact: lambda must be > 0");
    }
    if (lambda > 1e4) {
        throw std::domain_error("poisson_tail_exact: lambda > 1e4 outside oracle domain");
    }
    if (k < 0) {
        // P(X >= k) = 1 below the support, P(X <= k) = 0.
        return side == TailSide::upper ? 1.0 : 0.0;
    }
    const std::int64_t mode = static_cast<std::int64_t>(std::floor(lambda));
    if (side == TailSide::upper) {
        if (k == 0) return 1.0;
        if (k <= mode) {
            // Large tail: the complement P(X <= k-1) is the small side,
            // so 1 - (small, accurately summed) keeps absolute error tiny.
            return 1.0 - pmf_block_sum(lambda, 0, k - 1);
        }
        return pmf_block_sum(lambda, k, tail_cutoff(lambda, k));
    }
    if (k >= mode) {
        return 1.0 - pmf_block_sum(lambda, k + 1, tail_cutoff(lambda, k + 1));
    }
    return pmf_block_sum(lambda, 0, k);
}

double poisson_chernoff_bound(double lambda, double t, TailSide side) {
    if (!(lambda > 0.0)) {
        throw std::domain_error("poisson_chernoff_bound: lambda must be > 0");
    }
    if (!(t >= 0.0)) {
        throw std::domain_error("poisson_chernoff_bound: t must be >= 0");
    }
    if (side == TailSide::upper && t < lambda) {
        throw std::domain_error("poisson_chernoff_bound: upper side requires t >= lambda");
    }
    if (side == TailSide::lower && t > lambda) {
        throw std::domain_error("poisson_chernoff_bound: lower side requires t <= lambda");
    }
    return std::exp(-lambda * chernoff_h(t / lambda));
}

} // namespace erinc
