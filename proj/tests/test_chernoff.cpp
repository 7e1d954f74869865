#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "erinc/chernoff.hpp"
#include "oracles.hpp"

using erinc::chernoff_h;
using erinc::h_root;
using erinc::legendre_check;
using erinc::poisson_chernoff_bound;
using erinc::poisson_log_mgf;
using erinc::poisson_tail_exact;
using erinc::RootBranch;
using erinc::TailSide;

TEST_CASE("chernoff_h closed-form values") {
    CHECK(chernoff_h(1.0) == 0.0);
    CHECK(chernoff_h(0.0) == 1.0);
    CHECK(std::isinf(chernoff_h(-1.0)));
    CHECK(chernoff_h(-1.0) > 0.0);
    CHECK(chernoff_h(2.0) == doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-15));
    // infinity is sticky under addition
    CHECK(std::isinf(chernoff_h(-0.5) + chernoff_h(2.0)));
}

TEST_CASE("chernoff_h shape: nonnegative, unique zero, monotone branches, convex") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> ux(0.0, 6.0), ul(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double x1 = ux(gen), x2 = ux(gen), lam = ul(gen);
        CHECK(chernoff_h(x1) >= 0.0);
        const double lhs = chernoff_h(lam * x1 + (1.0 - lam) * x2);
        const double rhs = lam * chernoff_h(x1) + (1.0 - lam) * chernoff_h(x2);
        CHECK(lhs <= rhs + 1e-12);
    }
    for (double x = 0.0; x < 0.99; x += 0.07) {
        CHECK(chernoff_h(x) > chernoff_h(x + 0.01));
    }
    for (double x = 1.0; x < 8.0; x += 0.13) {
        CHECK(chernoff_h(x + 0.01) > chernoff_h(x));
    }
    CHECK(chernoff_h(1.0 + 1e-6) > 0.0);
    CHECK(chernoff_h(1.0 - 1e-6) > 0.0);
}

TEST_CASE("poisson_log_mgf") {
    CHECK(poisson_log_mgf(0.0) == 0.0);
    CHECK(poisson_log_mgf(std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(poisson_log_mgf(1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-15));
    CHECK(poisson_log_mgf(-50.0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_THROWS_AS((void)poisson_log_mgf(710.0), std::overflow_error);
}

TEST_CASE("legendre duality against the closed form") {
    CHECK(legendre_check(1.0, 10.0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(legendre_check(0.5, 10.0) == doctest::Approx(0.15342640972002735).epsilon(1e-7));
    CHECK(legendre_check(2.0, 10.0) == doctest::Approx(0.38629436111989062).epsilon(1e-7));

    // spec grid: z on a log grid in [0.05, 50], gap < 1e-6
    for (double lz = std::log(0.05); lz <= std::log(50.0) + 1e-12; lz += std::log(50.0 / 0.05) / 40.0) {
        const double z = std::exp(lz);
        CHECK(std::abs(legendre_check(z, 12.0) - chernoff_h(z)) < 1e-6);
    }

    // cross-check the library maximizer against an independent golden oracle
    const double via_oracle =
        oracle::golden_max([](double u) { return 2.0 * u - std::expm1(u); }, -8.0, 8.0);
    CHECK(legendre_check(2.0, 8.0) == doctest::Approx(via_oracle).epsilon(1e-9));

    CHECK_THROWS_WITH_AS((void)legendre_check(100.0, 2.0), doctest::Contains("bound too small"),
                         std::domain_error);
    CHECK_THROWS_AS((void)legendre_check(0.0, 2.0), std::domain_error);
}

TEST_CASE("h_root matches independent bisection oracle") {
    CHECK(h_root(1.0, RootBranch::lower) == doctest::Approx(0.0).epsilon(1e-9));
    // frozen from the oracle bisection of M log M - M + 1 = y
    const double lower_half = oracle::bisect(
        [](double m) { return oracle::h_closed_form(m) - 0.5; }, 1e-12, 1.0);
    CHECK(lower_half == doctest::Approx(0.18668230885083704).epsilon(1e-9));
    CHECK(h_root(0.5, RootBranch::lower) == doctest::Approx(lower_half).epsilon(1e-8));
    const double upper_half = oracle::bisect(
        [](double m) { return oracle::h_closed_form(m) - 0.5; }, 1.0, 4.0);
    CHECK(upper_half == doctest::Approx(2.1555352035005025).epsilon(1e-9));
    CHECK(h_root(0.5, RootBranch::upper) == doctest::Approx(upper_half).epsilon(1e-8));

    CHECK_THROWS_AS((void)h_root(0.0, RootBranch::lower), std::domain_error);
    CHECK_THROWS_AS((void)h_root(-1.0, RootBranch::upper), std::domain_error);
    CHECK_THROWS_AS((void)h_root(1.5, RootBranch::lower), std::domain_error);

    // two-sided inverse property
    for (double y : {1e-4, 0.01, 0.2, 0.5, 0.9, 0.999}) {
        CHECK(std::abs(chernoff_h(h_root(y, RootBranch::lower)) - y) < 1e-8);
    }
    for (double y : {1e-4, 0.5, 1.0, 3.0, 10.0, 40.0}) {
        CHECK(std::abs(chernoff_h(h_root(y, RootBranch::upper)) - y) < 1e-8);
    }
}

TEST_CASE("poisson_tail_exact closed-form anchors") {
    CHECK(poisson_tail_exact(1.0, 0, TailSide::upper) == 1.0);
    CHECK(poisson_tail_exact(1.0, 2, TailSide::upper) ==
          doctest::Approx(0.26424111765711536).epsilon(1e-13));
    CHECK(poisson_tail_exact(1.0, 0, TailSide::lower) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-13));
    // complement consistency: P(X>=k) + P(X<=k-1) = 1
    for (double lam : {0.3, 1.0, 7.5, 123.0}) {
        for (std::int64_t k : {1, 2, 5, 9, 40}) {
            const double u = poisson_tail_exact(lam, k, TailSide::upper);
            const double l = poisson_tail_exact(lam, k - 1, TailSide::lower);
            CHECK(u + l == doctest::Approx(1.0).epsilon(1e-13));
        }
    }
    CHECK(poisson_tail_exact(5.0, -1, TailSide::upper) == 1.0);
    CHECK(poisson_tail_exact(5.0, -1, TailSide::lower) == 0.0);
    CHECK_THROWS_AS((void)poisson_tail_exact(2e4, 3, TailSide::upper), std::domain_error);
    CHECK_THROWS_AS((void)poisson_tail_exact(0.0, 3, TailSide::upper), std::domain_error);
}

TEST_CASE("Chernoff bound values and domain") {
    CHECK(poisson_chernoff_bound(5.0, 5.0, TailSide::upper) == 1.0);
    CHECK(poisson_chernoff_bound(100.0, 200.0, TailSide::upper) ==
          doctest::Approx(1.6728194042202236e-17).epsilon(1e-10));
    const double b = poisson_chernoff_bound(10.0, 20.0, TailSide::upper);
    CHECK(b == doctest::Approx(0.021006074709707943).epsilon(1e-12));
    CHECK(poisson_tail_exact(10.0, 20, TailSide::upper) <= b);
    CHECK_THROWS_AS((void)poisson_chernoff_bound(10.0, 5.0, TailSide::upper), std::domain_error);
    CHECK_THROWS_AS((void)poisson_chernoff_bound(10.0, 15.0, TailSide::lower), std::domain_error);
}

TEST_CASE("Chernoff bound dominates exact tails across a k sweep") {
    for (double lam : {1.0, 10.0, 100.0, 1000.0}) {
        const std::int64_t k_hi =
            static_cast<std::int64_t>(lam + 10.0 * std::sqrt(lam)) + 50;
        for (std::int64_t k = 0; k <= k_hi; ++k) {
            const double kd = static_cast<double>(k);
            if (kd >= lam) {
                CHECK(poisson_tail_exact(lam, k, TailSide::upper) <=
                      poisson_chernoff_bound(lam, kd, TailSide::upper) + 1e-15);
            }
            if (kd <= lam) {
                CHECK(poisson_tail_exact(lam, k, TailSide::lower) <=
                      poisson_chernoff_bound(lam, kd, TailSide::lower) + 1e-15);
            }
        }
    }
}

TEST_CASE("exponent tightness at lambda = 400, a = 2") {
    const double lam = 400.0;
    const auto k = static_cast<std::int64_t>(std::ceil(2.0 * lam));
    const double logp = std::log(poisson_tail_exact(lam, k, TailSide::upper));
    CHECK(std::abs(logp / lam + chernoff_h(2.0)) < 0.05);
}
