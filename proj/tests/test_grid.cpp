#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "erinc/grid.hpp"
#include "oracles.hpp"

using namespace erinc;

namespace {

GridFunction gf1d(int p, std::vector<double> masses) {
    return GridFunction(make_grid(1, static_cast<int>(p)), std::move(masses));
}

} // namespace

TEST_CASE("make_grid validation") {
    CHECK(make_grid(1, 0).cell_count() == 1);
    CHECK(make_grid(1, 12).cell_count() == 4096);
    CHECK(make_grid(1, 16).cell_count() == 65536);
    CHECK(make_grid(2, 3).cell_count() == 64);
    CHECK(make_grid(3, 2).cell_count() == 64);
    CHECK(make_grid(2, 1).cell_volume() == 0.25);
    CHECK_THROWS_AS((void)make_grid(0, 3), std::invalid_argument);
    CHECK_THROWS_AS((void)make_grid(4, 3), std::invalid_argument);
    CHECK_THROWS_AS((void)make_grid(1, 17), std::invalid_argument);
    CHECK_THROWS_AS((void)make_grid(3, 8), std::invalid_argument);
}

TEST_CASE("GridFunction validation") {
    CHECK_THROWS_AS(GridFunction(make_grid(1, 2), {0.1, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(GridFunction(make_grid(1, 1), {0.1, -0.2}), std::invalid_argument);
    const auto gf = gf1d(1, {0.25, 0.75});
    CHECK(gf.total_mass() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("discretize: identity on d=1 p=2") {
    const auto grid = make_grid(1, 2);
    const auto gf = discretize([](std::span<const double> s) { return s[0]; }, grid);
    for (double m : gf.masses()) CHECK(m == doctest::Approx(0.25).epsilon(1e-15));
    // corner values (0, 0.25, 0.5, 0.75) and total-mass corner 1
    for (std::int64_t k = 0; k <= 4; ++k) {
        const std::array<std::int64_t, 1> corner{k};
        CHECK(gf.cumulative(corner) == doctest::Approx(0.25 * static_cast<double>(k)).epsilon(1e-15));
    }
}

TEST_CASE("discretize: zero function") {
    const auto gf = discretize([](std::span<const double>) { return 0.0; }, make_grid(2, 2));
    for (double m : gf.masses()) CHECK(m == 0.0);
}

TEST_CASE("discretize: d=2 product measure, cross-checked by finite differences") {
    const auto grid = make_grid(2, 1);
    auto g = [](std::span<const double> s) { return s[0] * s[1]; };
    const auto gf = discretize(g, grid);
    REQUIRE(gf.masses().size() == 4);
    for (double m : gf.masses()) CHECK(m == doctest::Approx(0.25).epsilon(1e-15));

    // independent oracle: inclusion-exclusion over each cell's corners
    auto g_vec = [](const std::vector<double>& s) { return s[0] * s[1]; };
    for (double lo0 : {0.0, 0.5}) {
        for (double lo1 : {0.0, 0.5}) {
            CHECK(oracle::finite_difference_mass(g_vec, {lo0, lo1}, {lo0 + 0.5, lo1 + 0.5}) ==
                  doctest::Approx(0.25).epsilon(1e-15));
        }
    }
}

TEST_CASE("discretize rejects non-monotone input and names the cell") {
    const auto grid = make_grid(1, 1);
    CHECK_THROWS_WITH_AS(
        (void)discretize([](std::span<const double> s) { return s[0] < 0.75 ? s[0] : 0.1; }, grid),
        doctest::Contains("cell (2)"), std::invalid_argument);
    CHECK_THROWS_AS(
        (void)discretize([](std::span<const double>) { return 0.5; }, grid),
        std::invalid_argument);  // g(0) != 0
}

TEST_CASE("cumulative corner semantics (d=2)") {
    // masses: cell (1,1)->0.1, (1,2)->0.2, (2,1)->0.3, (2,2)->0.4, row-major axis0 slowest
    const auto grid = make_grid(2, 1);
    const GridFunction gf(grid, {0.1, 0.2, 0.3, 0.4});
    const auto prefix = inclusive_prefix_sums(grid, gf.masses());
    auto cum = [&](std::int64_t c0, std::int64_t c1) {
        const std::array<std::int64_t, 2> c{c0, c1};
        return cumulative_at(grid, prefix, c);
    };
    CHECK(cum(0, 0) == 0.0);
    CHECK(cum(0, 2) == 0.0);
    CHECK(cum(1, 1) == doctest::Approx(0.1));
    CHECK(cum(1, 2) == doctest::Approx(0.3));
    CHECK(cum(2, 1) == doctest::Approx(0.4));
    CHECK(cum(2, 2) == doctest::Approx(1.0));
}

TEST_CASE("sup_norm_dist examples") {
    const auto a = gf1d(1, {0.5, 0.5});
    const auto b = gf1d(1, {0.25, 0.75});
    CHECK(sup_norm_dist(a, a) == 0.0);
    CHECK(sup_norm_dist(a, b) == doctest::Approx(0.25).epsilon(1e-15));

    const auto zero = gf1d(2, {0, 0, 0, 0});
    const auto ident = identity_grid_function(make_grid(1, 2));
    CHECK(sup_norm_dist(zero, ident) == doctest::Approx(1.0).epsilon(1e-15));  // at s -> 1^-

    CHECK_THROWS_AS((void)sup_norm_dist(a, zero), std::invalid_argument);
}

TEST_CASE("sup_norm_dist is a metric on random grid functions") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> um(0.0, 0.4);
    const auto grid = make_grid(2, 2);
    auto random_gf = [&]() {
        std::vector<double> m(static_cast<std::size_t>(grid.cell_count()));
        for (auto& v : m) v = um(gen);
        return GridFunction(grid, std::move(m));
    };
    for (int rep = 0; rep < 50; ++rep) {
        const auto x = random_gf(), y = random_gf(), z = random_gf();
        const double dxy = sup_norm_dist(x, y);
        CHECK(dxy == doctest::Approx(sup_norm_dist(y, x)));
        CHECK(dxy <= sup_norm_dist(x, z) + sup_norm_dist(z, y) + 1e-12);
        CHECK(dxy >= 0.0);
    }
}

TEST_CASE("JSON round trip keeps grid and mass order") {
    const auto grid = make_grid(2, 1);
    const GridFunction gf(grid, {0.1, 0.2, 0.3, 0.4});
    const auto j = gf.to_json();
    CHECK(j.at("d") == 2);
    CHECK(j.at("p") == 1);
    const auto back = GridFunction::from_json(j);
    CHECK(back.grid() == grid);
    CHECK(back.masses() == gf.masses());

    CHECK_THROWS_AS((void)GridFunction::from_json(nlohmann::json{{"d", 1}}), std::invalid_argument);
    CHECK_THROWS_AS((void)GridFunction::from_json(nlohmann::json{
                        {"d", 1}, {"p", 1}, {"masses", {0.1, -0.3}}}),
                    std::invalid_argument);
}

TEST_CASE("discretize/cumulative round trip on random monotone functions") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> uslope(0.0, 3.0);
    for (int rep = 0; rep < 20; ++rep) {
        const double b1 = uslope(gen), b2 = uslope(gen);
        // piecewise-linear monotone with a kink at 1/2
        auto g = [b1, b2](std::span<const double> s) {
            const double x = s[0];
            return x < 0.5 ? b1 * x : b1 * 0.5 + b2 * (x - 0.5);
        };
        const auto grid = make_grid(1, 4);
        const auto gf = discretize(g, grid);
        const auto prefix = inclusive_prefix_sums(grid, gf.masses());
        for (std::int64_t k = 0; k <= 16; ++k) {
            const std::array<std::int64_t, 1> corner{k};
            const std::array<const double, 1> pt{static_cast<double>(k) / 16.0};
            CHECK(cumulative_at(grid, prefix, corner) ==
                  doctest::Approx(g(pt)).epsilon(1e-12));
        }
    }
}
