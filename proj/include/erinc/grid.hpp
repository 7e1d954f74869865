#pragma once

// Dyadic grids on [0,1)^d and grid functions: the computable stand-in for
// bounded increasing functions g with g(0) = 0. A grid function stores one
// nonnegative mass per cell A_i = 2^-p [i-1, i); its cumulative value at a
// grid corner is the sum of the masses of the cells contained in [0, corner).
// Sup-norms are evaluated on the extended corner lattice {0,...,2^p}^d per
// axis, where coordinate 2^p stands for the limit from below at 1 (so the
// top corner carries the total mass).

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace erinc {

struct DyadicGrid {
    int d = 1;  // dimension, 1..3
    int p = 0;  // resolution

    std::int64_t cells_per_axis() const { return std::int64_t{1} << p; }
    std::int64_t cell_count() const { return std::int64_t{1} << (p * d); }
    double cell_volume() const { return 1.0 / static_cast<double>(cell_count()); }

    bool operator==(const DyadicGrid&) const = default;
};

// Validates d in {1,2,3}, p >= 0, p <= 16 and 2^{pd} <= 2^20 (so d=2 tops
// out at p=10 and d=3 at p=6; anything larger has no supported operation
// and only burns memory).
DyadicGrid make_grid(int d, int p);

class GridFunction {
  public:
    GridFunction(DyadicGrid grid, std::vector<double> masses);

    const DyadicGrid& grid() const { return grid_; }
    const std::vector<double>& masses() const { return masses_; }
    double total_mass() const;

    // Cumulative value at an extended corner, components in {0,...,2^p}.
    // Linear-time in the cell count; use inclusive_prefix_sums for bulk work.
    double cumulative(std::span<const std::int64_t> corner) const;

    nlohmann::json to_json() const;
    static GridFunction from_json(const nlohmann::json& j);

  private:
    DyadicGrid grid_;
    std::vector<double> masses_;  // row-major lexicographic, axis 0 slowest
};

// Row-major linear index of a 0-based cell multi-index.
std::int64_t cell_index(const DyadicGrid& grid, std::span<const std::int64_t> idx);

// Inclusive prefix sums over cells: entry at cell j equals the sum of masses
// over all cells k with k <= j componentwise. Same layout as the masses.
std::vector<double> inclusive_prefix_sums(const DyadicGrid& grid, std::span<const double> masses);

// Cumulative at an extended corner, looked up in a prefix table from
// inclusive_prefix_sums. Corners with any zero component give 0.
double cumulative_at(const DyadicGrid& grid, std::span<const double> prefix,
                     std::span<const std::int64_t> corner);

// Builds the grid function whose cumulative corner values equal g_eval at
// every corner of the closed lattice {0, 2^-p, ..., 1}^d; cell masses come
// from d-dimensional finite differencing. Rejects (std::invalid_argument,
// message names the offending cell) when differencing yields a genuinely
// negative mass, i.e. the input is not a distribution function on the grid;
// negatives within -1e-12 are rounding and get clamped to 0.
using CornerFn = std::function<double(std::span<const double>)>;
GridFunction discretize(const CornerFn& g_eval, const DyadicGrid& grid);

// sup over the extended corner lattice of |cumulative difference|.
// Throws std::invalid_argument on grid mismatch.
double sup_norm_dist(const GridFunction& a, const GridFunction& b);

// Grid function with every cell at its Jensen-ideal mass 2^-pd (cumulative
// is the product function prod_i s_i; rate I_p = 0, so it lies in every
// budget set).
GridFunction identity_grid_function(const DyadicGrid& grid);

} // namespace erinc
