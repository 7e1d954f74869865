#pragma once

// Empirical increment processes: window-relative point clouds reduced to
// grid functions, packing/covering center layouts, the within-cell
// oscillation statistic, and the blocking rescaling identity.
//
// Window convention is half-open throughout: the window at center z is
// z + h^{1/d} [0,1)^d and cumulative evaluation uses [0, s). Relative
// coordinates exactly equal to 1 fall outside the window, which keeps grid
// cells an exact partition.

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "erinc/grid.hpp"
#include "erinc/models.hpp"
#include "erinc/random.hpp"
#include "erinc/schedule.hpp"

namespace erinc {

struct IncrementSample {
    std::vector<double> center;      // z
    std::int64_t n = 0;              // nominal sample size (the log n in the normalization)
    double h_n = 0.0;
    double normalization = 0.0;      // c f(z) log n
    std::vector<double> rel_points;  // flattened, every coordinate in [0,1)
    std::int64_t count = 0;

    int dim() const { return static_cast<int>(center.size()); }

    // Cell mass = (# relative points in the cell) / normalization; the
    // cumulative at a corner is the increment process evaluated there.
    GridFunction to_grid(int p) const;

    // {center, n, h_n, count, normalization, grid:{d,p,masses}}
    nlohmann::json to_json(int p) const;
};

// Reduces a raw point set to the increment sample at center z with window
// volume h_n. Throws std::invalid_argument when the window does not fit in
// the support box O (the density assumption's scope).
IncrementSample increment_process(std::span<const double> points, int d,
                                  std::span<const double> z, double h_n, double c, double f_z,
                                  std::int64_t n, const Box& O);

// Poissonized version: draws eta ~ Poisson(n), then n is replaced by eta
// i.i.d. points while the normalization keeps the nominal n. Disjoint-cell
// counts become independent Poissons.
IncrementSample poissonized_increment(const DensityModel& model, std::int64_t n,
                                      std::span<const double> z, const BandwidthSchedule& sched,
                                      SplitMix64& rng);

enum class LayoutMode { packing, covering };

struct CenterLayout {
    LayoutMode mode = LayoutMode::packing;
    int d = 1;
    double window_edge = 0.0;         // (delta h_n)^{1/d}
    std::vector<double> centers;      // flattened, row-major over the lattice
    std::int64_t count = 0;

    std::span<const double> center(std::int64_t i) const {
        return std::span<const double>(centers).subspan(
            static_cast<std::size_t>(i) * static_cast<std::size_t>(d),
            static_cast<std::size_t>(d));
    }
};

// Packing: maximal axis-aligned lattice of pairwise disjoint windows inside
// H (delta must be 1). Covering: lattice with the final center per axis
// clamped to hi - edge, so the windows cover H while staying inside it.
// Throws std::invalid_argument when H cannot hold a single window.
CenterLayout center_layout(const Box& H, const BandwidthSchedule& sched, std::int64_t n,
                           LayoutMode mode, double delta);

// max over coarse cells (resolution p) of cumulative(cell upper corner) -
// cumulative(cell lower corner), the monotone upper bound for the
// within-cell deviation of gf_fine. Requires p < gf_fine resolution.
double oscillation_statistic(const GridFunction& gf_fine, int p);

// Both sides of the blocking rescaling identity evaluated on one realized
// sample: the direct window at bandwidth h_n versus the block window at
// h_{n_k} rescaled by rho = (h_n / h_{n_k})^{1/d}, compared at resolution-p
// corners s with rho s inside [0,1)^d. The two normalizations cancel to the
// common factor 1/(c f(z) log n) exactly, so the result is the maximum
// absolute count mismatch scaled by that factor: exactly 0.0 when both
// sides count the same points.
double rescaling_identity_check(std::span<const double> points, int d,
                                std::span<const double> z, std::int64_t n, std::int64_t k_block,
                                const BandwidthSchedule& sched,
                                const std::vector<BlockRow>& blocks, int p, double f_z);

} // namespace erinc
