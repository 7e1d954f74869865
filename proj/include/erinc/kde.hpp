#pragma once

// Kernel density estimation under Erdos-Renyi bandwidths and the window
// occupancy extremes that drive the non-consistency demonstration. Kernels
// are anchored on [0,1)^d (the window convention), h_n is the window volume
// and the kernel argument rescales by h_n^{1/d} per axis.

#include <cstdint>
#include <span>
#include <string>
#include <utility>

#include "erinc/increments.hpp"
#include "erinc/models.hpp"
#include "erinc/schedule.hpp"

namespace erinc {

enum class KernelShape { uniform, triangular_product };

struct Kernel {
    KernelShape shape = KernelShape::uniform;

    static Kernel by_id(const std::string& id);  // "uniform" | "triangular"
    std::string id() const;

    // K(u); support inside [0,1]^d, integral 1. The uniform kernel is the
    // indicator of [0,1)^d; the triangular kernel is the product of tents
    // peaked at 1/2 with height 2.
    double eval(std::span<const double> u) const;
};

// (1/(n h_n)) sum_i K((Z_i - z) / h_n^{1/d}). For the uniform kernel this is
// exactly (window count)/(n h_n).
double kde_estimate(std::span<const double> points, int d, const Kernel& kernel,
                    std::span<const double> z, double h_n, std::int64_t n);

// max over the layout's centers of |kde_estimate(z) - f(z)|.
double sup_error(std::span<const double> points, const Kernel& kernel, const DensityModel& model,
                 const CenterLayout& grid, double h_n, std::int64_t n);

// Over all packing windows: min and max of count / (f(z_i) n h_n), the
// normalized occupancy whose almost-sure limit endpoints are
// h_root(1/(c f(z)), lower/upper). Requires a packing layout.
std::pair<double, double> window_count_extremes(std::span<const double> points,
                                                const CenterLayout& layout,
                                                const BandwidthSchedule& sched, std::int64_t n,
                                                const DensityModel& model);

} // namespace erinc
