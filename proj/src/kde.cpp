#include "erinc/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace erinc {

namespace {

// d = 1 window counting via one sort + binary searches; the layouts in the
// occupancy experiments have ~1/h_n windows, so per-window linear scans
// would be quadratic in n.
struct SortedPoints1D {
    std::vector<double> xs;

    explicit SortedPoints1D(std::span<const double> points) : xs(points.begin(), points.end()) {
        std::sort(xs.begin(), xs.end());
    }

    std::int64_t count(double lo, double hi) const {
        const auto a = std::lower_bound(xs.begin(), xs.end(), lo);
        const auto b = std::lower_bound(xs.begin(), xs.end(), hi);
        return static_cast<std::int64_t>(b - a);
    }
};

} // namespace

Kernel Kernel::by_id(const std::string& id) {
    if (id == "uniform") return Kernel{KernelShape::uniform};
    if (id == "triangular") return Kernel{KernelShape::triangular_product};
    throw std::invalid_argument("Kernel: unknown kernel id '" + id + "'");
}

std::string Kernel::id() const {
    return shape == KernelShape::uniform ? "uniform" : "triangular";
}

double Kernel::eval(std::span<const double> u) const {
    double k = 1.0;
    for (double ua : u) {
        if (shape == KernelShape::uniform) {
            if (ua < 0.0 || ua >= 1.0) return 0.0;
        } else {
            if (ua < 0.0 || ua > 1.0) return 0.0;
            k *= ua <= 0.5 ? 4.0 * ua : 4.0 * (1.0 - ua);
        }
    }
    return k;
}

double kde_estimate(std::span<const double> points, int d, const Kernel& kernel,
                    std::span<const double> z, double h_n, std::int64_t n) {
    if (n <= 0) throw std::invalid_argument("kde_estimate: n must be > 0");
    const double edge = std::pow(h_n, 1.0 / static_cast<double>(d));
    const std::size_t dd = static_cast<std::size_t>(d);
    const std::int64_t npts = static_cast<std::int64_t>(points.size() / dd);
    double acc = 0.0;
    double u[3];
    for (std::int64_t i = 0; i < npts; ++i) {
        for (std::size_t a = 0; a < dd; ++a) {
            u[a] = (points[static_cast<std::size_t>(i) * dd + a] - z[a]) / edge;
        }
        acc += kernel.eval(std::span<const double>(u, dd));
    }
    return acc / (static_cast<double>(n) * h_n);
}

double sup_error(std::span<const double> points, const Kernel& kernel, const DensityModel& model,
                 const CenterLayout& grid, double h_n, std::int64_t n) {
    double worst = 0.0;
    if (grid.d == 1 && kernel.shape == KernelShape::uniform) {
        const SortedPoints1D sorted(points);
        const double edge = h_n;
        const double scale = 1.0 / (static_cast<double>(n) * h_n);
        for (std::int64_t i = 0; i < grid.count; ++i) {
            const auto z = grid.center(i);
            const double fn = static_cast<double>(sorted.count(z[0], z[0] + edge)) * scale;
            worst = std::max(worst, std::abs(fn - model.density(z)));
        }
        return worst;
    }
    for (std::int64_t i = 0; i < grid.count; ++i) {
        const auto z = grid.center(i);
        const double fn = kde_estimate(points, grid.d, kernel, z, h_n, n);
        worst = std::max(worst, std::abs(fn - model.density(z)));
    }
    return worst;
}

std::pair<double, double> window_count_extremes(std::span<const double> points,
                                                const CenterLayout& layout,
                                                const BandwidthSchedule& sched, std::int64_t n,
                                                const DensityModel& model) {
    if (layout.mode != LayoutMode::packing) {
        throw std::invalid_argument("window_count_extremes: packing layout required");
    }
    const double h_n = sched.bandwidth(n);
    const double edge = layout.window_edge;
    const std::size_t dd = static_cast<std::size_t>(layout.d);
    const std::int64_t npts = static_cast<std::int64_t>(points.size() / dd);

    double min_ratio = std::numeric_limits<double>::infinity();
    double max_ratio = -std::numeric_limits<double>::infinity();
    const double denom_base = static_cast<double>(n) * h_n;
    if (layout.d == 1) {
        const SortedPoints1D sorted(points);
        for (std::int64_t i = 0; i < layout.count; ++i) {
            const auto z = layout.center(i);
            const double ratio = static_cast<double>(sorted.count(z[0], z[0] + edge)) /
                                 (model.density(z) * denom_base);
            min_ratio = std::min(min_ratio, ratio);
            max_ratio = std::max(max_ratio, ratio);
        }
        return {min_ratio, max_ratio};
    }
    for (std::int64_t i = 0; i < layout.count; ++i) {
        const auto z = layout.center(i);
        std::int64_t cnt = 0;
        for (std::int64_t j = 0; j < npts; ++j) {
            bool inside = true;
            for (std::size_t a = 0; a < dd && inside; ++a) {
                const double diff = points[static_cast<std::size_t>(j) * dd + a] - z[a];
                inside = (diff >= 0.0 && diff < edge);
            }
            cnt += inside ? 1 : 0;
        }
        const double ratio = static_cast<double>(cnt) / (model.density(z) * denom_base);
        min_ratio = std::min(min_ratio, ratio);
        max_ratio = std::max(max_ratio, ratio);
    }
    return {min_ratio, max_ratio};
}

} // namespace erinc
