#include "erinc/increments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace erinc {

GridFunction IncrementSample::to_grid(int p) const {
    const auto grid = make_grid(dim(), p);
    const std::int64_t per_axis = grid.cells_per_axis();
    std::vector<double> masses(static_cast<std::size_t>(grid.cell_count()), 0.0);
    const double inv_norm = normalization > 0.0 ? 1.0 / normalization : 0.0;
    const auto d = static_cast<std::size_t>(dim());
    for (std::int64_t i = 0; i < count; ++i) {
        std::int64_t lin = 0;
        for (std::size_t a = 0; a < d; ++a) {
            const double u = rel_points[static_cast<std::size_t>(i) * d + a];
            // u in [0,1) so the floor lands in [0, 2^p - 1]
            const auto cell = static_cast<std::int64_t>(
                std::floor(u * static_cast<double>(per_axis)));
            lin = lin * per_axis + std::min(cell, per_axis - 1);
        }
        masses[static_cast<std::size_t>(lin)] += inv_norm;
    }
    return GridFunction(grid, std::move(masses));
}

nlohmann::json IncrementSample::to_json(int p) const {
    return nlohmann::json{{"center", center},
                          {"n", n},
                          {"h_n", h_n},
                          {"count", count},
                          {"normalization", normalization},
                          {"grid", to_grid(p).to_json()}};
}

namespace {

void check_window_fits(std::span<const double> z, double edge, const Box& O, int d) {
    for (int a = 0; a < d; ++a) {
        const auto ai = static_cast<std::size_t>(a);
        if (!(z[ai] >= O.lo[ai] && z[ai] + edge <= O.hi[ai])) {
            throw std::invalid_argument(
                "increment window escapes the model support; shrink H or the bandwidth");
        }
    }
}

} // namespace

IncrementSample increment_process(std::span<const double> points, int d,
                                  std::span<const double> z, double h_n, double c, double f_z,
                                  std::int64_t n, const Box& O) {
    if (d < 1 || d > 3) throw std::invalid_argument("increment_process: d must be 1, 2 or 3");
    const double edge = std::pow(h_n, 1.0 / static_cast<double>(d));
    check_window_fits(z, edge, O, d);

    IncrementSample s;
    s.center.assign(z.begin(), z.end());
    s.n = n;
    s.h_n = h_n;
    s.normalization = c * f_z * std::log(static_cast<double>(n));
    const std::size_t dd = static_cast<std::size_t>(d);
    const std::int64_t npts = static_cast<std::int64_t>(points.size() / dd);
    for (std::int64_t i = 0; i < npts; ++i) {
        double rel[3];
        bool inside = true;
        for (std::size_t a = 0; a < dd && inside; ++a) {
            const double u = (points[static_cast<std::size_t>(i) * dd + a] - z[a]) / edge;
            inside = (u >= 0.0 && u < 1.0);
            rel[a] = u;
        }
        if (inside) {
            for (std::size_t a = 0; a < dd; ++a) s.rel_points.push_back(rel[a]);
            ++s.count;
        }
    }
    return s;
}

IncrementSample poissonized_increment(const DensityModel& model, std::int64_t n,
                                      std::span<const double> z, const BandwidthSchedule& sched,
                                      SplitMix64& rng) {
    const std::int64_t eta = poisson_variate(static_cast<double>(n), rng);
    const auto points = model.sample(eta, rng);
    const double h_n = sched.bandwidth(n);
    return increment_process(points, model.dim(), z, h_n, sched.c(), model.density(z), n,
                             model.support());
}

CenterLayout center_layout(const Box& H, const BandwidthSchedule& sched, std::int64_t n,
                           LayoutMode mode, double delta) {
    const int d = H.dim();
    if (mode == LayoutMode::packing && delta != 1.0) {
        throw std::invalid_argument("center_layout: packing requires delta = 1");
    }
    if (!(delta > 0.0)) throw std::invalid_argument("center_layout: delta must be > 0");
    const double h_n = sched.bandwidth(n);
    const double edge = std::pow(delta * h_n, 1.0 / static_cast<double>(d));

    std::vector<std::int64_t> per_axis(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        const double len = H.edge(a);
        if (len < edge) {
            throw std::invalid_argument("center_layout: H is smaller than one window");
        }
        const double ratio = len / edge;
        if (mode == LayoutMode::packing) {
            per_axis[static_cast<std::size_t>(a)] =
                static_cast<std::int64_t>(std::floor(ratio + 1e-9));
        } else {
            per_axis[static_cast<std::size_t>(a)] =
                static_cast<std::int64_t>(std::ceil(ratio - 1e-9));
        }
    }

    CenterLayout layout;
    layout.mode = mode;
    layout.d = d;
    layout.window_edge = edge;
    layout.count = 1;
    for (auto m : per_axis) layout.count *= m;
    layout.centers.reserve(static_cast<std::size_t>(layout.count * d));

    std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
    for (std::int64_t i = 0; i < layout.count; ++i) {
        for (int a = 0; a < d; ++a) {
            const auto ai = static_cast<std::size_t>(a);
            double zc = H.lo[ai] + static_cast<double>(idx[ai]) * edge;
            if (mode == LayoutMode::covering && idx[ai] == per_axis[ai] - 1) {
                zc = H.hi[ai] - edge;  // clamp keeps the last window inside H
            }
            layout.centers.push_back(zc);
        }
        for (int a = d - 1; a >= 0; --a) {
            const auto ai = static_cast<std::size_t>(a);
            if (++idx[ai] < per_axis[ai]) break;
            idx[ai] = 0;
        }
    }
    return layout;
}

double oscillation_statistic(const GridFunction& gf_fine, int p) {
    const auto& grid = gf_fine.grid();
    if (p >= grid.p || p < 0) {
        throw std::invalid_argument("oscillation_statistic: need 0 <= p < fine resolution");
    }
    const auto prefix = inclusive_prefix_sums(grid, gf_fine.masses());
    const std::int64_t coarse_per_axis = std::int64_t{1} << p;
    const std::int64_t ratio = grid.cells_per_axis() / coarse_per_axis;
    std::vector<std::int64_t> idx(static_cast<std::size_t>(grid.d), 0);
    std::vector<std::int64_t> lo_corner(static_cast<std::size_t>(grid.d));
    std::vector<std::int64_t> hi_corner(static_cast<std::size_t>(grid.d));
    double best = 0.0;
    bool done = false;
    while (!done) {
        for (int a = 0; a < grid.d; ++a) {
            const auto ai = static_cast<std::size_t>(a);
            lo_corner[ai] = idx[ai] * ratio;
            hi_corner[ai] = (idx[ai] + 1) * ratio;
        }
        const double diff = cumulative_at(grid, prefix, hi_corner) -
                            cumulative_at(grid, prefix, lo_corner);
        best = std::max(best, diff);
        done = true;
        for (int a = grid.d - 1; a >= 0; --a) {
            const auto ai = static_cast<std::size_t>(a);
            if (++idx[ai] < coarse_per_axis) {
                done = false;
                break;
            }
            idx[ai] = 0;
        }
    }
    return best;
}

double rescaling_identity_check(std::span<const double> points, int d,
                                std::span<const double> z, std::int64_t n, std::int64_t k_block,
                                const BandwidthSchedule& sched,
                                const std::vector<BlockRow>& blocks, int p, double f_z) {
    const BlockRow row = block_of(blocks, n);
    if (row.k != k_block) {
        throw std::invalid_argument("rescaling_identity_check: n does not lie in block N_k");
    }
    const std::int64_t n_k = row.n_k;
    const double h_n = sched.bandwidth(n);
    const double h_nk = sched.bandwidth(n_k);
    const double rho = std::pow(h_n / h_nk, 1.0 / static_cast<double>(d));
    const double edge_n = std::pow(h_n, 1.0 / static_cast<double>(d));
    const double edge_nk = std::pow(h_nk, 1.0 / static_cast<double>(d));

    const std::size_t dd = static_cast<std::size_t>(d);
    const std::int64_t npts = static_cast<std::int64_t>(points.size() / dd);
    const std::int64_t per_axis = std::int64_t{1} << p;

    // counts points of the first n with Z - z componentwise in [0, upper_a)
    auto window_count = [&](std::span<const double> upper) {
        std::int64_t cnt = 0;
        for (std::int64_t i = 0; i < npts && i < n; ++i) {
            bool inside = true;
            for (std::size_t a = 0; a < dd && inside; ++a) {
                const double diff = points[static_cast<std::size_t>(i) * dd + a] - z[a];
                inside = (diff >= 0.0 && diff < upper[a]);
            }
            cnt += inside ? 1 : 0;
        }
        return cnt;
    };

    const double common_norm = sched.c() * f_z * std::log(static_cast<double>(n));
    std::int64_t max_mismatch = 0;
    std::vector<std::int64_t> idx(dd, 0);
    std::vector<double> up_direct(dd), up_rescaled(dd);
    bool done = false;
    while (!done) {
        bool admissible = true;
        for (std::size_t a = 0; a < dd; ++a) {
            const double s = static_cast<double>(idx[a]) / static_cast<double>(per_axis);
            if (rho * s >= 1.0) admissible = false;
            up_direct[a] = edge_n * s;
            up_rescaled[a] = edge_nk * (rho * s);
        }
        if (admissible) {
            const std::int64_t c_direct = window_count(up_direct);
            const std::int64_t c_rescaled = window_count(up_rescaled);
            max_mismatch = std::max(max_mismatch, std::abs(c_direct - c_rescaled));
        }
        done = true;
        for (int a = d - 1; a >= 0; --a) {
            const auto ai = static_cast<std::size_t>(a);
            if (++idx[ai] < per_axis) {
                done = false;
                break;
            }
            idx[ai] = 0;
        }
    }
    return static_cast<double>(max_mismatch) / common_norm;
}

} // namespace erinc
