#include "erinc/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace erinc {

namespace {

void walk_multi_index(std::vector<std::int64_t>& idx, std::int64_t per_axis, bool& done) {
    for (int a = static_cast<int>(idx.size()) - 1; a >= 0; --a) {
        if (++idx[static_cast<std::size_t>(a)] < per_axis) return;
        idx[static_cast<std::size_t>(a)] = 0;
    }
    done = true;
}

} // namespace

DyadicGrid make_grid(int d, int p) {
    if (d < 1 || d > 3) throw std::invalid_argument("make_grid: dimension must be 1, 2 or 3");
    if (p < 0 || p > 16) throw std::invalid_argument("make_grid: resolution must be in [0, 16]");
    if (p * d > 20) throw std::invalid_argument("make_grid: 2^(p*d) cells exceed the 2^20 cap");
    return DyadicGrid{d, p};
}

GridFunction::GridFunction(DyadicGrid grid, std::vector<double> masses)
    : grid_(grid), masses_(std::move(masses)) {
    if (static_cast<std::int64_t>(masses_.size()) != grid_.cell_count()) {
        throw std::invalid_argument("GridFunction: mass vector size must equal the cell count");
    }
    for (double m : masses_) {
        if (!(m >= 0.0)) {
            throw std::invalid_argument("GridFunction: cell masses must be >= 0");
        }
    }
}

double GridFunction::total_mass() const {
    double s = 0.0, comp = 0.0;
    for (double m : masses_) {
        const double y = m - comp;
        const double t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    return s;
}

std::int64_t cell_index(const DyadicGrid& grid, std::span<const std::int64_t> idx) {
    const std::int64_t per_axis = grid.cells_per_axis();
    std::int64_t lin = 0;
    for (int a = 0; a < grid.d; ++a) {
        lin = lin * per_axis + idx[static_cast<std::size_t>(a)];
    }
    return lin;
}

std::vector<double> inclusive_prefix_sums(const DyadicGrid& grid, std::span<const double> masses) {
    std::vector<double> prefix(masses.begin(), masses.end());
    const std::int64_t per_axis = grid.cells_per_axis();
    const std::int64_t cells = grid.cell_count();
    // running sum along each axis in turn
    std::int64_t stride = 1;
    for (int a = grid.d - 1; a >= 0; --a) {
        for (std::int64_t base = 0; base < cells; ++base) {
            const std::int64_t coord = (base / stride) % per_axis;
            if (coord > 0) {
                prefix[static_cast<std::size_t>(base)] +=
                    prefix[static_cast<std::size_t>(base - stride)];
            }
        }
        stride *= per_axis;
    }
    return prefix;
}

double cumulative_at(const DyadicGrid& grid, std::span<const double> prefix,
                     std::span<const std::int64_t> corner) {
    const std::int64_t per_axis = grid.cells_per_axis();
    std::int64_t lin = 0;
    for (int a = 0; a < grid.d; ++a) {
        const std::int64_t c = corner[static_cast<std::size_t>(a)];
        if (c < 0 || c > per_axis) {
            throw std::invalid_argument("cumulative_at: corner component out of range");
        }
        if (c == 0) return 0.0;
        lin = lin * per_axis + (c - 1);
    }
    return prefix[static_cast<std::size_t>(lin)];
}

double GridFunction::cumulative(std::span<const std::int64_t> corner) const {
    const auto prefix = inclusive_prefix_sums(grid_, masses_);
    return cumulative_at(grid_, prefix, corner);
}

nlohmann::json GridFunction::to_json() const {
    // masses in row-major lexicographic multi-index order (axis 0 slowest);
    // this order is part of the file contract.
    return nlohmann::json{{"d", grid_.d}, {"p", grid_.p}, {"masses", masses_}};
}

GridFunction GridFunction::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("d") || !j.contains("p") || !j.contains("masses")) {
        throw std::invalid_argument("GridFunction: expected {d, p, masses}");
    }
    const auto grid = make_grid(j.at("d").get<int>(), j.at("p").get<int>());
    auto masses = j.at("masses").get<std::vector<double>>();
    return GridFunction(grid, std::move(masses));
}

GridFunction discretize(const CornerFn& g_eval, const DyadicGrid& grid) {
    const std::int64_t per_axis = grid.cells_per_axis();
    const double step = 1.0 / static_cast<double>(per_axis);
    const std::int64_t lattice = per_axis + 1;

    // corner values on the closed lattice
    std::int64_t lattice_total = 1;
    for (int a = 0; a < grid.d; ++a) lattice_total *= lattice;
    std::vector<double> corner_vals(static_cast<std::size_t>(lattice_total));
    {
        std::vector<std::int64_t> idx(static_cast<std::size_t>(grid.d), 0);
        std::vector<double> pt(static_cast<std::size_t>(grid.d));
        bool done = false;
        for (std::int64_t lin = 0; !done; ++lin) {
            for (int a = 0; a < grid.d; ++a) {
                pt[static_cast<std::size_t>(a)] =
                    static_cast<double>(idx[static_cast<std::size_t>(a)]) * step;
            }
            corner_vals[static_cast<std::size_t>(lin)] = g_eval(pt);
            walk_multi_index(idx, lattice, done);
        }
    }
    if (std::abs(corner_vals[0]) > 1e-12) {
        throw std::invalid_argument("discretize: g_eval(0) must be 0");
    }

    auto lattice_lin = [&](std::span<const std::int64_t> c) {
        std::int64_t lin = 0;
        for (int a = 0; a < grid.d; ++a) lin = lin * lattice + c[static_cast<std::size_t>(a)];
        return lin;
    };

    std::vector<double> masses(static_cast<std::size_t>(grid.cell_count()));
    std::vector<std::int64_t> cell(static_cast<std::size_t>(grid.d), 0);
    std::vector<std::int64_t> corner(static_cast<std::size_t>(grid.d));
    bool done = false;
    for (std::int64_t lin = 0; !done; ++lin) {
        // inclusion-exclusion over the 2^d corners of the cell
        double mass = 0.0;
        for (std::uint32_t bits = 0; bits < (1u << grid.d); ++bits) {
            int ones = 0;
            for (int a = 0; a < grid.d; ++a) {
                const bool up = (bits >> a) & 1u;
                corner[static_cast<std::size_t>(a)] = cell[static_cast<std::size_t>(a)] + (up ? 1 : 0);
                ones += up ? 1 : 0;
            }
            const double sign = ((grid.d - ones) % 2 == 0) ? 1.0 : -1.0;
            mass += sign * corner_vals[static_cast<std::size_t>(lattice_lin(corner))];
        }
        if (mass < 0.0) {
            if (mass < -1e-12) {
                std::string where;
                for (int a = 0; a < grid.d; ++a) {
                    where += (a ? "," : "") + std::to_string(cell[static_cast<std::size_t>(a)] + 1);
                }
                throw std::invalid_argument(
                    "discretize: negative mass at cell (" + where +
                    "); input is not a distribution function on the grid");
            }
            mass = 0.0;
        }
        masses[static_cast<std::size_t>(lin)] = mass;
        walk_multi_index(cell, per_axis, done);
    }
    return GridFunction(grid, std::move(masses));
}

double sup_norm_dist(const GridFunction& a, const GridFunction& b) {
    if (!(a.grid() == b.grid())) {
        throw std::invalid_argument("sup_norm_dist: grid mismatch");
    }
    std::vector<double> diff(a.masses().size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
        diff[i] = a.masses()[i] - b.masses()[i];
    }
    const auto prefix = inclusive_prefix_sums(a.grid(), diff);
    // Every extended corner with all components >= 1 is some inclusive
    // prefix entry; corners with a zero component contribute 0.
    double best = 0.0;
    for (double v : prefix) best = std::max(best, std::abs(v));
    return best;
}

GridFunction identity_grid_function(const DyadicGrid& grid) {
    return GridFunction(grid,
                        std::vector<double>(static_cast<std::size_t>(grid.cell_count()),
                                            grid.cell_volume()));
}

} // namespace erinc
