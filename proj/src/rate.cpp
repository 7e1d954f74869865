#include "erinc/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "erinc/chernoff.hpp"

namespace erinc {

double rate_Ip(const GridFunction& gf) {
    const double w = gf.grid().cell_volume();
    const double inv_w = static_cast<double>(gf.grid().cell_count());
    double s = 0.0, comp = 0.0;
    for (double m : gf.masses()) {
        const double term = w * chernoff_h(m * inv_w);
        const double y = term - comp;
        const double t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    return s;
}

std::vector<std::pair<int, double>> rate_I_sequence(const CornerFn& g_eval, int d, int p_max) {
    if (p_max < 1) throw std::invalid_argument("rate_I_sequence: p_max must be >= 1");
    std::vector<std::pair<int, double>> out;
    out.reserve(static_cast<std::size_t>(p_max));
    for (int p = 1; p <= p_max; ++p) {
        const auto grid = make_grid(d, p);  // enforces the resolution caps
        out.emplace_back(p, rate_Ip(discretize(g_eval, grid)));
    }
    return out;
}

bool gamma_contains(const GridFunction& gf, const RateBudget& budget) {
    return rate_Ip(gf) <= budget.inverse();
}

namespace detail {

std::vector<double> taut_string_increments(std::span<const double> lower,
                                           std::span<const double> upper, double v) {
    const std::size_t K = lower.size();
    std::vector<double> inc(K, 0.0);
    std::size_t anchor_k = 0;
    double anchor_y = 0.0;
    // Corridor walk: extend the straight segment from the anchor while the
    // slope window stays nonempty; at a pinch, bend at the binding corridor
    // wall and re-anchor there.
    while (anchor_k < K) {
        double hi = std::numeric_limits<double>::infinity();
        double lo = -std::numeric_limits<double>::infinity();
        std::size_t hi_idx = anchor_k, lo_idx = anchor_k;
        bool bent = false;
        for (std::size_t j = anchor_k + 1; j <= K; ++j) {
            const double run = static_cast<double>(j - anchor_k);
            const double bu = (j == K) ? v : upper[j - 1];
            const double bl = (j == K) ? v : lower[j - 1];
            const double su = (bu - anchor_y) / run;
            const double sl = (bl - anchor_y) / run;
            if (sl > hi) {
                // floor at j climbs past the ceiling window: bend on the ceiling
                for (std::size_t m = anchor_k; m < hi_idx; ++m) inc[m] = hi;
                anchor_y = upper[hi_idx - 1];
                anchor_k = hi_idx;
                bent = true;
                break;
            }
            if (su < lo) {
                // ceiling at j drops past the floor window: bend on the floor
                for (std::size_t m = anchor_k; m < lo_idx; ++m) inc[m] = lo;
                anchor_y = lower[lo_idx - 1];
                anchor_k = lo_idx;
                bent = true;
                break;
            }
            if (su < hi) { hi = su; hi_idx = j; }
            if (sl > lo) { lo = sl; lo_idx = j; }
        }
        if (!bent) {
            // straight shot to the pinned endpoint
            const double slope = (v - anchor_y) / static_cast<double>(K - anchor_k);
            for (std::size_t m = anchor_k; m < K; ++m) inc[m] = slope;
            break;
        }
    }
    return inc;
}

double band_path_cost(std::span<const double> lower, std::span<const double> upper, double v,
                      double w) {
    const auto inc = taut_string_increments(lower, upper, v);
    double s = 0.0;
    for (double x : inc) {
        // monotone corridors keep increments >= 0 up to rounding
        s += w * chernoff_h(std::max(x, 0.0) / w);
    }
    return s;
}

double band_min_rate_1d(std::span<const double> lower, std::span<const double> upper, double w,
                        double early_exit) {
    const double v_lo = lower.back();
    const double v_hi = upper.back();
    // Unconstrained each-cell optimum is mass w, i.e. endpoint K*w = 1;
    // usually optimal or nearly so, so probe it first for the early exit.
    const double v_ideal = std::clamp(1.0, v_lo, v_hi);
    double best = band_path_cost(lower, upper, v_ideal, w);
    if (best <= early_exit) return best;
    // cost is convex in the endpoint: golden-section over [v_lo, v_hi]
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = v_lo, b = v_hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = band_path_cost(lower, upper, x1, w);
    double f2 = band_path_cost(lower, upper, x2, w);
    best = std::min(best, std::min(f1, f2));
    for (int it = 0; it < 120 && b - a > 1e-11 * (1.0 + b); ++it) {
        if (best <= early_exit) return best;
        if (f1 < f2) {
            b = x2;
            x2 = x1; f2 = f1;
            x1 = b - gr * (b - a);
            f1 = band_path_cost(lower, upper, x1, w);
        } else {
            a = x1;
            x1 = x2; f1 = f2;
            x2 = a + gr * (b - a);
            f2 = band_path_cost(lower, upper, x2, w);
        }
        best = std::min(best, std::min(f1, f2));
    }
    return best;
}

double band_min_rate_nd(const GridFunction& gf, double t) {
    const auto& grid = gf.grid();
    const double w = grid.cell_volume();
    const std::int64_t cells = grid.cell_count();
    const std::int64_t per_axis = grid.cells_per_axis();
    const auto target_prefix = inclusive_prefix_sums(grid, gf.masses());

    std::vector<double> lower(target_prefix.size()), upper(target_prefix.size());
    for (std::size_t i = 0; i < target_prefix.size(); ++i) {
        lower[i] = std::max(0.0, target_prefix[i] - t);
        upper[i] = target_prefix[i] + t;
    }

    // decode cell index -> multi-index once
    const auto covers = [&](std::int64_t corner_lin, std::int64_t cell_lin) {
        // corner c (1-based block corner) covers cell j iff j < c on every axis,
        // i.e. componentwise cell coord <= corner coord (both decoded base per_axis)
        for (int a = 0; a < grid.d; ++a) {
            const std::int64_t cc = corner_lin % per_axis;
            const std::int64_t jc = cell_lin % per_axis;
            if (jc > cc) return false;
            corner_lin /= per_axis;
            cell_lin /= per_axis;
        }
        return true;
    };

    std::vector<double> x(gf.masses());
    std::vector<double> prefix = inclusive_prefix_sums(grid, x);

    auto objective = [&]() {
        double s = 0.0;
        for (double m : x) s += w * chernoff_h(m / w);
        return s;
    };
    auto rebuild_prefix = [&]() { prefix = inclusive_prefix_sums(grid, x); };

    const double phi_min_arg = w;  // h(mass/w) minimized at mass = w
    double prev_obj = objective();
    for (int pass = 0; pass < 500; ++pass) {
        // exact single-coordinate minimization
        for (std::int64_t j = 0; j < cells; ++j) {
            double lo = 0.0, hi = std::numeric_limits<double>::infinity();
            for (std::int64_t c = 0; c < cells; ++c) {
                if (!covers(c, j)) continue;
                const double cur = prefix[static_cast<std::size_t>(c)];
                lo = std::max(lo, x[static_cast<std::size_t>(j)] + lower[static_cast<std::size_t>(c)] - cur);
                hi = std::min(hi, x[static_cast<std::size_t>(j)] + upper[static_cast<std::size_t>(c)] - cur);
            }
            if (lo > hi) continue;  // rounding pinch; keep current value
            const double xn = std::clamp(phi_min_arg, lo, hi);
            const double delta = xn - x[static_cast<std::size_t>(j)];
            if (delta != 0.0) {
                x[static_cast<std::size_t>(j)] = xn;
                for (std::int64_t c = 0; c < cells; ++c) {
                    if (covers(c, j)) prefix[static_cast<std::size_t>(c)] += delta;
                }
            }
        }
        // pairwise transfers fix the stall mode of plain coordinate descent
        // on active cumulative constraints
        for (std::int64_t i = 0; i < cells; ++i) {
            for (std::int64_t j = i + 1; j < cells; ++j) {
                double d_lo = -x[static_cast<std::size_t>(i)];
                double d_hi = x[static_cast<std::size_t>(j)];
                for (std::int64_t c = 0; c < cells; ++c) {
                    const bool ci = covers(c, i), cj = covers(c, j);
                    if (ci == cj) continue;
                    const double cur = prefix[static_cast<std::size_t>(c)];
                    if (ci) {
                        // moving +delta from j to i raises this prefix
                        d_hi = std::min(d_hi, upper[static_cast<std::size_t>(c)] - cur);
                        d_lo = std::max(d_lo, lower[static_cast<std::size_t>(c)] - cur);
                    } else {
                        d_hi = std::min(d_hi, cur - lower[static_cast<std::size_t>(c)]);
                        d_lo = std::max(d_lo, cur - upper[static_cast<std::size_t>(c)]);
                    }
                }
                if (d_lo > d_hi) continue;
                // phi(x_i + delta) + phi(x_j - delta) minimized at equal masses
                const double delta =
                    std::clamp(0.5 * (x[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(i)]),
                               d_lo, d_hi);
                if (delta == 0.0) continue;
                x[static_cast<std::size_t>(i)] += delta;
                x[static_cast<std::size_t>(j)] -= delta;
                for (std::int64_t c = 0; c < cells; ++c) {
                    const bool ci = covers(c, i), cj = covers(c, j);
                    if (ci != cj) prefix[static_cast<std::size_t>(c)] += ci ? delta : -delta;
                }
            }
        }
        rebuild_prefix();  // shed accumulated float drift
        const double obj = objective();
        if (prev_obj - obj < 1e-9) return obj;
        prev_obj = obj;
    }
    return prev_obj;
}

} // namespace detail

namespace {

bool feasible_within(const GridFunction& gf, const RateBudget& budget, double t,
                     const std::vector<double>& prefix) {
    const auto& grid = gf.grid();
    const double w = grid.cell_volume();
    if (grid.d == 1) {
        std::vector<double> lower(prefix.size()), upper(prefix.size());
        for (std::size_t i = 0; i < prefix.size(); ++i) {
            lower[i] = std::max(0.0, prefix[i] - t);
            upper[i] = prefix[i] + t;
        }
        return detail::band_min_rate_1d(lower, upper, w, budget.inverse()) <=
               budget.inverse() + 1e-12;
    }
    return detail::band_min_rate_nd(gf, t) <= budget.inverse() + 1e-12;
}

} // namespace

bool gamma_reachable_within(const GridFunction& gf, const RateBudget& budget, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("gamma_reachable_within: t must be >= 0");
    if (gamma_contains(gf, budget)) return true;
    const auto prefix = inclusive_prefix_sums(gf.grid(), gf.masses());
    return feasible_within(gf, budget, t, prefix);
}

double dist_to_gamma(const GridFunction& gf, const RateBudget& budget, double tol) {
    if (!(tol >= 1e-6)) {
        throw std::invalid_argument("dist_to_gamma: tol must be >= 1e-6");
    }
    if (gamma_contains(gf, budget)) return 0.0;

    const auto prefix = inclusive_prefix_sums(gf.grid(), gf.masses());

    // The identity grid function has I_p = 0, so it is always in Gamma_a;
    // its distance caps the bracket (also capped by total mass + 1).
    double t_hi = std::min(sup_norm_dist(gf, identity_grid_function(gf.grid())),
                           gf.total_mass() + 1.0);
    if (!feasible_within(gf, budget, t_hi, prefix)) {
        // cannot happen mathematically; guard against solver failure
        throw ProjectionError("dist_to_gamma: bracket cap infeasible", 0.0, t_hi);
    }
    double t_lo = 0.0;
    int iter = 0;
    const int cap = 200;
    while (t_hi - t_lo > tol) {
        if (++iter > cap) {
            throw ProjectionError("dist_to_gamma: no convergence within iteration cap", t_lo, t_hi);
        }
        const double mid = 0.5 * (t_lo + t_hi);
        if (feasible_within(gf, budget, mid, prefix)) {
            t_hi = mid;
        } else {
            t_lo = mid;
        }
    }
    return t_hi;
}

} // namespace erinc
