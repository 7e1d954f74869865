#include "erinc/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "erinc/chernoff.hpp"
#include "erinc/rate.hpp"

namespace erinc {

// ---------------------------------------------------------------------------
// target realization

GridFunction TargetSpec::build(int d, int p) const {
    const auto grid = make_grid(d, p);
    switch (kind) {
        case Kind::zero:
            return GridFunction(grid, std::vector<double>(
                                          static_cast<std::size_t>(grid.cell_count()), 0.0));
        case Kind::linear: {
            const double s = slope;
            return discretize(
                [s, d](std::span<const double> pt) {
                    double prod = 1.0;
                    for (int a = 0; a < d; ++a) prod *= pt[static_cast<std::size_t>(a)];
                    return s * prod;
                },
                grid);
        }
        case Kind::file: {
            std::ifstream f(path);
            if (!f) throw ConfigError("target file not readable: " + path);
            nlohmann::json j;
            f >> j;
            auto gf = GridFunction::from_json(j);
            if (!(gf.grid() == grid)) {
                throw ConfigError("target grid does not match the experiment's (d, p)");
            }
            return gf;
        }
    }
    throw ConfigError("unreachable target kind");
}

// ---------------------------------------------------------------------------
// config parsing

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
        }
    }
}

Box parse_box(const nlohmann::json& j, int d) {
    check_keys(j, {"lo", "hi"}, "H");
    Box box;
    box.lo = j.at("lo").get<std::vector<double>>();
    box.hi = j.at("hi").get<std::vector<double>>();
    if (box.dim() != d || static_cast<int>(box.hi.size()) != d) {
        throw ConfigError("H dimensions do not match d");
    }
    for (int a = 0; a < d; ++a) {
        if (!(box.lo[static_cast<std::size_t>(a)] < box.hi[static_cast<std::size_t>(a)])) {
            throw ConfigError("H must have lo < hi on every axis");
        }
    }
    return box;
}

TargetSpec parse_target(const nlohmann::json& j) {
    check_keys(j, {"type", "slope", "path"}, "target");
    TargetSpec t;
    const auto type = j.at("type").get<std::string>();
    if (type == "zero") {
        t.kind = TargetSpec::Kind::zero;
    } else if (type == "linear") {
        t.kind = TargetSpec::Kind::linear;
        t.slope = j.at("slope").get<double>();
        if (!(t.slope >= 0.0)) throw ConfigError("target slope must be >= 0");
    } else if (type == "file") {
        t.kind = TargetSpec::Kind::file;
        t.path = j.at("path").get<std::string>();
    } else {
        throw ConfigError("target type must be zero|linear|file");
    }
    return t;
}

const std::set<std::string> kExperiments = {"limit_law",      "uldp_slope", "product_rate",
                                            "poissonization", "oscillation", "kde_gap"};

bool needs_layout(const std::string& e) {
    return e == "limit_law" || e == "poissonization" || e == "kde_gap";
}

bool needs_center(const std::string& e) {
    return e == "uldp_slope" || e == "product_rate" || e == "oscillation";
}

} // namespace

std::vector<double> ExperimentConfig::window_center() const {
    if (!center.empty()) return center;
    std::vector<double> mid(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        const auto ai = static_cast<std::size_t>(a);
        mid[ai] = 0.5 * (H.lo[ai] + H.hi[ai]);
    }
    return mid;
}

ExperimentConfig load_config(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    check_keys(j,
               {"experiment", "mode", "model", "d", "c", "n_ladder", "p", "p_eval", "H", "delta",
                "replicates", "master_seed", "projection_tol", "target", "eps_ball", "thresholds",
                "tau", "p_ladder", "kernel", "batches", "batch_size", "center"},
               "config");

    ExperimentConfig cfg;
    try {
        cfg.experiment = j.at("experiment").get<std::string>();
        if (!kExperiments.count(cfg.experiment)) {
            throw ConfigError("unknown experiment kind '" + cfg.experiment + "'");
        }
        if (j.contains("mode")) cfg.mode = j.at("mode").get<std::string>();
        if (j.contains("model")) cfg.model_id = j.at("model").get<std::string>();
        if (j.contains("d")) cfg.d = j.at("d").get<int>();
        cfg.c = j.at("c").get<double>();
        cfg.n_ladder = j.at("n_ladder").get<std::vector<std::int64_t>>();
        if (j.contains("p")) cfg.p = j.at("p").get<int>();
        if (j.contains("p_eval")) cfg.p_eval = j.at("p_eval").get<int>();
        if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
        if (j.contains("replicates")) cfg.replicates = j.at("replicates").get<std::int64_t>();
        if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("projection_tol")) cfg.projection_tol = j.at("projection_tol").get<double>();
        if (j.contains("target")) cfg.target = parse_target(j.at("target"));
        if (j.contains("eps_ball")) cfg.eps_ball = j.at("eps_ball").get<double>();
        if (j.contains("thresholds")) {
            const auto th = j.at("thresholds").get<std::vector<double>>();
            if (th.size() != 2) throw ConfigError("thresholds must be [a1, a2]");
            cfg.threshold1 = th[0];
            cfg.threshold2 = th[1];
        }
        if (j.contains("tau")) cfg.tau = j.at("tau").get<double>();
        if (j.contains("p_ladder")) cfg.p_ladder = j.at("p_ladder").get<std::vector<int>>();
        if (j.contains("kernel")) cfg.kernel = j.at("kernel").get<std::string>();
        if (j.contains("batches")) cfg.batches = j.at("batches").get<std::int64_t>();
        if (j.contains("batch_size")) cfg.batch_size = j.at("batch_size").get<std::int64_t>();
        if (j.contains("center")) cfg.center = j.at("center").get<std::vector<double>>();
        if (j.contains("H")) cfg.H = parse_box(j.at("H"), cfg.d);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    // --- semantic validation ---
    const auto model = [&]() {
        try {
            return cfg.model();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }();
    if (!(cfg.c > 0.0)) throw ConfigError("c must be > 0");
    const BandwidthSchedule sched(cfg.c);
    if (cfg.n_ladder.empty()) throw ConfigError("n_ladder must be nonempty");
    for (std::size_t i = 0; i < cfg.n_ladder.size(); ++i) {
        if (cfg.n_ladder[i] < sched.n_min()) {
            throw ConfigError("n_ladder entries must be >= the schedule's n_min");
        }
        if (i > 0 && cfg.n_ladder[i] <= cfg.n_ladder[i - 1]) {
            throw ConfigError("n_ladder must be strictly increasing");
        }
    }
    if (cfg.replicates < 1) throw ConfigError("replicates must be >= 1");
    if (!(cfg.projection_tol >= 1e-6)) throw ConfigError("projection_tol must be >= 1e-6");
    try {
        (void)make_grid(cfg.d, cfg.p);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("grid resolution p: ") + e.what());
    }

    const double h_max = sched.bandwidth(cfg.n_ladder.front());
    const double edge_max =
        std::pow(std::max(1.0, cfg.delta) * h_max, 1.0 / static_cast<double>(cfg.d));

    if (needs_layout(cfg.experiment) || (needs_center(cfg.experiment) && cfg.center.empty())) {
        if (cfg.H.dim() == 0) throw ConfigError(cfg.experiment + " requires H");
        // H must sit strictly inside the support with margin >= window edge
        if (!model.support().contains_box(cfg.H, edge_max)) {
            throw ConfigError("H must lie inside the model support with margin >= window edge");
        }
    }
    if (needs_center(cfg.experiment)) {
        const auto z0 = cfg.window_center();
        if (static_cast<int>(z0.size()) != cfg.d) throw ConfigError("center dimension mismatch");
        for (int a = 0; a < cfg.d; ++a) {
            const auto ai = static_cast<std::size_t>(a);
            if (!(z0[ai] >= model.support().lo[ai] &&
                  z0[ai] + edge_max <= model.support().hi[ai])) {
                throw ConfigError("center window escapes the model support at the smallest n");
            }
        }
    }

    if (cfg.experiment == "limit_law") {
        if (cfg.mode != "sup_inf" && cfg.mode != "inf_target") {
            throw ConfigError("limit_law mode must be sup_inf|inf_target");
        }
        if (cfg.delta != 1.0) throw ConfigError("limit_law uses packing layouts (delta = 1)");
    }
    if (cfg.experiment == "product_rate") {
        if (cfg.d != 1) throw ConfigError("product_rate is a d=1, p=1 experiment");
        if (cfg.p != 1) throw ConfigError("product_rate requires p = 1 (two disjoint cells)");
        // asymptotic p=1 cell mean of the increment is the cell volume 1/2
        if (!(cfg.threshold1 > 0.5 && cfg.threshold2 > 0.5)) {
            throw ConfigError("product_rate thresholds must exceed the cell mean 0.5");
        }
    }
    if (cfg.experiment == "uldp_slope" || cfg.experiment == "poissonization") {
        if (!(cfg.eps_ball > 0.0)) throw ConfigError("eps_ball must be > 0");
    }
    if (cfg.experiment == "oscillation") {
        if (cfg.p_ladder.empty()) throw ConfigError("oscillation requires p_ladder");
        for (std::size_t i = 0; i < cfg.p_ladder.size(); ++i) {
            if (cfg.p_ladder[i] < 0 || cfg.p_ladder[i] >= cfg.p_eval) {
                throw ConfigError("p_ladder entries must satisfy 0 <= p < p_eval");
            }
            if (i > 0 && cfg.p_ladder[i] <= cfg.p_ladder[i - 1]) {
                throw ConfigError("p_ladder must be strictly increasing");
            }
        }
        try {
            (void)make_grid(cfg.d, cfg.p_eval);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("p_eval: ") + e.what());
        }
        if (!(cfg.tau >= 0.0)) throw ConfigError("tau must be >= 0");
    }
    if (cfg.experiment == "kde_gap") {
        (void)Kernel::by_id(cfg.kernel);  // validates
        if (cfg.delta != 1.0) throw ConfigError("kde_gap uses packing layouts (delta = 1)");
    }
    if (cfg.experiment == "poissonization") {
        if (cfg.batches < 1 || cfg.batch_size < 1) {
            throw ConfigError("poissonization requires batches >= 1 and batch_size >= 1");
        }
    }

    // NormalizationScale invariant: max_i eps_{n,i} strictly decreasing along
    // the ladder (layout-based experiments).
    if (needs_layout(cfg.experiment) && cfg.n_ladder.size() > 1) {
        double prev = std::numeric_limits<double>::infinity();
        for (const auto n : cfg.n_ladder) {
            const auto eps = normalization_scales(cfg, n);
            const double worst = *std::max_element(eps.begin(), eps.end());
            if (!(worst < prev)) {
                throw ConfigError("normalization scales are not strictly decreasing in n");
            }
            prev = worst;
        }
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config JSON parse error: ") + e.what());
    }
    return load_config(j);
}

std::vector<double> normalization_scales(const ExperimentConfig& cfg, std::int64_t n) {
    const auto model = cfg.model();
    const auto sched = cfg.schedule();
    const auto layout = center_layout(cfg.H, sched, n, LayoutMode::packing, 1.0);
    const double log_n = std::log(static_cast<double>(n));
    std::vector<double> eps(static_cast<std::size_t>(layout.count));
    for (std::int64_t i = 0; i < layout.count; ++i) {
        eps[static_cast<std::size_t>(i)] = 1.0 / (cfg.c * model.density(layout.center(i)) * log_n);
    }
    return eps;
}

// ---------------------------------------------------------------------------
// shared fast paths

namespace {

// d=1 increment cell masses from a sorted coordinate array
void increment_masses_1d(const std::vector<double>& sorted, double z, double edge,
                         double inv_norm, std::int64_t per_axis, std::vector<double>& masses) {
    std::fill(masses.begin(), masses.end(), 0.0);
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), z);
    const auto hi = std::lower_bound(lo, sorted.end(), z + edge);
    for (auto it = lo; it != hi; ++it) {
        const double u = (*it - z) / edge;
        auto cell = static_cast<std::int64_t>(u * static_cast<double>(per_axis));
        if (cell >= per_axis) cell = per_axis - 1;  // guard the u -> 1 rounding edge
        if (cell < 0) cell = 0;
        masses[static_cast<std::size_t>(cell)] += inv_norm;
    }
}

// sup over extended corners of |cumulative difference|, d=1 flat buffers
double sup_dist_masses_1d(const std::vector<double>& a, const std::vector<double>& b) {
    double run = 0.0, best = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        run += a[k] - b[k];
        best = std::max(best, std::abs(run));
    }
    return best;
}

// Poissonized increment of the d=1 models without per-replicate allocation:
// draws eta ~ Poisson(n), then eta points, keeping only the window hits.
// Identical in law and in stream consumption to poissonized_increment.
void draw_poissonized_masses_1d(const DensityModel& model, std::int64_t n, double z,
                                double h_n, double c, double f_z, std::int64_t per_axis,
                                SplitMix64& rng, std::vector<double>& masses) {
    std::fill(masses.begin(), masses.end(), 0.0);
    const std::int64_t eta = poisson_variate(static_cast<double>(n), rng);
    const double inv_norm = 1.0 / (c * f_z * std::log(static_cast<double>(n)));
    const bool is_uniform = model.kind() == DensityModel::Kind::uniform;
    for (std::int64_t j = 0; j < eta; ++j) {
        const double u = rng.uniform();
        const double x = is_uniform ? u : model.inv_cdf1(0, u);
        const double rel = (x - z) / h_n;  // d=1: edge = h_n
        if (rel >= 0.0 && rel < 1.0) {
            auto cell = static_cast<std::int64_t>(rel * static_cast<double>(per_axis));
            if (cell >= per_axis) cell = per_axis - 1;
            masses[static_cast<std::size_t>(cell)] += inv_norm;
        }
    }
}

struct LadderLayout {
    std::int64_t n = 0;
    double h_n = 0.0;
    double edge = 0.0;
    double log_n = 0.0;
    CenterLayout layout;
    std::vector<double> f_z;
    double max_eps = 0.0;
};

LadderLayout make_ladder_layout(const ExperimentConfig& cfg, const DensityModel& model,
                                const BandwidthSchedule& sched, std::int64_t n,
                                LayoutMode mode, double delta) {
    LadderLayout ctx;
    ctx.n = n;
    ctx.h_n = sched.bandwidth(n);
    ctx.log_n = std::log(static_cast<double>(n));
    ctx.layout = center_layout(cfg.H, sched, n, mode, delta);
    ctx.edge = ctx.layout.window_edge;
    ctx.f_z.resize(static_cast<std::size_t>(ctx.layout.count));
    double max_eps = 0.0;
    for (std::int64_t i = 0; i < ctx.layout.count; ++i) {
        const double f = model.density(ctx.layout.center(i));
        ctx.f_z[static_cast<std::size_t>(i)] = f;
        max_eps = std::max(max_eps, 1.0 / (cfg.c * f * ctx.log_n));
    }
    ctx.max_eps = max_eps;
    return ctx;
}

std::vector<double> sorted_coords_1d(const std::vector<double>& points) {
    std::vector<double> xs(points);
    std::sort(xs.begin(), xs.end());
    return xs;
}

} // namespace

// ---------------------------------------------------------------------------
// limit-law statistics: sup-inf and inf-target distances over packing centers

Table run_limit_law(const ExperimentConfig& cfg, int workers) {
    const auto model = cfg.model();
    const auto sched = cfg.schedule();
    const auto grid = make_grid(cfg.d, cfg.p);
    const bool sup_inf = cfg.mode == "sup_inf";
    const SeedSpec seeds{cfg.master_seed};
    const std::int64_t R = cfg.replicates;

    std::vector<LadderLayout> ladder;
    ladder.reserve(cfg.n_ladder.size());
    for (const auto n : cfg.n_ladder) {
        ladder.push_back(make_ladder_layout(cfg, model, sched, n, LayoutMode::packing, 1.0));
    }

    std::optional<GridFunction> target;
    if (!sup_inf) {
        target = cfg.target.build(cfg.d, cfg.p);
        // the target must fit the weakest budget over H
        double min_f = std::numeric_limits<double>::infinity();
        for (double f : ladder.back().f_z) min_f = std::min(min_f, f);
        if (!gamma_contains(*target, RateBudget(cfg.c * min_f))) {
            throw ConfigError("inf_target: target lies outside Gamma_{c f(z)} for every z in H");
        }
    }

    const std::int64_t tasks = static_cast<std::int64_t>(ladder.size()) * R;
    std::vector<double> values(static_cast<std::size_t>(tasks), 0.0);
    std::vector<double> osc_corrs(static_cast<std::size_t>(tasks), 0.0);
    std::vector<std::uint64_t> row_seeds(static_cast<std::size_t>(tasks), 0);

    run_parallel(tasks, workers, [&](std::int64_t task) {
        const auto ni = static_cast<std::size_t>(task / R);
        const auto& ctx = ladder[ni];
        auto rng = seeds.stream(static_cast<std::uint64_t>(task), 0);
        row_seeds[static_cast<std::size_t>(task)] =
            seeds.stream_seed(static_cast<std::uint64_t>(task), 0);
        const auto points = model.sample(ctx.n, rng);

        std::vector<double> masses(static_cast<std::size_t>(grid.cell_count()));
        double value = sup_inf ? 0.0 : std::numeric_limits<double>::infinity();
        // corner sups under-estimate the true sup by at most the largest
        // within-cell oscillation; report that correction alongside
        double osc_corr = 0.0;

        if (cfg.d == 1) {
            const auto xs = sorted_coords_1d(points);
            const std::int64_t per_axis = grid.cells_per_axis();
            for (std::int64_t i = 0; i < ctx.layout.count; ++i) {
                const double z = ctx.layout.center(i)[0];
                const double f = ctx.f_z[static_cast<std::size_t>(i)];
                increment_masses_1d(xs, z, ctx.edge, 1.0 / (cfg.c * f * ctx.log_n), per_axis,
                                    masses);
                for (double m : masses) osc_corr = std::max(osc_corr, m);
                const GridFunction gf(grid, masses);
                if (sup_inf) {
                    const RateBudget budget(cfg.c * f);
                    if (value > 0.0 && gamma_reachable_within(gf, budget, value)) {
                        continue;  // this center cannot raise the max
                    }
                    value = std::max(value, dist_to_gamma(gf, budget, cfg.projection_tol));
                } else {
                    value = std::min(value, sup_norm_dist(gf, *target));
                }
            }
        } else {
            for (std::int64_t i = 0; i < ctx.layout.count; ++i) {
                const auto z = ctx.layout.center(i);
                const double f = ctx.f_z[static_cast<std::size_t>(i)];
                const auto sample = increment_process(points, cfg.d, z, ctx.h_n, cfg.c, f, ctx.n,
                                                      model.support());
                const auto gf = sample.to_grid(cfg.p);
                for (double m : gf.masses()) osc_corr = std::max(osc_corr, m);
                if (sup_inf) {
                    const RateBudget budget(cfg.c * f);
                    if (value > 0.0 && gamma_reachable_within(gf, budget, value)) continue;
                    value = std::max(value, dist_to_gamma(gf, budget, cfg.projection_tol));
                } else {
                    value = std::min(value, sup_norm_dist(gf, *target));
                }
            }
        }
        values[static_cast<std::size_t>(task)] = value;
        osc_corrs[static_cast<std::size_t>(task)] = osc_corr;
    });

    Table table;
    table.columns = {"n", "seed", "statistic", "centers", "max_eps", "value", "osc_corr"};
    for (std::int64_t task = 0; task < tasks; ++task) {
        const auto ni = static_cast<std::size_t>(task / R);
        table.add_row({ladder[ni].n, row_seeds[static_cast<std::size_t>(task)],
                       std::string(sup_inf ? "sup_inf" : "inf_target"), ladder[ni].layout.count,
                       ladder[ni].max_eps, values[static_cast<std::size_t>(task)],
                       osc_corrs[static_cast<std::size_t>(task)]});
    }
    return table;
}

// ---------------------------------------------------------------------------
// uniform large-deviation slope of ball-hitting probabilities

Table run_uldp_slope(const ExperimentConfig& cfg, int workers) {
    const auto model = cfg.model();
    const auto sched = cfg.schedule();
    const auto grid = make_grid(cfg.d, cfg.p);
    const auto target = cfg.target.build(cfg.d, cfg.p);
    const auto z0 = cfg.window_center();
    const SeedSpec seeds{cfg.master_seed};
    const std::int64_t R = cfg.replicates;
    const std::int64_t L = static_cast<std::int64_t>(cfg.n_ladder.size());

    constexpr std::int64_t kChunk = 4096;
    const std::int64_t chunks_per_n = (R + kChunk - 1) / kChunk;
    const std::int64_t tasks = L * chunks_per_n;
    std::vector<std::int64_t> chunk_successes(static_cast<std::size_t>(tasks), 0);

    run_parallel(tasks, workers, [&](std::int64_t task) {
        const std::int64_t ni = task / chunks_per_n;
        const std::int64_t chunk = task % chunks_per_n;
        const std::int64_t n = cfg.n_ladder[static_cast<std::size_t>(ni)];
        const double h_n = sched.bandwidth(n);
        const double f_z = model.density(z0);
        const std::int64_t r_lo = chunk * kChunk;
        const std::int64_t r_hi = std::min(R, r_lo + kChunk);
        std::int64_t hits = 0;

        if (cfg.d == 1) {
            std::vector<double> masses(static_cast<std::size_t>(grid.cell_count()));
            const std::int64_t per_axis = grid.cells_per_axis();
            for (std::int64_t r = r_lo; r < r_hi; ++r) {
                auto rng = seeds.stream(static_cast<std::uint64_t>(ni * R + r), 0);
                draw_poissonized_masses_1d(model, n, z0[0], h_n, cfg.c, f_z, per_axis, rng,
                                           masses);
                if (sup_dist_masses_1d(masses, target.masses()) < cfg.eps_ball) ++hits;
            }
        } else {
            for (std::int64_t r = r_lo; r < r_hi; ++r) {
                auto rng = seeds.stream(static_cast<std::uint64_t>(ni * R + r), 0);
                const auto sample = poissonized_increment(model, n, z0, sched, rng);
                if (sup_norm_dist(sample.to_grid(cfg.p), target) < cfg.eps_ball) ++hits;
            }
        }
        chunk_successes[static_cast<std::size_t>(task)] = hits;
    });

    Table table;
    table.columns = {"kind",      "n",      "replicates", "successes",    "p_hat",
                     "wilson_lo", "wilson_hi", "dropped", "slope",        "intercept",
                     "residual_rms", "points_used"};
    std::vector<double> xs, ys;
    for (std::int64_t ni = 0; ni < L; ++ni) {
        std::int64_t successes = 0;
        for (std::int64_t chunk = 0; chunk < chunks_per_n; ++chunk) {
            successes += chunk_successes[static_cast<std::size_t>(ni * chunks_per_n + chunk)];
        }
        const std::int64_t n = cfg.n_ladder[static_cast<std::size_t>(ni)];
        const double p_hat = static_cast<double>(successes) / static_cast<double>(R);
        const auto [lo, hi] = wilson_interval(successes, R);
        const bool dropped = successes == 0;
        if (!dropped) {
            xs.push_back(std::log(static_cast<double>(n)));
            ys.push_back(std::log(p_hat));
        }
        table.add_row({std::string("point"), n, R, successes, p_hat, lo, hi, dropped,
                       std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{}});
    }
    if (xs.size() >= 2) {
        const auto fit = fit_line(xs, ys);
        table.add_row({std::string("fit"), std::monostate{}, std::monostate{}, std::monostate{},
                       std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                       fit.slope, fit.intercept, fit.residual_rms, fit.points});
    } else {
        table.add_row({std::string("fit"), std::monostate{}, std::monostate{}, std::monostate{},
                       std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                       std::monostate{}, std::monostate{}, std::monostate{},
                       static_cast<std::int64_t>(xs.size())});
    }
    return table;
}

// ---------------------------------------------------------------------------
// product-rate additivity: joint vs marginal slopes on two disjoint p=1 cells

Table run_product_rate_check(const ExperimentConfig& cfg, int workers) {
    const auto model = cfg.model();
    const auto sched = cfg.schedule();
    const auto z0 = cfg.window_center();
    const SeedSpec seeds{cfg.master_seed};
    const std::int64_t R = cfg.replicates;
    const std::int64_t L = static_cast<std::int64_t>(cfg.n_ladder.size());

    constexpr std::int64_t kChunk = 4096;
    const std::int64_t chunks_per_n = (R + kChunk - 1) / kChunk;
    const std::int64_t tasks = L * chunks_per_n;
    // 2x2 table per chunk: [m1&m2, m1 only, m2 only, neither]
    std::vector<std::array<std::int64_t, 4>> counts(static_cast<std::size_t>(tasks),
                                                    {0, 0, 0, 0});

    run_parallel(tasks, workers, [&](std::int64_t task) {
        const std::int64_t ni = task / chunks_per_n;
        const std::int64_t chunk = task % chunks_per_n;
        const std::int64_t n = cfg.n_ladder[static_cast<std::size_t>(ni)];
        const double h_n = sched.bandwidth(n);
        const double f_z = model.density(z0);
        const std::int64_t r_lo = chunk * kChunk;
        const std::int64_t r_hi = std::min(R, r_lo + kChunk);
        std::array<std::int64_t, 4> local{0, 0, 0, 0};
        std::vector<double> masses(2);
        for (std::int64_t r = r_lo; r < r_hi; ++r) {
            auto rng = seeds.stream(static_cast<std::uint64_t>(ni * R + r), 0);
            draw_poissonized_masses_1d(model, n, z0[0], h_n, cfg.c, f_z, 2, rng, masses);
            const bool e1 = masses[0] >= cfg.threshold1;
            const bool e2 = masses[1] >= cfg.threshold2;
            ++local[static_cast<std::size_t>(e1 ? (e2 ? 0 : 1) : (e2 ? 2 : 3))];
        }
        counts[static_cast<std::size_t>(task)] = local;
    });

    Table table;
    table.columns = {"kind", "n",     "replicates", "n11",   "n10",   "n01",   "n00",
                     "p_joint", "joint_lo", "joint_hi", "p_m1", "m1_lo", "m1_hi", "p_m2",
                     "m2_lo", "m2_hi", "indep_gap_sigma", "slope_joint", "slope_m1", "slope_m2",
                     "slope_gap"};

    std::vector<double> xs, y_joint, y_m1, y_m2;
    for (std::int64_t ni = 0; ni < L; ++ni) {
        std::array<std::int64_t, 4> tot{0, 0, 0, 0};
        for (std::int64_t chunk = 0; chunk < chunks_per_n; ++chunk) {
            const auto& local = counts[static_cast<std::size_t>(ni * chunks_per_n + chunk)];
            for (std::size_t q = 0; q < 4; ++q) tot[q] += local[q];
        }
        const std::int64_t n = cfg.n_ladder[static_cast<std::size_t>(ni)];
        const std::int64_t n11 = tot[0], n10 = tot[1], n01 = tot[2], n00 = tot[3];
        const double Rd = static_cast<double>(R);
        const double pj = static_cast<double>(n11) / Rd;
        const double p1 = static_cast<double>(n11 + n10) / Rd;
        const double p2 = static_cast<double>(n11 + n01) / Rd;
        const auto [jlo, jhi] = wilson_interval(n11, R);
        const auto [m1lo, m1hi] = wilson_interval(n11 + n10, R);
        const auto [m2lo, m2hi] = wilson_interval(n11 + n01, R);

        // delta-method sigma for p_joint - p1 p2 from the 2x2 table:
        // V = X - p2 Y - p1 Z with X = 1{both}, Y = 1{e1}, Z = 1{e2}
        const double EV2 = pj * (1.0 - p2 - p1) * (1.0 - p2 - p1) +
                           (p1 - pj) * p2 * p2 + (p2 - pj) * p1 * p1;
        const double EV = pj - 2.0 * p1 * p2;
        const double var_v = std::max(0.0, EV2 - EV * EV);
        const double sigma = std::sqrt(var_v / Rd);
        const double gap = pj - p1 * p2;
        const double gap_sigma = sigma > 0.0 ? gap / sigma : 0.0;

        if (n11 > 0 && n11 + n10 > 0 && n11 + n01 > 0) {
            xs.push_back(std::log(static_cast<double>(n)));
            y_joint.push_back(std::log(pj));
            y_m1.push_back(std::log(p1));
            y_m2.push_back(std::log(p2));
        }
        table.add_row({std::string("point"), n, R, n11, n10, n01, n00, pj, jlo, jhi, p1, m1lo,
                       m1hi, p2, m2lo, m2hi, gap_sigma, std::monostate{}, std::monostate{},
                       std::monostate{}, std::monostate{}});
    }
    if (xs.size() >= 2) {
        const auto fj = fit_line(xs, y_joint);
        const auto f1 = fit_line(xs, y_m1);
        const auto f2 = fit_line(xs, y_m2);
        table.add_row({std::string("fit"), std::monostate{}, std::monostate{}, std::monostate{},
                       std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                       std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                       std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                       std::monostate{}, fj.slope, f1.slope, f2.slope,
                       fj.slope - f1.slope - f2.slope});
    } else {
        table.add_row({std::string("fit"), std::monostate{}, std::monostate{}, std::monostate{},
                       std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                       std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                       std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                       std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{},
                       std::monostate{}});
    }
    return table;
}

// ---------------------------------------------------------------------------
// poissonization factor: P(all windows miss) fixed-n vs twice the Poissonized

Table run_poissonization_check(const ExperimentConfig& cfg, int workers) {
    const auto model = cfg.model();
    const auto sched = cfg.schedule();
    const auto grid = make_grid(cfg.d, cfg.p);
    const auto target = cfg.target.build(cfg.d, cfg.p);
    const SeedSpec seeds{cfg.master_seed};
    const std::int64_t B = cfg.batches;
    const std::int64_t Rb = cfg.batch_size;
    const std::int64_t L = static_cast<std::int64_t>(cfg.n_ladder.size());

    std::vector<LadderLayout> ladder;
    for (const auto n : cfg.n_ladder) {
        ladder.push_back(make_ladder_layout(cfg, model, sched, n, LayoutMode::packing, 1.0));
    }

    const std::int64_t tasks = L * B;
    std::vector<std::int64_t> lhs_hits(static_cast<std::size_t>(tasks), 0);
    std::vector<std::int64_t> rhs_hits(static_cast<std::size_t>(tasks), 0);

    run_parallel(tasks, workers, [&](std::int64_t task) {
        const auto ni = static_cast<std::size_t>(task / B);
        const std::int64_t batch = task % B;
        const auto& ctx = ladder[ni];
        const std::int64_t per_axis = grid.cells_per_axis();
        std::vector<double> masses(static_cast<std::size_t>(grid.cell_count()));

        // all-windows-miss event on a given realized point set
        auto all_miss = [&](const std::vector<double>& pts) {
            if (cfg.d == 1) {
                const auto xs = sorted_coords_1d(pts);
                for (std::int64_t i = 0; i < ctx.layout.count; ++i) {
                    const double z = ctx.layout.center(i)[0];
                    const double f = ctx.f_z[static_cast<std::size_t>(i)];
                    increment_masses_1d(xs, z, ctx.edge, 1.0 / (cfg.c * f * ctx.log_n), per_axis,
                                        masses);
                    if (sup_dist_masses_1d(masses, target.masses()) < cfg.eps_ball) {
                        return false;  // this window landed in the ball
                    }
                }
                return true;
            }
            for (std::int64_t i = 0; i < ctx.layout.count; ++i) {
                const auto z = ctx.layout.center(i);
                const double f = ctx.f_z[static_cast<std::size_t>(i)];
                const auto sample = increment_process(pts, cfg.d, z, ctx.h_n, cfg.c, f, ctx.n,
                                                      model.support());
                if (sup_norm_dist(sample.to_grid(cfg.p), target) < cfg.eps_ball) return false;
            }
            return true;
        };

        std::int64_t lhs = 0, rhs = 0;
        for (std::int64_t r = 0; r < Rb; ++r) {
            const auto rep =
                static_cast<std::uint64_t>((static_cast<std::int64_t>(ni) * B + batch) * Rb + r);
            {
                auto rng = seeds.stream(rep, 0);
                if (all_miss(model.sample(ctx.n, rng))) ++lhs;
            }
            {
                auto rng = seeds.stream(rep, 1);
                const auto eta = poisson_variate(static_cast<double>(ctx.n), rng);
                if (all_miss(model.sample(eta, rng))) ++rhs;
            }
        }
        lhs_hits[static_cast<std::size_t>(task)] = lhs;
        rhs_hits[static_cast<std::size_t>(task)] = rhs;
    });

    Table table;
    table.columns = {"n",      "batch",  "replicates", "lhs",    "lhs_lo", "lhs_hi",
                     "rhs",    "rhs_lo", "rhs_hi",     "two_rhs", "holds"};
    for (std::int64_t task = 0; task < tasks; ++task) {
        const auto ni = static_cast<std::size_t>(task / B);
        const std::int64_t batch = task % B;
        const std::int64_t lh = lhs_hits[static_cast<std::size_t>(task)];
        const std::int64_t rh = rhs_hits[static_cast<std::size_t>(task)];
        const double lhs = static_cast<double>(lh) / static_cast<double>(Rb);
        const double rhs = static_cast<double>(rh) / static_cast<double>(Rb);
        const auto [llo, lhi] = wilson_interval(lh, Rb);
        const auto [rlo, rhi] = wilson_interval(rh, Rb);
        // CI overlap rule: the inequality "holds" unless even the optimistic
        // reading (lhs at its lower CI edge, rhs at its upper) violates it
        const bool holds = llo <= 2.0 * rhi;
        table.add_row({ladder[ni].n, batch, Rb, lhs, llo, lhi, rhs, rlo, rhi, 2.0 * rhs, holds});
    }
    return table;
}

// ---------------------------------------------------------------------------
// oscillation decay (condition-3 style control)

Table run_oscillation_decay(const ExperimentConfig& cfg, int workers) {
    const auto model = cfg.model();
    const auto sched = cfg.schedule();
    const auto fine_grid = make_grid(cfg.d, cfg.p_eval);
    const auto z0 = cfg.window_center();
    const SeedSpec seeds{cfg.master_seed};
    const std::int64_t R = cfg.replicates;
    const std::int64_t L = static_cast<std::int64_t>(cfg.n_ladder.size());
    const std::int64_t P = static_cast<std::int64_t>(cfg.p_ladder.size());

    const std::int64_t tasks = P * L;
    std::vector<std::int64_t> exceed(static_cast<std::size_t>(tasks), 0);

    run_parallel(tasks, workers, [&](std::int64_t task) {
        const auto pi = static_cast<std::size_t>(task / L);
        const auto ni = static_cast<std::size_t>(task % L);
        const int p_coarse = cfg.p_ladder[pi];
        const std::int64_t n = cfg.n_ladder[ni];
        const double h_n = sched.bandwidth(n);
        const double f_z = model.density(z0);
        std::int64_t hits = 0;

        if (cfg.d == 1) {
            std::vector<double> masses(static_cast<std::size_t>(fine_grid.cell_count()));
            const std::int64_t fine_per_axis = fine_grid.cells_per_axis();
            const std::int64_t ratio = fine_per_axis >> p_coarse;
            for (std::int64_t r = 0; r < R; ++r) {
                auto rng = seeds.stream(static_cast<std::uint64_t>(task * R + r), 0);
                draw_poissonized_masses_1d(model, n, z0[0], h_n, cfg.c, f_z, fine_per_axis, rng,
                                           masses);
                double stat = 0.0;
                for (std::int64_t cell = 0; cell < fine_per_axis; cell += ratio) {
                    double block = 0.0;
                    for (std::int64_t q = 0; q < ratio; ++q) {
                        block += masses[static_cast<std::size_t>(cell + q)];
                    }
                    stat = std::max(stat, block);
                }
                if (stat >= cfg.tau) ++hits;
            }
        } else {
            for (std::int64_t r = 0; r < R; ++r) {
                auto rng = seeds.stream(static_cast<std::uint64_t>(task * R + r), 0);
                const auto sample = poissonized_increment(model, n, z0, sched, rng);
                if (oscillation_statistic(sample.to_grid(cfg.p_eval), p_coarse) >= cfg.tau) {
                    ++hits;
                }
            }
        }
        exceed[static_cast<std::size_t>(task)] = hits;
    });

    Table table;
    table.columns = {"p", "n", "replicates", "exceed", "frequency", "tau"};
    for (std::int64_t task = 0; task < tasks; ++task) {
        const auto pi = static_cast<std::size_t>(task / L);
        const auto ni = static_cast<std::size_t>(task % L);
        const std::int64_t hits = exceed[static_cast<std::size_t>(task)];
        table.add_row({static_cast<std::int64_t>(cfg.p_ladder[pi]), cfg.n_ladder[ni], R, hits,
                       static_cast<double>(hits) / static_cast<double>(R), cfg.tau});
    }
    return table;
}

// ---------------------------------------------------------------------------
// KDE non-consistency rows

Table run_kde_gap(const ExperimentConfig& cfg, int workers) {
    const auto model = cfg.model();
    const auto sched = cfg.schedule();
    const auto kernel = Kernel::by_id(cfg.kernel);
    const SeedSpec seeds{cfg.master_seed};
    const std::int64_t R = cfg.replicates;
    const std::int64_t L = static_cast<std::int64_t>(cfg.n_ladder.size());

    std::vector<LadderLayout> ladder;
    for (const auto n : cfg.n_ladder) {
        ladder.push_back(make_ladder_layout(cfg, model, sched, n, LayoutMode::packing, 1.0));
    }

    const std::int64_t tasks = L * R;
    struct Row {
        std::uint64_t seed;
        double sup_err, min_ratio, max_ratio;
    };
    std::vector<Row> rows(static_cast<std::size_t>(tasks));

    run_parallel(tasks, workers, [&](std::int64_t task) {
        const auto ni = static_cast<std::size_t>(task / R);
        const auto& ctx = ladder[ni];
        auto rng = seeds.stream(static_cast<std::uint64_t>(task), 0);
        const auto points = model.sample(ctx.n, rng);
        const double se = sup_error(points, kernel, model, ctx.layout, ctx.h_n, ctx.n);
        const auto [mn, mx] = window_count_extremes(points, ctx.layout, sched, ctx.n, model);
        rows[static_cast<std::size_t>(task)] =
            Row{seeds.stream_seed(static_cast<std::uint64_t>(task), 0), se, mn, mx};
    });

    Table table;
    table.columns = {"seed", "n", "c", "model", "kernel", "sup_error", "min_ratio", "max_ratio"};
    for (std::int64_t task = 0; task < tasks; ++task) {
        const auto ni = static_cast<std::size_t>(task / R);
        const auto& r = rows[static_cast<std::size_t>(task)];
        table.add_row({r.seed, ladder[ni].n, cfg.c, model.id(), kernel.id(), r.sup_err,
                       r.min_ratio, r.max_ratio});
    }
    return table;
}

Table run_experiment(const ExperimentConfig& cfg, int workers) {
    if (cfg.experiment == "limit_law") return run_limit_law(cfg, workers);
    if (cfg.experiment == "uldp_slope") return run_uldp_slope(cfg, workers);
    if (cfg.experiment == "product_rate") return run_product_rate_check(cfg, workers);
    if (cfg.experiment == "poissonization") return run_poissonization_check(cfg, workers);
    if (cfg.experiment == "oscillation") return run_oscillation_decay(cfg, workers);
    if (cfg.experiment == "kde_gap") return run_kde_gap(cfg, workers);
    throw ConfigError("unknown experiment kind '" + cfg.experiment + "'");
}

} // namespace erinc
