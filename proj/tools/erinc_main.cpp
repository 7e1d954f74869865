// erinc: Erdos-Renyi increment laws -- rate functionals, sup-norm projections
// onto Chernoff sublevel sets, and the Monte Carlo experiment suite.

#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "erinc/chernoff.hpp"
#include "erinc/experiments.hpp"
#include "erinc/grid.hpp"
#include "erinc/output.hpp"
#include "erinc/rate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 1;
    bool deterministic = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
    auto* c = cmd->add_option("--config", opts.config_path, "experiment config (JSON)");
    if (config_required) c->required();
    cmd->add_option("--out", opts.out_path, "output path (.csv or .json); stdout when omitted");
    cmd->add_option("--seed", opts.seed, "override the config's master_seed")
        ->each([&opts](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--workers", opts.workers, "worker thread count")->check(CLI::Range(1, 256));
    cmd->add_flag("--deterministic", opts.deterministic,
                  "suppress the timestamp header so identical runs are byte-identical");
}

int run_experiment_command(const CommonOpts& opts, const std::string& expected_kind) {
    auto cfg = erinc::load_config_file(opts.config_path);
    if (cfg.experiment != expected_kind) {
        throw erinc::ConfigError("config experiment is '" + cfg.experiment +
                                 "' but the subcommand expects '" + expected_kind + "'");
    }
    if (opts.seed_set) cfg.master_seed = opts.seed;
    const auto table = erinc::run_experiment(cfg, opts.workers);
    table.emit(opts.out_path, opts.deterministic);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Erdos-Renyi increment laws: rate functionals and experiments"};
    app.require_subcommand(1);

    // rate: I_p / membership / projection distance for a grid-function file
    std::string grid_path;
    double budget_a = 1.0;
    double rate_tol = 1e-4;
    CommonOpts rate_opts;
    auto* rate_cmd = app.add_subcommand("rate", "I_p and distance to Gamma_a for a GridFunction file");
    rate_cmd->add_option("--grid", grid_path, "GridFunction JSON file {d, p, masses}")->required();
    rate_cmd->add_option("--budget", budget_a, "budget a > 0 defining Gamma_a = {I <= 1/a}")
        ->required();
    rate_cmd->add_option("--tol", rate_tol, "projection tolerance (>= 1e-6)");
    rate_cmd->add_option("--out", rate_opts.out_path, "output path (.csv or .json)");
    rate_cmd->add_flag("--deterministic", rate_opts.deterministic, "suppress timestamp header");

    CommonOpts limit_opts, uldp_opts, kde_opts, osc_opts, poi_opts, prod_opts;
    add_common(app.add_subcommand("limit-law", "sup-inf / inf-target limit-law statistics"),
               limit_opts, true);
    add_common(app.add_subcommand("uldp-slope", "large deviation slope of ball probabilities"),
               uldp_opts, true);
    add_common(app.add_subcommand("kde-gap", "KDE sup-error and window occupancy extremes"),
               kde_opts, true);
    add_common(app.add_subcommand("oscillation", "within-cell oscillation exceedance decay"),
               osc_opts, true);
    add_common(app.add_subcommand("poissonization", "fixed-n vs poissonized factor-2 inequality"),
               poi_opts, true);
    add_common(app.add_subcommand("product-rate", "joint vs marginal large-deviation slopes"),
               prod_opts, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (rate_cmd->parsed()) {
            std::ifstream f(grid_path);
            if (!f) throw erinc::ConfigError("cannot open grid file: " + grid_path);
            nlohmann::json j;
            try {
                f >> j;
            } catch (const nlohmann::json::exception& e) {
                throw erinc::ConfigError(std::string("grid JSON parse error: ") + e.what());
            }
            erinc::GridFunction gf = [&]() {
                try {
                    return erinc::GridFunction::from_json(j);
                } catch (const std::invalid_argument& e) {
                    throw erinc::ConfigError(e.what());
                }
            }();
            if (!(budget_a > 0.0)) throw erinc::ConfigError("--budget must be > 0");
            if (!(rate_tol >= 1e-6)) throw erinc::ConfigError("--tol must be >= 1e-6");

            const erinc::RateBudget budget(budget_a);
            erinc::Table table;
            table.columns = {"d", "p", "total_mass", "Ip", "budget_a", "in_gamma", "dist", "tol"};
            const double ip = erinc::rate_Ip(gf);
            const bool inside = erinc::gamma_contains(gf, budget);
            const double dist = erinc::dist_to_gamma(gf, budget, rate_tol);
            table.add_row({static_cast<std::int64_t>(gf.grid().d),
                           static_cast<std::int64_t>(gf.grid().p), gf.total_mass(), ip, budget_a,
                           inside, dist, rate_tol});
            table.emit(rate_opts.out_path, rate_opts.deterministic);
            return kExitOk;
        }
        if (app.get_subcommand("limit-law")->parsed())
            return run_experiment_command(limit_opts, "limit_law");
        if (app.get_subcommand("uldp-slope")->parsed())
            return run_experiment_command(uldp_opts, "uldp_slope");
        if (app.get_subcommand("kde-gap")->parsed())
            return run_experiment_command(kde_opts, "kde_gap");
        if (app.get_subcommand("oscillation")->parsed())
            return run_experiment_command(osc_opts, "oscillation");
        if (app.get_subcommand("poissonization")->parsed())
            return run_experiment_command(poi_opts, "poissonization");
        if (app.get_subcommand("product-rate")->parsed())
            return run_experiment_command(prod_opts, "product_rate");
        std::cerr << "no subcommand selected\n";
        return kExitConfig;
    } catch (const erinc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const erinc::ProjectionError& e) {
        std::cerr << "numerical failure: " << e.what() << " (bracket [" << e.bracket_lo << ", "
                  << e.bracket_hi << "])\n";
        return kExitNumerical;
    } catch (const erinc::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
