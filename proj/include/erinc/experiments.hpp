#pragma once

// Config-driven experiment runners behind the CLI: limit-law statistics,
// ULDP slope regression, product-rate additivity, the poissonization factor
// check, oscillation decay and the KDE non-consistency demonstration.
//
// Reproducibility contract: every Monte Carlo task derives its stream as a
// pure function of (master_seed, global replicate index, center tag), rows
// are stored slot-addressed and merged in a fixed order, so identical
// config+seed give byte-identical output for any worker count.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "erinc/grid.hpp"
#include "erinc/increments.hpp"
#include "erinc/kde.hpp"
#include "erinc/models.hpp"
#include "erinc/output.hpp"
#include "erinc/random.hpp"
#include "erinc/schedule.hpp"

namespace erinc {

// exit code 2
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// exit code 3
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct TargetSpec {
    enum class Kind { zero, linear, file };
    Kind kind = Kind::zero;
    double slope = 1.0;     // linear
    std::string path;       // file

    // Realization on a concrete grid; a file target must match (d, p).
    GridFunction build(int d, int p) const;
};

struct ExperimentConfig {
    std::string experiment;          // limit_law | uldp_slope | product_rate |
                                     // poissonization | oscillation | kde_gap
    std::string mode = "sup_inf";    // limit_law only: sup_inf | inf_target
    std::string model_id = "uniform";
    int d = 1;
    double c = 1.0;
    std::vector<std::int64_t> n_ladder;
    int p = 4;
    int p_eval = 6;                  // oscillation fine resolution
    Box H;
    double delta = 1.0;
    std::int64_t replicates = 1;
    std::uint64_t master_seed = 0;
    double projection_tol = 1e-4;
    TargetSpec target;
    double eps_ball = 0.1;
    double threshold1 = 1.0;         // product_rate cell thresholds
    double threshold2 = 1.0;
    double tau = 0.5;                // oscillation level
    std::vector<int> p_ladder;       // oscillation coarse resolutions
    std::string kernel = "uniform";
    std::int64_t batches = 50;       // poissonization
    std::int64_t batch_size = 400;
    std::vector<double> center;      // single-window experiments; default: H midpoint

    DensityModel model() const { return DensityModel::by_id(model_id, d); }
    BandwidthSchedule schedule() const { return BandwidthSchedule(c); }
    std::vector<double> window_center() const;  // config center or H midpoint
};

// Parses and validates; unknown keys (including inside nested objects) are
// ConfigErrors, as are all semantic violations (ladder not increasing, H not
// inside the support with the window margin, bad target, ...).
ExperimentConfig load_config(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);

// eps_{n,i} = 1/(c f(z_i) log n) over the packing centers for this config.
std::vector<double> normalization_scales(const ExperimentConfig& cfg, std::int64_t n);

Table run_limit_law(const ExperimentConfig& cfg, int workers);
Table run_uldp_slope(const ExperimentConfig& cfg, int workers);
Table run_product_rate_check(const ExperimentConfig& cfg, int workers);
Table run_poissonization_check(const ExperimentConfig& cfg, int workers);
Table run_oscillation_decay(const ExperimentConfig& cfg, int workers);
Table run_kde_gap(const ExperimentConfig& cfg, int workers);

// dispatch on cfg.experiment
Table run_experiment(const ExperimentConfig& cfg, int workers);

} // namespace erinc
