#include "erinc/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace erinc {

namespace {

double raw_bandwidth(double c, std::int64_t n) {
    return c * std::log(static_cast<double>(n)) / static_cast<double>(n);
}

} // namespace

BandwidthSchedule::BandwidthSchedule(double c) : c_(c), n_min_(3) {
    if (!(c > 0.0)) throw std::invalid_argument("BandwidthSchedule: c must be > 0");
    while (raw_bandwidth(c_, n_min_) >= 1.0) ++n_min_;
}

BandwidthSchedule::BandwidthSchedule(double c, std::int64_t n_min) : c_(c), n_min_(n_min) {
    if (!(c > 0.0)) throw std::invalid_argument("BandwidthSchedule: c must be > 0");
    if (n_min < 3) throw std::invalid_argument("BandwidthSchedule: n_min must be >= 3");
    if (raw_bandwidth(c_, n_min_) >= 1.0) {
        throw std::invalid_argument("BandwidthSchedule: c log(n_min)/n_min must be < 1");
    }
}

double BandwidthSchedule::bandwidth(std::int64_t n) const {
    if (n < n_min_) throw std::domain_error("BandwidthSchedule: n below n_min");
    return raw_bandwidth(c_, n);
}

std::vector<BlockRow> blocking_subsequence(std::int64_t k_min, std::int64_t k_max) {
    if (k_min < 3) throw std::invalid_argument("blocking_subsequence: k_min must be >= 3");
    if (k_max < k_min) throw std::invalid_argument("blocking_subsequence: k_max < k_min");
    constexpr double kOverflowCap = 2147483648.0;  // 2^31
    std::vector<BlockRow> rows;
    std::int64_t prev_nk = 0;
    for (std::int64_t k = k_min; k <= k_max; ++k) {
        const double kd = static_cast<double>(k);
        const double val = std::exp(kd / std::log(kd));
        if (val > kOverflowCap) break;  // stop with the last safe k
        const auto nk = static_cast<std::int64_t>(std::floor(val));
        BlockRow row;
        row.k = k;
        row.n_k = nk;
        row.block_lo = (k == k_min) ? nk : prev_nk + 1;
        row.block_hi = nk;
        rows.push_back(row);
        prev_nk = nk;
    }
    return rows;
}

BlockRow block_of(const std::vector<BlockRow>& rows, std::int64_t n) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (n >= rows[i].block_lo && n <= rows[i].block_hi) return rows[i];
    }
    throw std::domain_error("block_of: n is not covered by the blocks");
}

} // namespace erinc
