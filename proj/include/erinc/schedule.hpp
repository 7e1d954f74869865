#pragma once

// Erdos-Renyi bandwidths h_n = c log n / n — the canonical sequence
// satisfying (HVE1) 0 < h_n < 1, h_n decreasing, n h_n increasing, and
// (HVE2) n h_n / log n = c exactly, not just in the limit — plus the
// blocking subsequence n_k = floor(exp(k / log k)).

#include <cstdint>
#include <vector>

namespace erinc {

class BandwidthSchedule {
  public:
    // n_min defaults to the smallest n >= 3 with c log n / n < 1.
    explicit BandwidthSchedule(double c);
    // Explicit n_min; throws std::invalid_argument when c log(n_min)/n_min >= 1
    // (h_n < 1 would fail at n_min).
    BandwidthSchedule(double c, std::int64_t n_min);

    double c() const { return c_; }
    std::int64_t n_min() const { return n_min_; }

    // c log n / n; throws std::domain_error for n < n_min.
    double bandwidth(std::int64_t n) const;

  private:
    double c_;
    std::int64_t n_min_;
};

struct BlockRow {
    std::int64_t k = 0;
    std::int64_t n_k = 0;
    std::int64_t block_lo = 0;  // first n of N_k = {n_{k-1}+1, ..., n_k}
    std::int64_t block_hi = 0;  // = n_k
};

// Rows for k = k_min..k_max with n_k = floor(exp(k / log k)). Blocks are
// consecutive, disjoint and exhaustive above n_{k_min}; the first row's
// block is the degenerate [n_{k_min}, n_{k_min}] anchor (n_{k_min - 1} is
// not defined at the floor k_min = 3). Stops early with the last safe k
// when n_k would exceed 2^31.
std::vector<BlockRow> blocking_subsequence(std::int64_t k_min, std::int64_t k_max);

// The row whose block contains n; throws std::domain_error when n is not
// covered by rows after the anchor.
BlockRow block_of(const std::vector<BlockRow>& rows, std::int64_t n);

} // namespace erinc
