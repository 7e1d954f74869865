#pragma once

// Reproducible random streams. The generator is splitmix64; the state
// advances by the Weyl constant 0x9E3779B97F4A7C15 and each output is the
// finalizer
//     z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9;
//     z ^= z >> 27;  z *= 0x94D049BB133111EB;
//     z ^= z >> 31;
// applied to the advanced state. Streams for Monte Carlo tasks are derived
// as a pure function of (master_seed, replicate, center), so results do not
// depend on scheduling or worker count. The derivation is documented
// bit-exactly in the README; changing it invalidates recorded runs.

#include <cstdint>

namespace erinc {

struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform on [0, 1), 53 random bits
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// One splitmix64 finalizer round on a seed value (state unused afterwards).
std::uint64_t mix64(std::uint64_t x);

// Master seed plus the replicate/center derivation rule:
//   stream(master, r, c) = mix64(master ^ tag(r, c)),
//   tag(r, c) = mix64((r + 1) * 0x9E3779B97F4A7C15 ^ (c + 1) * 0xC2B2AE3D27D4EB4F).
// Distinct (replicate, center) pairs get distinct streams for any realistic
// index range.
struct SeedSpec {
    std::uint64_t master_seed = 0;

    std::uint64_t stream_seed(std::uint64_t replicate, std::uint64_t center) const;
    SplitMix64 stream(std::uint64_t replicate, std::uint64_t center) const {
        return SplitMix64(stream_seed(replicate, center));
    }
};

// Exact Poisson(lambda) variate. Sequential-search inversion below
// lambda = 30, Hormann's transformed rejection (PTRD) above; both sample the
// exact law. Requires 0 <= lambda < 2^31.
std::int64_t poisson_variate(double lambda, SplitMix64& rng);

} // namespace erinc
