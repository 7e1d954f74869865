#include "erinc/random.hpp"

#include <cmath>
#include <stdexcept>

namespace erinc {

std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t SeedSpec::stream_seed(std::uint64_t replicate, std::uint64_t center) const {
    const std::uint64_t tag =
        mix64((replicate + 1) * 0x9E3779B97F4A7C15ULL ^ (center + 1) * 0xC2B2AE3D27D4EB4FULL);
    return mix64(master_seed ^ tag);
}

namespace {

// Inversion by sequential search; one uniform per variate. Safe for
// lambda < 30 (e^-lambda stays far from underflow).
std::int64_t poisson_inversion(double lambda, SplitMix64& rng) {
    const double u = rng.uniform();
    double p = std::exp(-lambda);
    double cum = p;
    std::int64_t k = 0;
    while (u > cum) {
        ++k;
        p *= lambda / static_cast<double>(k);
        cum += p;
        if (k > 2000) break;  // u ~ 1 and fp saturation; cum already ~ 1
    }
    return k;
}

// Hormann (1993), "The transformed rejection method for generating Poisson
// random variables", squeeze variant (PTRS). Exact rejection sampler,
// valid for lambda >= 10; we switch at 30.
std::int64_t poisson_ptrd(double lambda, SplitMix64& rng) {
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::abs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) {
            return static_cast<std::int64_t>(kd);
        }
        if (kd < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -lambda + kd * loglam - std::lgamma(kd + 1.0)) {
            return static_cast<std::int64_t>(kd);
        }
    }
}

} // namespace

std::int64_t poisson_variate(double lambda, SplitMix64& rng) {
    if (!(lambda >= 0.0) || lambda >= 2147483648.0) {
        throw std::domain_error("poisson_variate: lambda must be in [0, 2^31)");
    }
    if (lambda == 0.0) return 0;
    if (lambda < 30.0) return poisson_inversion(lambda, rng);
    return poisson_ptrd(lambda, rng);
}

} // namespace erinc
