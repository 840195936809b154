// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//

#include <mcmot/rng.hpp>

#include <cmath>
#include <stdexcept>

namespace mcmot {

std::uint64_t SplitMix64::next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double SplitMix64::uniform() {
    // Top 53 bits scaled by 2^-53; exactly representable, never 1.0.
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SplitMix64::uniform(double lo, double hi) {
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw std::invalid_argument("SplitMix64::uniform: bad range");
    }
    return lo + (hi - lo) * uniform();
}

double SplitMix64::gaussian() {
    // Box-Muller, cosine branch only. u1 must be nonzero for the log.
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
}

double SplitMix64::gaussian(double mean, double sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(mean) || !std::isfinite(sigma)) {
        throw std::invalid_argument("SplitMix64::gaussian: bad parameters");
    }
    return mean + sigma * gaussian();
}

int SplitMix64::poisson(double lambda) {
    if (!(lambda >= 0.0) || lambda > 100.0) {
        throw std::invalid_argument("SplitMix64::poisson: lambda outside [0, 100]");
    }
    if (lambda == 0.0) return 0;
    const double floor_p = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= uniform();
    } while (p > floor_p);
    return k - 1;
}

}  // namespace mcmot
