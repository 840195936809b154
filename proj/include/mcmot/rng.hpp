// Copyright (C) 2026 mcmot contributors
// SPDX-License-Identifier: Apache-2.0
//
// Seedable, portable random number generator for scenario synthesis.
// Scenarios must regenerate bit-identically from (config, seed) on any
// platform, so the algorithm is pinned here rather than delegated to the
// standard library (std::mt19937 streams are portable, but distributions
// are not).
//
// Algorithm: 64-bit splitmix. State advances by the odd constant
// 0x9E3779B97F4A7C15; each output mixes the state with two xor-shift
// multiplies (0xBF58476D1CE4E5B9, 0x94D049BB133111EB) and a final
// 31-bit xor-shift. Reference sequence for seed 0:
//   e220a8397b1dcdaf, 6e789e6aa1b965f4, 06c45d188009454f, ...

#pragma once

#include <cstdint>

namespace mcmot {

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    /// Next raw 64-bit output.
    std::uint64_t next_u64();

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform();

    /// Uniform double in [lo, hi). Throws std::invalid_argument unless
    /// lo < hi and both are finite.
    double uniform(double lo, double hi);

    /// Standard normal via Box-Muller (two uniforms per draw, no caching,
    /// so the consumed stream length is two words per call).
    double gaussian();

    /// Normal with the given mean and standard deviation (sigma >= 0).
    double gaussian(double mean, double sigma);

    /// Poisson-distributed count by Knuth's product method. Requires
    /// 0 <= lambda <= 100 (exp(-lambda) must stay well above double
    /// underflow); throws std::invalid_argument otherwise.
    int poisson(double lambda);

  private:
    std::uint64_t state_;
};

}  // namespace mcmot
