// SPDX-License-Identifier: Apache-2.0
//
// liscap: uplink capacity analysis for large intelligent surfaces
// Copyright (C) 2026 liscap developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef LIS_RNG_HPP
#define LIS_RNG_HPP

#include <cstdint>
#include <random>
#include <stdexcept>

namespace lis
{

/// splitmix64 step (Steele, Lea & Flood's SplittableRandom finalizer).
/// Bijective avalanche mixer; one step is enough to decorrelate seeds that
/// differ in a single bit.
inline std::uint64_t splitmix64(std::uint64_t &state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent, reproducible stream seed for one Monte Carlo
/// trial. Trials can then run in any order (or in parallel) and still see
/// exactly the same draws.
inline std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial)
{
    std::uint64_t s = base_seed ^ (0xd1342543de82ef95ULL * (trial + 1));
    return splitmix64(s);
}

/// Deterministic per-trial random source. Thin wrapper over mt19937_64
/// with explicitly spelled-out distributions, because the std::*_distribution
/// classes are not bit-reproducible across standard library vendors.
class TrialRng
{
  public:
    explicit TrialRng(std::uint64_t seed) : eng_(seed) {}

    /// uniform double in [0, 1) with 53 random bits
    double uniform() { return double(eng_() >> 11) * 0x1.0p-53; }

    /// uniform double in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Poisson sample by Knuth's product-of-uniforms method, run in chunks
    /// of mean <= 256 so the running product stays far away from underflow
    /// for arbitrarily large means.
    long poisson(double mean)
    {
        if (!(mean >= 0.0))
            throw std::invalid_argument("poisson: mean must be non-negative");
        long count = 0;
        double remaining = mean;
        while (remaining > 0.0)
        {
            double chunk = remaining > 256.0 ? 256.0 : remaining;
            remaining -= chunk;
            double limit = std::exp(-chunk);
            double prod = 1.0;
            long k = -1;
            do
            {
                prod *= uniform();
                ++k;
            } while (prod > limit);
            count += k;
        }
        return count;
    }

  private:
    std::mt19937_64 eng_;
};

} // namespace lis

#endif
