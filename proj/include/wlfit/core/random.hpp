/*
 * wlfit - Residual-weighted 3D Morphable Model landmark fitting.
 *
 * File: include/wlfit/core/random.hpp
 *
 * Copyright 2026 The wlfit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#ifndef WLFIT_CORE_RANDOM_HPP
#define WLFIT_CORE_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace wlfit {

/**
 * Seeded random source with a portable output sequence.
 *
 * std::mt19937_64 is fully specified by the standard, but the standard
 * distributions are not, so uniform/normal variates are derived here by hand.
 * This makes synthetic models and scenes bit-identical across standard
 * library implementations.
 */
class Random
{
public:
    explicit Random(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Unbiased integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n)
    {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x = engine_();
        while (x >= limit)
        {
            x = engine_();
        }
        return x % n;
    }

    /// Standard normal variate (Box-Muller, one value per call).
    double normal()
    {
        double u1 = uniform01();
        while (u1 <= 0.0)
        {
            u1 = uniform01();
        }
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Normal variate with the given stddev, resampled until |x| <= limit * stddev.
    double truncated_normal(double stddev, double limit)
    {
        double z = normal();
        while (std::abs(z) > limit)
        {
            z = normal();
        }
        return z * stddev;
    }

    /// k distinct integers from [0, n), in draw order (partial Fisher-Yates).
    std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t k)
    {
        std::vector<std::uint32_t> pool(n);
        for (std::uint32_t i = 0; i < n; ++i)
        {
            pool[i] = i;
        }
        for (std::uint32_t i = 0; i < k; ++i)
        {
            const auto j = i + static_cast<std::uint32_t>(uniform_index(n - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    }

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; derives independent child seeds from (seed, stream).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace wlfit

#endif /* WLFIT_CORE_RANDOM_HPP */
