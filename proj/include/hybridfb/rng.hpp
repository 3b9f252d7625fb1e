// SPDX-License-Identifier: Apache-2.0
//
// hybridfb - hybrid statistical/instantaneous feedback for FDD massive MIMO
// Copyright (C) 2026 The hybridfb Authors
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

#pragma once

#include "hybridfb/common.hpp"

#include <initializer_list>
#include <random>

namespace hybridfb {

using Rng = std::mt19937_64;

// Stream-split rule: a stream key is folded into the scenario seed with
// splitmix64, one round per key word. Every Monte Carlo trial and every
// per-user codebook draws from its own stream, so results never depend on
// which worker ran what.
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> key)
{
    std::uint64_t s = splitmix64(seed);
    for (std::uint64_t k : key)
        s = splitmix64(s ^ splitmix64(k + 0x632BE59BD9B4E019ull));
    return s;
}

inline Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> key)
{
    return Rng(derive_seed(seed, key));
}

namespace stream {
constexpr std::uint64_t geometry = 1;
constexpr std::uint64_t skewed_codebook = 2;
constexpr std::uint64_t trial_channel = 3;
} // namespace stream

// Circularly symmetric complex Gaussian, zero mean, unit variance.
inline cplx complex_gaussian(Rng& rng)
{
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

inline cvec complex_gaussian_vector(Eigen::Index n, Rng& rng)
{
    cvec v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = complex_gaussian(rng);
    return v;
}

} // namespace hybridfb
