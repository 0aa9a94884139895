// cfsim - uplink scheduling simulator for dense user-centric cell-free
// massive MIMO networks
// Copyright (C) 2026 The cfsim authors
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

#include <complex>
#include <cstdint>
#include <random>

namespace cfsim {

using Rng = std::mt19937_64;

// splitmix64 finalizer; turns structured seeds (base ^ index) into
// well-mixed engine seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(mix_seed(seed)); }

// Independent deterministic stream for one layout of a seeded run.
inline Rng make_layout_rng(std::uint64_t base_seed, std::uint64_t layout_index) {
    return Rng(mix_seed(base_seed ^ layout_index));
}

// Circularly symmetric complex Gaussian CN(0,1): real and imaginary parts
// are independent N(0, 1/2).
class ComplexNormal {
  public:
    std::complex<double> operator()(Rng &rng) {
        const double re = dist_(rng);
        const double im = dist_(rng);
        return {re, im};
    }

  private:
    std::normal_distribution<double> dist_{0.0, 0.70710678118654752440};
};

} // namespace cfsim
