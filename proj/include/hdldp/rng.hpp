//
// Copyright 2026 The hdldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef HDLDP_RNG_HPP_
#define HDLDP_RNG_HPP_

#include <cstdint>
#include <initializer_list>

namespace hdldp {

// splitmix64 finalizer; used for seeding and for deriving substream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a substream seed from a base seed and a path of stream ids, e.g.
// (seed, column) for dataset columns or (seed, trial, user) for experiment
// trials. Every component feeds through mix64 so unrelated paths decorrelate.
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t id : path) {
    h = mix64(h ^ (id + 0x9e3779b97f4a7c15ULL));
  }
  return h;
}

/// xoshiro256++ generator. Seedable, portable (no libstdc++ distribution
/// objects anywhere in the sampling path) and fast enough for per-report use.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) { reseed(seed); }

  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream_path) {
    reseed(derive_seed(seed, stream_path));
  }

  void reseed(std::uint64_t seed) {
    // Expand the 64-bit seed through splitmix64, the initialization the
    // xoshiro authors recommend.
    std::uint64_t x = seed;
    for (auto& word : state_) {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      word = z ^ (z >> 31);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double strictly inside (0, 1); safe to feed into logarithms.
  double uniform_open() {
    return (static_cast<double>(next() >> 12) + 0.5) * 0x1.0p-52;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  /// Uniform integer in [0, n). Lemire multiply-shift; bias is O(n/2^64).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace hdldp

#endif  // HDLDP_RNG_HPP_
