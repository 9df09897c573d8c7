// Copyright 2026 The aoi-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>

namespace aoi_lab {

// SplitMix64 finalizer. Used for seeding and for deriving child seeds.
constexpr std::uint64_t SplitMix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for the task_index-th independent stream of a master seed:
//   child = splitmix64(master ^ splitmix64(task_index)).
// Parallel runs must each own a RandomSource built from DeriveSeed.
constexpr std::uint64_t DeriveSeed(std::uint64_t master_seed,
                                   std::uint64_t task_index) {
  std::uint64_t index_state = task_index;
  std::uint64_t state = master_seed ^ SplitMix64(index_state);
  return SplitMix64(state);
}

// xoshiro256** (Blackman & Vigna), state filled from the seed with
// SplitMix64. Only integer arithmetic is involved in the raw stream, so a
// given seed yields the same sequence on every platform.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = SplitMix64(sm);
  }

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t NextU64() noexcept {
    const std::uint64_t result = Rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = Rotl(state_[3], 45);
    return result;
  }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double UniformOpen() noexcept {
    return (static_cast<double>(NextU64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, n), n > 0 (multiply-high reduction).
  std::uint64_t UniformIndex(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(NextU64()) * n) >> 64);
  }

  bool Bernoulli(double p) noexcept { return UniformOpen() < p; }

 private:
  static constexpr std::uint64_t Rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace aoi_lab
