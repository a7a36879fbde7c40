// Copyright 2026 The RRM Toolkit Authors
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

#pragma once

// Portable random streams. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; every distribution used by the
// toolkit is implemented here instead of through <random>'s distributions,
// whose algorithms vary between standard libraries.
//
// Seed derivation: the child seed for index t of a parent seed s is the
// (t+1)-th output of a SplitMix64 generator started at s, i.e.
//   mix64(s + (t + 1) * 0x9E3779B97F4A7C15)
// so child streams can be created in any order (a counter-based jump).

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace rrm {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// Seed of child stream `index` of `parent`.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return mix64(parent + (index + 1) * kGoldenGamma);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t uniform_index(std::uint64_t bound);

  /// Standard normal via Box-Muller (one value per call; the pair's second
  /// value is cached).
  double normal();

  bool bernoulli(double p) { return uniform01() < p; }

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// A random permutation of 0..n-1.
std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

}  // namespace rrm
