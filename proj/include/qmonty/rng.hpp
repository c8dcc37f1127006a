// Copyright 2026 The qmonty Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <limits>
#include <span>

namespace qmonty {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

inline constexpr std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// SplitMix64: a counter-based generator. Output k is Mix64(seed + k * gamma),
// so independent streams come from hashing (seed, stream index) into a new
// seed. Uniform doubles are built from the top 53 bits, so results do not
// depend on the standard library's distribution implementations.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  // Deterministic child stream; distinct indices give unrelated sequences.
  static SplitMix64 Stream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(Mix64(seed ^ Mix64(index + kGoldenGamma)));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += kGoldenGamma;
    return Mix64(state_);
  }

  // Uniform on [0, 1).
  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform on {0, ..., n - 1}; n > 0. Multiply-shift, bias < n / 2^64.
  int Below(int n) {
    const auto wide = static_cast<unsigned __int128>((*this)()) * static_cast<std::uint64_t>(n);
    return static_cast<int>(wide >> 64);
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  // Index i drawn with probability weights[i] / sum(weights).
  int Categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w > 0.0 ? w : 0.0;
    double u = Uniform() * total;
    int last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      last_positive = static_cast<int>(i);
      if (u < weights[i]) return static_cast<int>(i);
      u -= weights[i];
    }
    return last_positive;
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace qmonty
