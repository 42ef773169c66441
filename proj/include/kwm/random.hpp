/*
 *   Copyright 2026 The kwmoments Authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
 */

#pragma once

#include <cstdint>
#include <limits>

namespace kwm {

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Counter-based generator: the i-th output of stream (seed, stream_id) is a
/// pure function of the three integers, so trials can be computed in any
/// order and on any platform with identical results.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ull;

  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream_id = 0)
      : key_(splitmix64_mix(seed ^ splitmix64_mix(stream_id + golden_gamma))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr std::uint64_t at(std::uint64_t counter) const {
    return splitmix64_mix(key_ + (counter + 1) * golden_gamma);
  }

  constexpr result_type operator()() { return at(counter_++); }

  /// Uniform integer in [0, bound) by rejection, unbiased.
  constexpr std::uint64_t uniform(std::uint64_t bound) {
    const std::uint64_t limit = max() - (max() % bound + 1) % bound;
    for (;;) {
      const std::uint64_t x = (*this)();
      if (x <= limit) return x % bound;
    }
  }

  constexpr std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace kwm
