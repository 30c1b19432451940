// Copyright 2026 The dyexp Authors.
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

namespace dyexp {

/// Stateless counter-based generator ("SplitMix64 counter hash").
///
/// Every draw is a pure function of (key, stream, counter):
///
///   x = mix(key ^ mix(stream + G))
///   out = mix(x + (counter + 1) * G)
///
/// where mix is the SplitMix64 finalizer and G = 0x9e3779b97f4a7c15. The
/// generators use one stream per (day, expert) pair and the round within the
/// day as the counter, so removing an expert never shifts anyone else's
/// randomness and two learners fed the same seed see the same instance.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t bits(std::uint64_t stream,
                               std::uint64_t counter) const {
    const std::uint64_t x = mix(key_ ^ mix(stream + kGolden));
    return mix(x + (counter + 1) * kGolden);
  }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t stream, std::uint64_t counter) const {
    return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
  }

  constexpr bool bernoulli(double p, std::uint64_t stream,
                           std::uint64_t counter) const {
    return uniform(stream, counter) < p;
  }

  constexpr std::uint64_t key() const { return key_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
};

// Stream id for a (day, expert) pair.
constexpr std::uint64_t substream(std::uint64_t day, std::uint64_t expert) {
  return (day << 32) | (expert & 0xffffffffULL);
}

}  // namespace dyexp
