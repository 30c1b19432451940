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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include "dyexp/numeric.hpp"

namespace dyexp {

inline constexpr double kTinyRate = 1e-12;

/// Mix loss m = -(1/eta) ln(sum_i p_i exp(-eta l_i)).
///
/// Below kTinyRate the first-order limit p.l is returned. For an infinite
/// rate the result is the loss of the most probable expert (lowest index on
/// ties), which is the limit for a fixed distribution. Drivers that let the
/// weights themselves depend on eta use the best-comparator increment instead;
/// see GroupState::observe.
inline double mix_loss(std::span<const double> p, std::span<const double> losses,
                       double eta) {
  if (eta < kTinyRate) return dot(p, losses);
  if (eta == kInf) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
      if (p[i] > p[arg]) arg = i;
    return losses[arg];
  }
  double lo = kInf;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) lo = std::min(lo, losses[i]);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) s += p[i] * std::exp(-eta * (losses[i] - lo));
  return lo - std::log(s) / eta;
}

// Running AdaHedge accounting over a comparator set of size N.
class AdaHedgeState {
 public:
  explicit AdaHedgeState(double log_size = 0.0) : log_size_(log_size) {}

  // Adds one round: learner loss h and mix loss m. The gap increment is
  // clamped at zero, since h >= m holds exactly and only rounding can break it.
  void record(double learner_loss, double mix) {
    learner_loss_ += learner_loss;
    mix_loss_ += mix;
    gap_ += std::max(0.0, learner_loss - mix);
  }

  double gap() const { return gap_; }
  double learner_loss() const { return learner_loss_; }
  double mix_loss() const { return mix_loss_; }
  double log_size() const { return log_size_; }

 private:
  double log_size_;
  double learner_loss_ = 0.0;
  double mix_loss_ = 0.0;
  double gap_ = 0.0;
};

// ln N / Delta_{t-1}; infinite while the gap is still zero.
inline double adahedge_rate(const AdaHedgeState& s) {
  if (s.gap() <= 0.0) return kInf;
  return s.log_size() / s.gap();
}

}  // namespace dyexp
