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

#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "dyexp/core.hpp"
#include "dyexp/learner.hpp"
#include "dyexp/numeric.hpp"

namespace dyexp {

/// Follow-the-leader over all orderings, kept as one clamped cumulative loss
/// per alive initial expert.
///
/// L_i is the smallest cumulative loss among orderings currently playing i.
/// When j dies, its orderings move on to every other alive expert, so each
/// survivor's value becomes min(L_i, L_j). The minimum over alive experts is
/// then L*_t, the loss of the best ordering so far.
class FtlState {
 public:
  explicit FtlState(std::size_t experts)
      : cumulative_(experts, 0.0), alive_(experts, 1), alive_count_(experts) {}

  std::size_t experts() const { return cumulative_.size(); }
  bool alive(Expert i) const { return alive_[static_cast<std::size_t>(i)] != 0; }
  const ExpertMask& alive_mask() const { return alive_; }
  std::span<const double> cumulative() const { return cumulative_; }

  // Lowest-index expert with the smallest clamped loss.
  Expert leader() const {
    Expert arg = -1;
    for (std::size_t i = 0; i < cumulative_.size(); ++i) {
      if (!alive_[i]) continue;
      if (arg < 0 || cumulative_[i] < cumulative_[static_cast<std::size_t>(arg)])
        arg = static_cast<Expert>(i);
    }
    return arg;
  }

  double best() const { return cumulative_[static_cast<std::size_t>(leader())]; }

  void accumulate(std::span<const double> losses) {
    for (std::size_t i = 0; i < cumulative_.size(); ++i)
      if (alive_[i]) cumulative_[i] += losses[i];
  }

  void kill(Expert j) {
    const auto jj = static_cast<std::size_t>(j);
    if (jj >= alive_.size() || !alive_[jj])
      throw ScheduleViolation("expert " + std::to_string(j) + " is not alive");
    if (alive_count_ == 1)
      throw ScheduleViolation("cannot kill the last alive expert");
    alive_[jj] = 0;
    --alive_count_;
    for (std::size_t i = 0; i < cumulative_.size(); ++i)
      if (alive_[i] && cumulative_[i] > cumulative_[jj])
        cumulative_[i] = cumulative_[jj];
  }

 private:
  std::vector<double> cumulative_;
  ExpertMask alive_;
  std::size_t alive_count_;
};

// Plays the leader, charges the round's losses, then applies the deaths.
inline Expert ftl_dying_step(FtlState& state, std::span<const double> losses,
                             std::span<const Expert> deaths) {
  const Expert played = state.leader();
  state.accumulate(losses);
  for (Expert j : deaths) state.kill(j);
  return played;
}

class FtlLearner final : public OnlineLearner {
 public:
  explicit FtlLearner(std::size_t experts) : state_(experts) {}

  std::size_t experts() const override { return state_.experts(); }
  std::vector<double> play() override {
    std::vector<double> p(state_.experts(), 0.0);
    p[static_cast<std::size_t>(state_.leader())] = 1.0;
    return p;
  }
  void observe(std::span<const double> losses) override {
    state_.accumulate(losses);
  }
  void on_death(Expert j) override { state_.kill(j); }
  std::string snapshot() const override {
    std::ostringstream os;
    os << "ftl L=";
    for (std::size_t i = 0; i < state_.experts(); ++i)
      os << (i ? "," : "") << (state_.alive(static_cast<Expert>(i)) ? std::to_string(state_.cumulative()[i]) : "x");
    return os.str();
  }

  const FtlState& state() const { return state_; }

 private:
  FtlState state_;
};

}  // namespace dyexp
