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
#include <span>
#include <string>
#include <vector>

#include "dyexp/adahedge.hpp"
#include "dyexp/dying_learners.hpp"
#include "dyexp/learner.hpp"

namespace dyexp {

enum class Regime { ftl, adahedge };

// Comparator set simulated underneath FlipFlop and AdaHedge.
enum class GroupBase { unknown_order, known_order };

/// FlipFlop regime switching.
///
/// Each regime accumulates its own mixability gap over the rounds it plays.
/// FTL hands over once delta_ftl > (phi / alpha) * delta_ah; AdaHedge hands
/// back once delta_ah > alpha * delta_ftl.
struct FlipFlopState {
  Regime regime = Regime::ftl;
  double delta_ftl = 0.0;
  double delta_ah = 0.0;
  double phi = 2.37;
  double alpha = 1.243;

  // Adds one round's gap increment to the active regime and switches if its
  // threshold is crossed. Returns true on a switch.
  bool record(double increment) {
    if (regime == Regime::ftl) {
      delta_ftl += increment;
      if (delta_ftl > (phi / alpha) * delta_ah) {
        regime = Regime::adahedge;
        return true;
      }
    } else {
      delta_ah += increment;
      if (delta_ah > alpha * delta_ftl) {
        regime = Regime::ftl;
        return true;
      }
    }
    return false;
  }
};

/// FlipFlop over all orderings (unknown order) or the effective orderings
/// (known order), on top of the grouped weights.
///
/// FTL rounds play the clamped-loss leader and their mix loss is the increase
/// of L*_t. AdaHedge rounds play the grouped distribution at
/// eta = ln N / delta_ah. In both regimes the grouped weights absorb the
/// round at AdaHedge's current rate (no update while delta_ah is zero).
class FlipFlopLearner final : public OnlineLearner {
 public:
  FlipFlopLearner(GroupState state, GroupBase base, double phi = 2.37,
                  double alpha = 1.243)
      : state_(std::move(state)), base_(base) {
    if (!(phi > 1.0) || !(alpha > 0.0))
      throw ValidationError("FlipFlop needs phi > 1 and alpha > 0");
    ff_.phi = phi;
    ff_.alpha = alpha;
  }

  std::size_t experts() const override { return state_.experts(); }

  std::vector<double> play() override {
    if (plays_leader()) {
      std::vector<double> p(state_.experts(), 0.0);
      p[static_cast<std::size_t>(state_.ftl().leader())] = 1.0;
      return p;
    }
    return state_.weight_distribution();
  }

  void observe(std::span<const double> losses) override {
    validate_losses(losses, state_.experts());
    const bool leader_round = plays_leader();
    const double eta_ah = ah_rate();
    const auto p = play();
    const double h = dot(p, losses);
    double m;
    if (leader_round) {
      const double before = state_.ftl().best();
      state_.charge_leader_losses(losses);
      m = state_.ftl().best() - before;
    } else {
      m = mix_loss(p, losses, eta_ah);
      state_.charge_leader_losses(losses);
    }
    state_.apply_losses(losses, eta_ah == kInf ? 0.0 : eta_ah);
    const bool switched = ff_.record(std::max(0.0, h - m));
    delta_ftl_.push_back(ff_.delta_ftl);
    delta_ah_.push_back(ff_.delta_ah);
    regime_.push_back(ff_.regime == Regime::adahedge ? 1.0 : 0.0);
    switches_.push_back(switched ? 1.0 : 0.0);
    mix_.push_back(m);
  }

  void on_death(Expert j) override {
    if (base_ == GroupBase::unknown_order)
      hpu_on_death(state_, j);
    else
      hpk_on_death(state_, j);
  }

  std::string snapshot() const override {
    return std::string(ff_.regime == Regime::ftl ? "regime=ftl " : "regime=ah ") +
           "delta_ftl=" + std::to_string(ff_.delta_ftl) +
           " delta_ah=" + std::to_string(ff_.delta_ah) + " " + state_.describe();
  }

  std::vector<Trace> traces() const override {
    return {{"delta_ftl", delta_ftl_},
            {"delta_ah", delta_ah_},
            {"regime", regime_},
            {"switch", switches_},
            {"mix_loss", mix_}};
  }

  const FlipFlopState& flipflop() const { return ff_; }
  const GroupState& state() const { return state_; }

 private:
  double ah_rate() const {
    return ff_.delta_ah > 0.0 ? state_.log_comparators() / ff_.delta_ah : kInf;
  }
  bool plays_leader() const {
    return ff_.regime == Regime::ftl || ah_rate() == kInf;
  }

  GroupState state_;
  GroupBase base_;
  FlipFlopState ff_;
  std::vector<double> delta_ftl_, delta_ah_, regime_, switches_, mix_;
};

inline FlipFlopLearner make_flipflop(const DyingSchedule& schedule, GroupBase base,
                                     double phi = 2.37, double alpha = 1.243) {
  const std::size_t K = schedule.experts();
  // The weights' own rate is unused; FlipFlop drives them directly.
  const auto rate = RateSchedule::fixed(0.0);
  if (base == GroupBase::unknown_order)
    return FlipFlopLearner(hpu_init(K, rate), base, phi, alpha);
  return FlipFlopLearner(hpk_init(K, schedule.dying_order(), rate), base, phi, alpha);
}

inline RunRecord flipflop_run(const LossStream& losses, const DyingSchedule& schedule,
                              GroupBase base = GroupBase::unknown_order,
                              double phi = 2.37, double alpha = 1.243) {
  auto learner = make_flipflop(schedule, base, phi, alpha);
  return simulate(learner, losses, schedule);
}

}  // namespace dyexp
