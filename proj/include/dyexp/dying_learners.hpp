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

// Hedge over permutation experts in O(K) per round.
//
// Orderings that currently play the same initial expert i form a group. The
// group's total Hedge weight factors as h_i * c_i: h_i is the group's weight
// as of the last night, c_i the shared loss factor accumulated since. Between
// nights only c changes. When j dies its group's weight is handed to the
// surviving groups and every c resets to 1:
//
//   unknown order (all K! orderings): each survivor gets an equal share;
//   known order (effective orderings): survivor i gets the fraction
//     g_i / sum of g over survivors, g_i being the group's initial size.
//
// Everything is stored as logarithms; h_i starts at (K-1)! for the unknown
// order case and overflows a double for K > 170.

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "dyexp/adahedge.hpp"
#include "dyexp/core.hpp"
#include "dyexp/ftl.hpp"
#include "dyexp/hedge.hpp"
#include "dyexp/learner.hpp"
#include "dyexp/numeric.hpp"

namespace dyexp {

// Log of the number of comparator orderings whose head is each expert at t=1.
struct InitialGroupSizes {
  std::vector<double> log_size;

  double log_total() const { return log_sum_exp(log_size); }

  // Every ordering: (K-1)! per head.
  static InitialGroupSizes unknown_order(std::size_t experts) {
    return {std::vector<double>(experts, log_factorial(experts - 1))};
  }

  // Effective orderings for a known death order of D = K - A experts: the
  // p-th expert to die (1-based) heads 2^(D-p) * A orderings, each survivor
  // heads exactly one. Totals 2^D * A.
  static InitialGroupSizes known_order(std::size_t experts,
                                       std::span<const Expert> dying_order) {
    if (dying_order.size() >= experts)
      throw ValidationError("dying order must leave at least one survivor");
    std::vector<char> seen(experts, 0);
    for (Expert e : dying_order) {
      if (e < 0 || static_cast<std::size_t>(e) >= experts)
        throw ValidationError("dying order names unknown expert " + std::to_string(e));
      if (seen[static_cast<std::size_t>(e)])
        throw ValidationError("dying order repeats expert " + std::to_string(e));
      seen[static_cast<std::size_t>(e)] = 1;
    }
    const std::size_t d = dying_order.size();
    const double log_a = std::log(static_cast<double>(experts - d));
    std::vector<double> log_size(experts, 0.0);
    for (std::size_t p = 0; p < d; ++p)
      log_size[static_cast<std::size_t>(dying_order[p])] =
          static_cast<double>(d - 1 - p) * std::log(2.0) + log_a;
    return {std::move(log_size)};
  }
};

/// Grouped weights plus the bookkeeping the adaptive rates need.
///
/// The FTL tracker runs alongside unconditionally; it costs O(K) per round and
/// supplies L*_t for AdaHedge and the play for infinite rates.
class GroupState {
 public:
  GroupState(InitialGroupSizes sizes, RateSchedule rate,
             std::vector<Expert> dying_order = {})
      : alive_(sizes.log_size.size(), 1),
        alive_count_(sizes.log_size.size()),
        log_h_(sizes.log_size),
        log_c_(sizes.log_size.size(), 0.0),
        log_g_(std::move(sizes.log_size)),
        rate_(rate),
        log_comparators_(log_sum_exp(log_g_)),
        ftl_(log_g_.size()),
        ada_(log_comparators_),
        dying_order_(std::move(dying_order)) {
    if (log_g_.empty()) throw ValidationError("need at least one expert");
  }

  std::size_t experts() const { return alive_.size(); }
  std::size_t alive_count() const { return alive_count_; }
  bool alive(Expert i) const { return alive_[static_cast<std::size_t>(i)] != 0; }
  const ExpertMask& alive_mask() const { return alive_; }
  std::span<const double> log_h() const { return log_h_; }
  std::span<const double> log_c() const { return log_c_; }
  std::span<const double> log_group_sizes() const { return log_g_; }
  const RateSchedule& rate() const { return rate_; }
  // ln of the number of orderings being simulated.
  double log_comparators() const { return log_comparators_; }
  std::size_t round() const { return round_; }
  const std::optional<std::size_t>& last_night() const { return last_night_; }
  const FtlState& ftl() const { return ftl_; }
  const AdaHedgeState& adahedge() const { return ada_; }
  const std::vector<Expert>& dying_order() const { return dying_order_; }
  // Mix loss of the most recent observe() (AdaHedge rates only).
  double last_mix_loss() const { return last_mix_; }

  // log sum over alive groups of h*c: the simulated Hedge's total weight.
  double log_mass() const {
    double m = -kInf;
    for (std::size_t i = 0; i < alive_.size(); ++i)
      if (alive_[i]) m = log_add_exp(m, log_h_[i] + log_c_[i]);
    return m;
  }

  // Normalized h*c over alive experts.
  std::vector<double> weight_distribution() const {
    std::vector<double> x(alive_.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = log_h_[i] + log_c_[i];
    return masked_softmax(x, alive_);
  }

  bool follows_leader() const {
    return rate_.kind() == RateSchedule::Kind::infinite ||
           (rate_.kind() == RateSchedule::Kind::adahedge && adahedge_rate(ada_) == kInf);
  }

  std::vector<double> play() const {
    if (follows_leader()) {
      std::vector<double> p(alive_.size(), 0.0);
      p[static_cast<std::size_t>(ftl_.leader())] = 1.0;
      return p;
    }
    return weight_distribution();
  }

  // One round under the state's own rate schedule.
  //
  // AdaHedge is run incrementally: round t multiplies every c by
  // exp(-eta_t l) with the rate that was in force when the round was played.
  // While the gap is still zero the rate is infinite; those rounds play the
  // FTL leader, their mix loss is the increase of L*_t, and the grouped
  // weights are left untouched.
  void observe(std::span<const double> losses) {
    validate_losses(losses, alive_.size());
    ++round_;
    double eta = 0.0;
    switch (rate_.kind()) {
      case RateSchedule::Kind::fixed:
      case RateSchedule::Kind::anytime:
        eta = rate_.at(round_, log_comparators_);
        ftl_.accumulate(losses);
        break;
      case RateSchedule::Kind::infinite:
        ftl_.accumulate(losses);
        break;
      case RateSchedule::Kind::adahedge: {
        const double play_rate = adahedge_rate(ada_);
        const auto p = play();
        const double h = dot(p, losses);
        if (play_rate == kInf) {
          const double before = ftl_.best();
          ftl_.accumulate(losses);
          last_mix_ = ftl_.best() - before;
        } else {
          last_mix_ = mix_loss(p, losses, play_rate);
          ftl_.accumulate(losses);
          eta = play_rate;
        }
        ada_.record(h, last_mix_);
        break;
      }
    }
    apply_losses(losses, eta);
  }

  // c_i *= exp(-eta l_i) on alive experts, then a common shift so that
  // max log c = 0. The shift does not change the played distribution.
  void apply_losses(std::span<const double> losses, double eta) {
    if (!(eta >= 0.0) || !std::isfinite(eta))
      throw ContractViolation("grouped weights need a finite rate >= 0");
    double hi = -kInf;
    for (std::size_t i = 0; i < alive_.size(); ++i) {
      if (!alive_[i]) continue;
      log_c_[i] -= eta * losses[i];
      hi = std::max(hi, log_c_[i]);
    }
    for (std::size_t i = 0; i < alive_.size(); ++i)
      if (alive_[i]) log_c_[i] -= hi;
  }

  // Charges losses to the FTL tracker only (drivers that manage the weights
  // themselves).
  void charge_leader_losses(std::span<const double> losses) { ftl_.accumulate(losses); }

  // Moves j's weight onto the survivors, splitting it according to
  // share(i) = log of the fraction survivor i receives. Resets c to 1.
  template <typename ShareFn>
  void redistribute(Expert j, ShareFn&& share) {
    const auto jj = static_cast<std::size_t>(j);
    if (jj >= alive_.size() || !alive_[jj])
      throw ScheduleViolation("expert " + std::to_string(j) + " is not alive");
    if (alive_count_ == 1)
      throw ScheduleViolation("cannot kill the last alive expert");
    const double dying = log_h_[jj] + log_c_[jj];
    alive_[jj] = 0;
    --alive_count_;
    for (std::size_t i = 0; i < alive_.size(); ++i) {
      if (!alive_[i]) continue;
      log_h_[i] = log_add_exp(log_h_[i] + log_c_[i], dying + share(i));
      log_c_[i] = 0.0;
    }
    log_h_[jj] = -kInf;
    log_c_[jj] = 0.0;
    ftl_.kill(j);
    last_night_ = round_;
  }

  // Known-order bookkeeping.
  std::size_t next_death_index() const { return next_death_; }
  void advance_known_order() { ++next_death_; }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "round=" << round_ << " alive=" << alive_count_ << " (h,c)=[";
    for (std::size_t i = 0; i < alive_.size(); ++i) {
      if (i) os << ' ';
      if (alive_[i])
        os << "e" << i << ":(" << log_h_[i] << "," << log_c_[i] << ")";
      else
        os << "e" << i << ":dead";
    }
    os << "] (log domain)";
    return os.str();
  }

 private:
  ExpertMask alive_;
  std::size_t alive_count_;
  std::vector<double> log_h_;
  std::vector<double> log_c_;
  std::vector<double> log_g_;
  RateSchedule rate_;
  double log_comparators_;
  std::size_t round_ = 0;
  std::optional<std::size_t> last_night_;
  FtlState ftl_;
  AdaHedgeState ada_;
  double last_mix_ = 0.0;
  std::vector<Expert> dying_order_;
  std::size_t next_death_ = 0;
};

// --- Hedge-Perm-Unknown -------------------------------------------------------

inline GroupState hpu_init(std::size_t experts, RateSchedule rate) {
  if (experts < 1) throw ValidationError("need at least one expert");
  return GroupState(InitialGroupSizes::unknown_order(experts), rate);
}

inline std::vector<double> hpu_play(const GroupState& state) { return state.play(); }

inline void hpu_observe(GroupState& state, std::span<const double> losses) {
  state.observe(losses);
}

// Each survivor receives an equal share of the dying group's weight.
inline void hpu_on_death(GroupState& state, Expert j) {
  if (state.alive_count() < 2)
    throw ScheduleViolation("cannot kill the last alive expert");
  const double log_share = -std::log(static_cast<double>(state.alive_count() - 1));
  state.redistribute(j, [&](std::size_t) { return log_share; });
}

// --- Hedge-Perm-Known ---------------------------------------------------------

inline GroupState hpk_init(std::size_t experts, std::vector<Expert> dying_order,
                           RateSchedule rate) {
  if (experts < 1) throw ValidationError("need at least one expert");
  auto sizes = InitialGroupSizes::known_order(experts, dying_order);
  return GroupState(std::move(sizes), rate, std::move(dying_order));
}

// Survivor i receives g_i / sum_{survivors} g of the dying group's weight.
// With the declared order, the survivors' initial sizes sum to g_j.
inline void hpk_on_death(GroupState& state, Expert j) {
  const auto& order = state.dying_order();
  const std::size_t next = state.next_death_index();
  if (next >= order.size() || order[next] != j)
    throw ContractViolation(
        "expert " + std::to_string(j) + " died out of the declared order" +
        (next < order.size() ? " (expected " + std::to_string(order[next]) + ")"
                             : " (no deaths left)"));
  const auto g = state.log_group_sizes();
  double log_den = -kInf;
  for (std::size_t i = 0; i < state.experts(); ++i)
    if (state.alive(static_cast<Expert>(i)) && static_cast<Expert>(i) != j)
      log_den = log_add_exp(log_den, g[i]);
  state.redistribute(j, [&](std::size_t i) { return g[i] - log_den; });
  state.advance_known_order();
}

// Tuned fixed rates for a known horizon.
inline RateSchedule hpu_default_rate(std::size_t experts, std::size_t horizon) {
  return RateSchedule::fixed(
      std::sqrt(2.0 * log_factorial(experts) / static_cast<double>(horizon)));
}

inline RateSchedule hpk_default_rate(std::size_t experts, std::size_t deaths,
                                     std::size_t horizon) {
  const double log_n = static_cast<double>(deaths) * std::log(2.0) +
                       std::log(static_cast<double>(experts - deaths));
  return RateSchedule::fixed(std::sqrt(2.0 * log_n / static_cast<double>(horizon)));
}

// --- learners ---------------------------------------------------------------

class GroupLearner : public OnlineLearner {
 public:
  std::size_t experts() const override { return state_.experts(); }
  std::vector<double> play() override { return state_.play(); }
  void observe(std::span<const double> losses) override {
    state_.observe(losses);
    if (state_.rate().kind() == RateSchedule::Kind::adahedge) {
      delta_.push_back(state_.adahedge().gap());
      mix_.push_back(state_.last_mix_loss());
    }
  }
  std::string snapshot() const override { return state_.describe(); }
  std::vector<Trace> traces() const override {
    if (delta_.empty()) return {};
    return {{"delta", delta_}, {"mix_loss", mix_}};
  }
  const GroupState& state() const { return state_; }

 protected:
  explicit GroupLearner(GroupState state) : state_(std::move(state)) {}
  GroupState state_;

 private:
  std::vector<double> delta_;
  std::vector<double> mix_;
};

class HpuLearner final : public GroupLearner {
 public:
  HpuLearner(std::size_t experts, RateSchedule rate)
      : GroupLearner(hpu_init(experts, rate)) {}
  void on_death(Expert j) override { hpu_on_death(state_, j); }
};

class HpkLearner final : public GroupLearner {
 public:
  HpkLearner(std::size_t experts, std::vector<Expert> dying_order, RateSchedule rate)
      : GroupLearner(hpk_init(experts, std::move(dying_order), rate)) {}
  void on_death(Expert j) override { hpk_on_death(state_, j); }
};

// --- simultaneous deaths --------------------------------------------------

struct DummyExpansion {
  LossStream losses;
  DyingSchedule schedule;
  // Original round for each expanded round; empty for inserted rounds.
  std::vector<std::optional<std::size_t>> original_round;

  std::size_t dummy_rounds() const {
    std::size_t n = 0;
    for (const auto& r : original_round) n += r ? 0 : 1;
    return n;
  }
};

// Serializes multi-death nights. After a night with d > 1 deaths, d-1
// zero-loss rounds are inserted; the first expert (in dying order) dies on the
// real night and each further one at the end of its own inserted round.
inline DummyExpansion preprocess_dummy_rounds(const LossStream& losses,
                                              const DyingSchedule& schedule) {
  const std::size_t K = losses.experts();
  if (schedule.experts() != K || schedule.horizon() != losses.horizon())
    throw ValidationError("loss stream and schedule dimensions differ");
  std::vector<double> values;
  std::vector<std::optional<std::size_t>> origin;
  std::vector<std::optional<std::size_t>> death(K);
  std::size_t expanded = 0;
  for (std::size_t t = 0; t < losses.horizon(); ++t) {
    const auto row = losses.round(t);
    values.insert(values.end(), row.begin(), row.end());
    origin.emplace_back(t);
    ++expanded;
    const auto& dying = schedule.deaths_after(t);
    for (std::size_t k = 0; k < dying.size(); ++k) {
      if (k > 0) {
        values.insert(values.end(), K, 0.0);
        origin.emplace_back(std::nullopt);
        ++expanded;
      }
      death[static_cast<std::size_t>(dying[k])] = expanded;
    }
  }
  return DummyExpansion{LossStream(expanded, K, std::move(values)),
                        DyingSchedule(K, expanded, std::move(death)),
                        std::move(origin)};
}

// Drives a learner through an expanded instance and reports on the original
// rounds. Inserted rounds go through observe_dummy (clock frozen).
inline RunRecord simulate_expanded(OnlineLearner& learner,
                                   const DummyExpansion& expansion,
                                   const LossStream& original_losses,
                                   const DyingSchedule& original_schedule) {
  const std::size_t K = original_losses.experts();
  std::vector<double> dist;
  dist.reserve(original_losses.horizon() * K);
  for (std::size_t e = 0; e < expansion.losses.horizon(); ++e) {
    const auto p = learner.play();
    if (expansion.original_round[e]) {
      dist.insert(dist.end(), p.begin(), p.end());
      learner.observe(expansion.losses.round(e));
    } else {
      learner.observe_dummy();
    }
    for (Expert j : expansion.schedule.deaths_after(e)) learner.on_death(j);
  }
  auto record = regret_report(std::move(dist), original_losses, original_schedule);
  record.traces = learner.traces();
  return record;
}

}  // namespace dyexp
