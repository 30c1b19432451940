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

// Domain types for the dying-experts game.
//
// Rounds are 0-based in the API (t = 0 .. T-1). Death rounds are 1-based and
// name the round at whose end the expert dies: an expert with death round d is
// alive exactly in rounds t < d, so d must lie in [1, T-1]. The set of nights
// is the set of distinct death rounds; day s covers the rounds between night
// s-1 and night s.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dyexp/error.hpp"

namespace dyexp {

using Expert = int;
// Per-expert alive flags (1 = alive). char rather than bool so spans work.
using ExpertMask = std::vector<char>;

class LossStream {
 public:
  LossStream(std::size_t horizon, std::size_t experts,
             std::vector<double> losses)
      : horizon_(horizon), experts_(experts), losses_(std::move(losses)) {
    if (horizon_ < 1 || experts_ < 1)
      throw ValidationError("loss stream needs T >= 1 and K >= 1");
    if (losses_.size() != horizon_ * experts_)
      throw ValidationError("loss stream has " +
                            std::to_string(losses_.size()) +
                            " entries, expected T*K = " +
                            std::to_string(horizon_ * experts_));
    for (std::size_t k = 0; k < losses_.size(); ++k) {
      const double v = losses_[k];
      if (!(v >= 0.0 && v <= 1.0))
        throw ValidationError("loss at round " + std::to_string(k / experts_) +
                              ", expert " + std::to_string(k % experts_) +
                              " is outside [0,1]");
    }
  }

  static LossStream zeros(std::size_t horizon, std::size_t experts) {
    return LossStream(horizon, experts,
                      std::vector<double>(horizon * experts, 0.0));
  }

  std::size_t horizon() const { return horizon_; }
  std::size_t experts() const { return experts_; }

  double operator()(std::size_t t, Expert i) const {
    return losses_[t * experts_ + static_cast<std::size_t>(i)];
  }
  std::span<const double> round(std::size_t t) const {
    return {losses_.data() + t * experts_, experts_};
  }
  const std::vector<double>& values() const { return losses_; }

  // Sum of expert i's losses over rounds [begin, end).
  double segment_loss(Expert i, std::size_t begin, std::size_t end) const {
    double s = 0.0;
    for (std::size_t t = begin; t < end; ++t) s += (*this)(t, i);
    return s;
  }

  friend bool operator==(const LossStream&, const LossStream&) = default;

 private:
  std::size_t horizon_;
  std::size_t experts_;
  std::vector<double> losses_;
};

class DyingSchedule {
 public:
  DyingSchedule(std::size_t experts, std::size_t horizon,
                std::vector<std::optional<std::size_t>> death_round)
      : experts_(experts),
        horizon_(horizon),
        death_round_(std::move(death_round)) {
    if (experts_ < 1 || horizon_ < 1)
      throw ValidationError("schedule needs K >= 1 and T >= 1");
    if (death_round_.size() != experts_)
      throw ValidationError("schedule lists " +
                            std::to_string(death_round_.size()) +
                            " death rounds for K = " + std::to_string(experts_));
    deaths_after_.assign(horizon_, {});
    for (std::size_t i = 0; i < experts_; ++i) {
      const auto& d = death_round_[i];
      if (!d) {
        ++survivors_;
        continue;
      }
      if (*d < 1 || *d > horizon_ - 1)
        throw ScheduleViolation("expert " + std::to_string(i) +
                                " has death round " + std::to_string(*d) +
                                " outside [1, T-1]");
      deaths_after_[*d - 1].push_back(static_cast<Expert>(i));
    }
    if (survivors_ == 0)
      throw ScheduleViolation("every expert dies; at least one must survive");
    for (std::size_t t = 0; t < horizon_; ++t) {
      if (deaths_after_[t].empty()) continue;
      nights_.push_back(t + 1);
      deaths_by_night_.push_back(deaths_after_[t]);
    }
  }

  static DyingSchedule none(std::size_t experts, std::size_t horizon) {
    return DyingSchedule(experts, horizon,
                         std::vector<std::optional<std::size_t>>(experts));
  }

  // Builds the schedule implied by per-round alive masks. Masks must shrink
  // monotonically and never be empty.
  static DyingSchedule from_masks(const std::vector<ExpertMask>& masks) {
    if (masks.empty()) throw ValidationError("no alive masks");
    const std::size_t k = masks.front().size();
    std::vector<std::optional<std::size_t>> death(k);
    for (std::size_t t = 0; t < masks.size(); ++t) {
      if (masks[t].size() != k)
        throw ValidationError("alive masks have inconsistent widths");
      if (std::none_of(masks[t].begin(), masks[t].end(),
                       [](char a) { return a != 0; }))
        throw ScheduleViolation("alive mask at round " + std::to_string(t) +
                                " is empty");
      for (std::size_t i = 0; i < k; ++i) {
        const bool was = t == 0 || masks[t - 1][i];
        if (masks[t][i] && !was)
          throw ScheduleViolation("expert " + std::to_string(i) +
                                  " revives at round " + std::to_string(t));
        if (!masks[t][i] && was) {
          if (t == 0)
            throw ScheduleViolation("expert " + std::to_string(i) +
                                    " is dead before the first round");
          death[i] = t;
        }
      }
    }
    return DyingSchedule(k, masks.size(), std::move(death));
  }

  std::size_t experts() const { return experts_; }
  std::size_t horizon() const { return horizon_; }
  const std::vector<std::optional<std::size_t>>& death_rounds() const {
    return death_round_;
  }
  const std::optional<std::size_t>& death_round(Expert i) const {
    return death_round_[static_cast<std::size_t>(i)];
  }

  bool alive(Expert i, std::size_t t) const {
    const auto& d = death_round(i);
    return !d || t < *d;
  }
  ExpertMask alive_set(std::size_t t) const {
    ExpertMask m(experts_);
    for (std::size_t i = 0; i < experts_; ++i)
      m[i] = alive(static_cast<Expert>(i), t) ? 1 : 0;
    return m;
  }
  std::vector<Expert> dead_set(std::size_t t) const {
    std::vector<Expert> out;
    for (std::size_t i = 0; i < experts_; ++i)
      if (!alive(static_cast<Expert>(i), t)) out.push_back(static_cast<Expert>(i));
    return out;
  }

  // Experts dying at the end of round t, ascending index.
  const std::vector<Expert>& deaths_after(std::size_t t) const {
    return deaths_after_[t];
  }

  // Night rounds (1-based round numbers), ascending.
  const std::vector<std::size_t>& nights() const { return nights_; }
  const std::vector<std::vector<Expert>>& deaths_by_night() const {
    return deaths_by_night_;
  }
  std::vector<std::size_t> deaths_per_night() const {
    std::vector<std::size_t> d;
    for (const auto& n : deaths_by_night_) d.push_back(n.size());
    return d;
  }
  std::size_t night_count() const { return nights_.size(); }
  std::size_t survivors() const { return survivors_; }
  std::size_t deaths() const { return experts_ - survivors_; }

  // Experts in the order they die; simultaneous deaths by ascending index.
  std::vector<Expert> dying_order() const {
    std::vector<Expert> out;
    for (const auto& n : deaths_by_night_) out.insert(out.end(), n.begin(), n.end());
    return out;
  }

  // Last night observed by the end of 0-based round t, if any.
  std::optional<std::size_t> last_night_at(std::size_t t) const {
    std::optional<std::size_t> last;
    for (std::size_t n : nights_)
      if (n <= t + 1) last = n;
    return last;
  }

  // Day segments as [begin, end) round ranges.
  std::vector<std::pair<std::size_t, std::size_t>> days() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t begin = 0;
    for (std::size_t n : nights_) {
      out.emplace_back(begin, n);
      begin = n;
    }
    out.emplace_back(begin, horizon_);
    return out;
  }

  friend bool operator==(const DyingSchedule& a, const DyingSchedule& b) {
    return a.experts_ == b.experts_ && a.horizon_ == b.horizon_ &&
           a.death_round_ == b.death_round_;
  }

 private:
  std::size_t experts_;
  std::size_t horizon_;
  std::vector<std::optional<std::size_t>> death_round_;
  std::size_t survivors_ = 0;
  std::vector<std::vector<Expert>> deaths_after_;
  std::vector<std::size_t> nights_;
  std::vector<std::vector<Expert>> deaths_by_night_;
};

// A permutation of the K initial experts. It plays its first alive element.
class Ordering {
 public:
  explicit Ordering(std::vector<Expert> perm) : perm_(std::move(perm)) {
    std::vector<char> seen(perm_.size(), 0);
    for (Expert e : perm_) {
      if (e < 0 || static_cast<std::size_t>(e) >= perm_.size() ||
          seen[static_cast<std::size_t>(e)])
        throw ValidationError("ordering is not a permutation of 0..K-1");
      seen[static_cast<std::size_t>(e)] = 1;
    }
  }
  static Ordering identity(std::size_t k) {
    std::vector<Expert> p(k);
    std::iota(p.begin(), p.end(), 0);
    return Ordering(std::move(p));
  }

  const std::vector<Expert>& perm() const { return perm_; }
  std::size_t size() const { return perm_.size(); }
  Expert operator[](std::size_t i) const { return perm_[i]; }

  friend auto operator<=>(const Ordering&, const Ordering&) = default;

 private:
  std::vector<Expert> perm_;
};

struct Behavior {
  std::vector<Expert> plays;
  friend auto operator<=>(const Behavior&, const Behavior&) = default;
};

// Named per-round diagnostic column (AdaHedge gaps, regime flags, ...).
struct Trace {
  std::string name;
  std::vector<double> values;
};

struct RunRecord {
  std::size_t horizon = 0;
  std::size_t experts = 0;
  std::vector<double> distributions;  // T x K, row-major
  std::vector<double> learner_loss;   // per round p_t . l_t
  std::vector<double> cumulative_loss;
  double best_ordering_loss = 0.0;
  double ranking_regret = 0.0;
  double classical_regret_all = 0.0;    // vs every initial expert
  double classical_regret_alive = 0.0;  // vs experts that never die
  std::vector<Trace> traces;

  std::span<const double> distribution(std::size_t t) const {
    return {distributions.data() + t * experts, experts};
  }
  double total_loss() const {
    return cumulative_loss.empty() ? 0.0 : cumulative_loss.back();
  }
};

// --- operations -------------------------------------------------------------

inline Expert first_alive(const Ordering& order, std::span<const char> alive) {
  for (Expert e : order.perm())
    if (static_cast<std::size_t>(e) < alive.size() &&
        alive[static_cast<std::size_t>(e)])
      return e;
  throw ScheduleViolation("no alive expert in ordering");
}

inline Behavior behavior_of(const Ordering& order,
                            const DyingSchedule& schedule) {
  if (order.size() != schedule.experts())
    throw ValidationError("ordering and schedule disagree on K");
  Behavior b;
  b.plays.reserve(schedule.horizon());
  ExpertMask alive(schedule.experts(), 1);
  Expert current = first_alive(order, alive);
  for (std::size_t t = 0; t < schedule.horizon(); ++t) {
    b.plays.push_back(current);
    bool changed = false;
    for (Expert j : schedule.deaths_after(t)) {
      alive[static_cast<std::size_t>(j)] = 0;
      changed = true;
    }
    if (changed) current = first_alive(order, alive);
  }
  return b;
}

// A * prod_s (d_s + 1): the number of orderings with pairwise distinct
// behaviors for a schedule with d_s deaths on night s and A survivors.
inline std::uint64_t count_effective(std::span<const std::size_t> deaths_per_night,
                                     std::size_t survivors) {
  if (survivors == 0)
    throw ValidationError("count_effective needs at least one survivor");
  std::uint64_t f = survivors;
  for (std::size_t d : deaths_per_night) {
    if (d == 0) throw ValidationError("a night must have at least one death");
    if (f > std::numeric_limits<std::uint64_t>::max() / (d + 1))
      throw CapacityError("effective ordering count overflows 64 bits");
    f *= d + 1;
  }
  return f;
}

inline std::uint64_t count_effective(const DyingSchedule& schedule) {
  const auto d = schedule.deaths_per_night();
  return count_effective(d, schedule.survivors());
}

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;

// One ordering per realizable behavior. Built backwards over nights: the set
// for nights s..m is every ordering for nights s+1..m, plus each expert dying
// on night s prepended to every such ordering. Orderings are then padded with
// the unused experts in ascending order.
inline std::vector<Ordering> enumerate_effective(
    const DyingSchedule& schedule,
    std::uint64_t cap = kDefaultEnumerationCap) {
  const std::uint64_t count = count_effective(schedule);
  if (count > cap)
    throw CapacityError("effective set has " + std::to_string(count) +
                        " orderings, cap is " + std::to_string(cap));
  const std::size_t k = schedule.experts();
  std::vector<std::vector<Expert>> prefixes;
  for (std::size_t i = 0; i < k; ++i)
    if (!schedule.death_round(static_cast<Expert>(i)))
      prefixes.push_back({static_cast<Expert>(i)});
  const auto& nights = schedule.deaths_by_night();
  for (auto night = nights.rbegin(); night != nights.rend(); ++night) {
    std::vector<std::vector<Expert>> next;
    next.reserve(prefixes.size() * (night->size() + 1));
    for (Expert e : *night) {
      for (const auto& tail : prefixes) {
        std::vector<Expert> p;
        p.reserve(tail.size() + 1);
        p.push_back(e);
        p.insert(p.end(), tail.begin(), tail.end());
        next.push_back(std::move(p));
      }
    }
    for (auto& tail : prefixes) next.push_back(std::move(tail));
    prefixes = std::move(next);
  }
  std::vector<Ordering> out;
  out.reserve(prefixes.size());
  for (auto& p : prefixes) {
    std::vector<char> used(k, 0);
    for (Expert e : p) used[static_cast<std::size_t>(e)] = 1;
    for (std::size_t i = 0; i < k; ++i)
      if (!used[i]) p.push_back(static_cast<Expert>(i));
    out.emplace_back(std::move(p));
  }
  return out;
}

struct BestOrdering {
  double loss = 0.0;
  Behavior witness;
};

// min over all orderings of their cumulative loss, by dynamic programming over
// days. An optimal behavior keeps one expert until it dies and may then switch
// to any alive expert, so the state is (day, current expert). Ties resolve to
// the lexicographically smallest behavior.
inline BestOrdering best_ordering_loss(const LossStream& losses,
                                       const DyingSchedule& schedule) {
  if (losses.experts() != schedule.experts() ||
      losses.horizon() != schedule.horizon())
    throw ValidationError("loss stream and schedule dimensions differ");
  const std::size_t k = schedule.experts();
  const auto days = schedule.days();
  const std::size_t n_days = days.size();
  constexpr double kNone = std::numeric_limits<double>::infinity();

  // value[s][i]: best loss from the start of day s onward while playing i.
  std::vector<std::vector<double>> value(n_days, std::vector<double>(k, kNone));
  std::vector<double> continuation(n_days, kNone);  // min over value[s]
  for (std::size_t s = n_days; s-- > 0;) {
    const auto [begin, end] = days[s];
    for (std::size_t i = 0; i < k; ++i) {
      const auto e = static_cast<Expert>(i);
      if (!schedule.alive(e, begin)) continue;
      double v = losses.segment_loss(e, begin, end);
      if (s + 1 < n_days)
        v += schedule.alive(e, end) ? value[s + 1][i] : continuation[s + 1];
      value[s][i] = v;
      continuation[s] = std::min(continuation[s], v);
    }
  }

  BestOrdering best;
  best.loss = continuation[0];
  best.witness.plays.reserve(schedule.horizon());
  auto pick = [&](std::size_t s) {
    for (std::size_t i = 0; i < k; ++i)
      if (value[s][i] == continuation[s]) return static_cast<Expert>(i);
    throw Error("best_ordering_loss: no minimizer");  // unreachable
  };
  Expert current = pick(0);
  for (std::size_t s = 0; s < n_days; ++s) {
    const auto [begin, end] = days[s];
    if (s > 0 && !schedule.alive(current, begin)) current = pick(s);
    for (std::size_t t = begin; t < end; ++t) best.witness.plays.push_back(current);
  }
  return best;
}

inline constexpr double kMassTolerance = 1e-12;

// Fills a RunRecord from the learner's per-round distributions (T x K,
// row-major).
inline RunRecord regret_report(std::vector<double> distributions,
                               const LossStream& losses,
                               const DyingSchedule& schedule) {
  const std::size_t T = losses.horizon();
  const std::size_t K = losses.experts();
  if (schedule.experts() != K || schedule.horizon() != T)
    throw ValidationError("loss stream and schedule dimensions differ");
  if (distributions.size() != T * K)
    throw ValidationError("distributions are not T x K");

  RunRecord r;
  r.horizon = T;
  r.experts = K;
  r.distributions = std::move(distributions);
  r.learner_loss.resize(T);
  r.cumulative_loss.resize(T);
  double total = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const auto p = r.distribution(t);
    double sum = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      if (!(p[i] >= -kMassTolerance))
        throw ContractViolation("negative or NaN probability at round " +
                                std::to_string(t));
      if (!schedule.alive(static_cast<Expert>(i), t) && p[i] > kMassTolerance)
        throw ContractViolation("mass " + std::to_string(p[i]) +
                                " on dead expert " + std::to_string(i) +
                                " at round " + std::to_string(t));
      sum += p[i];
    }
    if (std::abs(sum - 1.0) > kMassTolerance)
      throw ContractViolation("distribution at round " + std::to_string(t) +
                              " sums to " + std::to_string(sum));
    r.learner_loss[t] = 0.0;
    for (std::size_t i = 0; i < K; ++i) r.learner_loss[t] += p[i] * losses(t, static_cast<Expert>(i));
    total += r.learner_loss[t];
    r.cumulative_loss[t] = total;
  }

  r.best_ordering_loss = best_ordering_loss(losses, schedule).loss;
  r.ranking_regret = total - r.best_ordering_loss;

  double best_all = std::numeric_limits<double>::infinity();
  double best_alive = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < K; ++i) {
    const auto e = static_cast<Expert>(i);
    const double L = losses.segment_loss(e, 0, T);
    best_all = std::min(best_all, L);
    if (!schedule.death_round(e)) best_alive = std::min(best_alive, L);
  }
  r.classical_regret_all = total - best_all;
  r.classical_regret_alive = total - best_alive;
  return r;
}

}  // namespace dyexp
