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
#include <optional>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "dyexp/adahedge.hpp"
#include "dyexp/core.hpp"
#include "dyexp/learner.hpp"
#include "dyexp/numeric.hpp"

namespace dyexp {

class RateSchedule {
 public:
  enum class Kind { fixed, anytime, adahedge, infinite };

  static RateSchedule fixed(double eta) {
    if (!(eta >= 0.0) || !std::isfinite(eta))
      throw ValidationError("fixed learning rate must be finite and >= 0");
    return RateSchedule(Kind::fixed, eta, std::nullopt);
  }
  // eta_t = sqrt(c ln N / t). log_size overrides ln N when set.
  static RateSchedule anytime(double c = 8.0,
                              std::optional<double> log_size = std::nullopt) {
    if (!(c > 0.0) || !std::isfinite(c))
      throw ValidationError("anytime rate constant must be positive");
    if (log_size && !(*log_size >= 0.0))
      throw ValidationError("anytime rate log-size must be >= 0");
    return RateSchedule(Kind::anytime, c, log_size);
  }
  static RateSchedule adahedge() { return RateSchedule(Kind::adahedge, 0.0, std::nullopt); }
  static RateSchedule infinite() { return RateSchedule(Kind::infinite, kInf, std::nullopt); }

  Kind kind() const { return kind_; }
  double value() const { return value_; }
  const std::optional<double>& log_size_override() const { return log_size_; }

  // Rate for 1-based round t of a learner over N comparators (ln N given).
  double at(std::size_t t, double log_size) const {
    switch (kind_) {
      case Kind::fixed:
        return value_;
      case Kind::anytime:
        return std::sqrt(value_ * log_size_.value_or(log_size) /
                         static_cast<double>(std::max<std::size_t>(t, 1)));
      case Kind::infinite:
        return kInf;
      case Kind::adahedge:
        break;
    }
    throw ContractViolation("adahedge rates come from the gap, not the clock");
  }

  std::string describe() const {
    std::ostringstream os;
    switch (kind_) {
      case Kind::fixed: os << "fixed:" << value_; break;
      case Kind::anytime:
        os << "anytime:" << value_;
        if (log_size_) os << ":logN=" << *log_size_;
        break;
      case Kind::adahedge: os << "adahedge"; break;
      case Kind::infinite: os << "infinite"; break;
    }
    return os.str();
  }

 private:
  RateSchedule(Kind kind, double value, std::optional<double> log_size)
      : kind_(kind), value_(value), log_size_(log_size) {}

  Kind kind_;
  double value_;
  std::optional<double> log_size_;
};

// Non-normalized Hedge weights in natural-log domain.
struct WeightVector {
  std::vector<double> log_w;
};

inline std::vector<double> hedge_play(const WeightVector& w) {
  return softmax(w.log_w);
}

// log_w[i] -= eta * l_i, then subtract the max so the largest weight is 1.
inline WeightVector hedge_update(WeightVector w, std::span<const double> losses,
                                 double eta) {
  if (!(eta >= 0.0) || !std::isfinite(eta))
    throw ContractViolation("hedge_update needs a finite rate >= 0; route "
                            "infinite rates through FTL");
  if (losses.size() != w.log_w.size())
    throw ValidationError("loss vector and weights differ in length");
  double hi = -kInf;
  for (std::size_t i = 0; i < w.log_w.size(); ++i) {
    w.log_w[i] -= eta * losses[i];
    hi = std::max(hi, w.log_w[i]);
  }
  if (std::isfinite(hi))
    for (double& v : w.log_w) v -= hi;
  return w;
}

inline void validate_losses(std::span<const double> losses, std::size_t k) {
  if (losses.size() != k)
    throw ValidationError("expected " + std::to_string(k) + " losses, got " +
                          std::to_string(losses.size()));
  for (double v : losses)
    if (!(v >= 0.0 && v <= 1.0))
      throw ValidationError("loss outside [0,1]");
}

/// Hedge over the K initial experts. Dead experts are masked out and the
/// alive weights renormalized. With reset_on_death set, every night restarts
/// the weights, the rate clock and the AdaHedge gap (Resetting-Hedge).
class HedgeLearner final : public OnlineLearner {
 public:
  HedgeLearner(std::size_t experts, RateSchedule rate, bool reset_on_death = false)
      : rate_(rate),
        reset_on_death_(reset_on_death),
        weights_{std::vector<double>(experts, 0.0)},
        alive_(experts, 1),
        alive_count_(experts),
        since_reset_(experts, 0.0),
        ada_(std::log(static_cast<double>(experts))) {
    if (experts < 1) throw ValidationError("Hedge needs at least one expert");
  }

  std::size_t experts() const override { return alive_.size(); }

  std::vector<double> play() override {
    if (follows_leader()) {
      std::vector<double> p(alive_.size(), 0.0);
      p[static_cast<std::size_t>(leader())] = 1.0;
      return p;
    }
    return masked_softmax(weights_.log_w, alive_);
  }

  void observe(std::span<const double> losses) override {
    validate_losses(losses, alive_.size());
    ++clock_;
    double eta = 0.0;
    if (rate_.kind() == RateSchedule::Kind::adahedge) {
      const double play_rate = adahedge_rate(ada_);
      const auto p = play();
      const double h = dot(p, losses);
      double m;
      if (play_rate == kInf) {
        const double before = since_reset_[static_cast<std::size_t>(leader())];
        charge(losses);
        m = since_reset_[static_cast<std::size_t>(leader())] - before;
      } else {
        m = mix_loss(p, losses, play_rate);
        charge(losses);
        eta = play_rate;
      }
      ada_.record(h, m);
    } else {
      charge(losses);
      if (rate_.kind() != RateSchedule::Kind::infinite)
        eta = rate_.at(clock_, std::log(static_cast<double>(alive_.size())));
    }
    std::vector<double> masked(losses.begin(), losses.end());
    for (std::size_t i = 0; i < masked.size(); ++i)
      if (!alive_[i]) masked[i] = 0.0;
    weights_ = hedge_update(std::move(weights_), masked, eta);
  }

  void on_death(Expert j) override {
    const auto jj = static_cast<std::size_t>(j);
    if (jj >= alive_.size() || !alive_[jj])
      throw ScheduleViolation("expert " + std::to_string(j) + " is not alive");
    if (alive_count_ == 1)
      throw ScheduleViolation("cannot kill the last alive expert");
    alive_[jj] = 0;
    --alive_count_;
    weights_.log_w[jj] = -kInf;
    if (reset_on_death_) {
      for (std::size_t i = 0; i < alive_.size(); ++i) {
        weights_.log_w[i] = alive_[i] ? 0.0 : -kInf;
        since_reset_[i] = 0.0;
      }
      clock_ = 0;
      ada_ = AdaHedgeState(ada_.log_size());
    }
  }

  std::string snapshot() const override {
    std::ostringstream os;
    os << "hedge clock=" << clock_ << " log_w=";
    for (std::size_t i = 0; i < alive_.size(); ++i)
      os << (i ? "," : "") << weights_.log_w[i];
    return os.str();
  }

  const WeightVector& weights() const { return weights_; }

 private:
  bool follows_leader() const {
    return rate_.kind() == RateSchedule::Kind::infinite ||
           (rate_.kind() == RateSchedule::Kind::adahedge && adahedge_rate(ada_) == kInf);
  }
  Expert leader() const {
    Expert arg = -1;
    for (std::size_t i = 0; i < alive_.size(); ++i)
      if (alive_[i] && (arg < 0 || since_reset_[i] < since_reset_[static_cast<std::size_t>(arg)]))
        arg = static_cast<Expert>(i);
    return arg;
  }
  void charge(std::span<const double> losses) {
    for (std::size_t i = 0; i < alive_.size(); ++i)
      if (alive_[i]) since_reset_[i] += losses[i];
  }

  RateSchedule rate_;
  bool reset_on_death_;
  WeightVector weights_;
  ExpertMask alive_;
  std::size_t alive_count_;
  std::vector<double> since_reset_;
  AdaHedgeState ada_;
  std::size_t clock_ = 0;
};

// Hedge over K experts. masks, when non-empty, gives the alive set per round;
// it must shrink monotonically and never be empty.
inline RunRecord run_hedge(const LossStream& losses, const RateSchedule& rate,
                           std::span<const ExpertMask> masks = {}) {
  std::optional<DyingSchedule> schedule;
  if (masks.empty()) {
    schedule = DyingSchedule::none(losses.experts(), losses.horizon());
  } else {
    if (masks.size() != losses.horizon())
      throw ValidationError("need one alive mask per round");
    schedule = DyingSchedule::from_masks({masks.begin(), masks.end()});
  }
  HedgeLearner learner(losses.experts(), rate);
  return simulate(learner, losses, *schedule);
}

// Runs an independent Hedge per day: uniform weights and a fresh rate clock
// after every night.
inline RunRecord resetting_hedge(const LossStream& losses,
                                 const DyingSchedule& schedule,
                                 const RateSchedule& rate = RateSchedule::anytime(8.0)) {
  HedgeLearner learner(losses.experts(), rate, /*reset_on_death=*/true);
  return simulate(learner, losses, schedule);
}

}  // namespace dyexp
