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

// Hedge on top of several HPU copies, each tuned for a different quantile.
//
// An ordering that uses r distinct experts over the game has at least (K-r)!
// behavioral copies among the K! orderings, i.e. it sits in the
// eps_r = (K-r)!/K! quantile. Copy r runs HPU with
// eta_t = sqrt(8 ln(1/eps_r) / t); a top-level anytime Hedge mixes the copies.

#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dyexp/dying_learners.hpp"
#include "dyexp/hedge.hpp"
#include "dyexp/learner.hpp"

namespace dyexp {

// ln(1/eps_r) = sum_{l<r} ln(K - l)
inline double log_inverse_quantile(std::size_t experts, std::size_t r) {
  double s = 0.0;
  for (std::size_t l = 0; l < r; ++l) s += std::log(static_cast<double>(experts - l));
  return s;
}

// Copies to run: every r in 0..K-1 with full_grid, otherwise the
// exponentially spaced {1, 2, 4, ...} below K plus K-1.
inline std::vector<std::size_t> quantile_grid(std::size_t experts, bool full_grid) {
  if (experts < 2) throw ValidationError("quantile meta-learner needs K >= 2");
  std::vector<std::size_t> r;
  if (full_grid) {
    for (std::size_t i = 0; i < experts; ++i) r.push_back(i);
    return r;
  }
  for (std::size_t v = 1; v < experts; v *= 2) r.push_back(v);
  if (r.back() != experts - 1) r.push_back(experts - 1);
  return r;
}

class QuantileMetaLearner final : public OnlineLearner {
 public:
  explicit QuantileMetaLearner(std::size_t experts, bool full_grid = false)
      : grid_(quantile_grid(experts, full_grid)), top_(grid_.size(), 0.0) {
    for (std::size_t r : grid_)
      copies_.push_back(std::make_unique<HpuLearner>(
          experts, RateSchedule::anytime(8.0, log_inverse_quantile(experts, r))));
  }

  std::size_t experts() const override { return copies_.front()->experts(); }
  const std::vector<std::size_t>& grid() const { return grid_; }

  std::vector<double> play() override {
    refresh();
    const auto q = softmax(top_);
    std::vector<double> p(experts(), 0.0);
    for (std::size_t r = 0; r < copies_.size(); ++r)
      for (std::size_t i = 0; i < p.size(); ++i) p[i] += q[r] * plays_[r][i];
    return p;
  }

  void observe(std::span<const double> losses) override {
    validate_losses(losses, experts());
    refresh();
    ++clock_;
    const double eta = std::sqrt(8.0 * std::log(static_cast<double>(copies_.size())) /
                                 static_cast<double>(clock_));
    double hi = -kInf;
    for (std::size_t r = 0; r < copies_.size(); ++r) {
      top_[r] -= eta * dot(plays_[r], losses);
      hi = std::max(hi, top_[r]);
    }
    for (double& v : top_) v -= hi;
    for (auto& c : copies_) c->observe(losses);
    fresh_ = false;
  }

  void on_death(Expert j) override {
    for (auto& c : copies_) c->on_death(j);
    fresh_ = false;
  }

  std::string snapshot() const override {
    std::string s = "top_log_w=";
    for (std::size_t r = 0; r < top_.size(); ++r)
      s += (r ? "," : "") + std::to_string(top_[r]);
    return s;
  }

  // Distribution of copy r as of the last play().
  std::span<const double> copy_play(std::size_t r) const { return plays_[r]; }
  std::span<const double> top_log_weights() const { return top_; }

 private:
  void refresh() {
    if (fresh_) return;
    plays_.clear();
    for (auto& c : copies_) plays_.push_back(c->play());
    fresh_ = true;
  }

  std::vector<std::size_t> grid_;
  std::vector<std::unique_ptr<HpuLearner>> copies_;
  std::vector<double> top_;
  std::vector<std::vector<double>> plays_;
  bool fresh_ = false;
  std::size_t clock_ = 0;
};

inline RunRecord quantile_meta(const LossStream& losses, const DyingSchedule& schedule,
                               bool full_grid = false) {
  QuantileMetaLearner learner(losses.experts(), full_grid);
  return simulate(learner, losses, schedule);
}

}  // namespace dyexp
