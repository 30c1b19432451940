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

#include "dyexp/oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dyexp/dying_learners.hpp"
#include "dyexp/hedge.hpp"
#include "dyexp/verify.hpp"

namespace dyexp {
namespace {

using oracle::all_orderings;
using oracle::hedge_over_orderings;

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  EXPECT_EQ(a.size(), b.size());
  double g = 0;
  for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::abs(a[i] - b[i]));
  return g;
}

TEST(AllOrderings, Lexicographic) {
  const auto o = all_orderings(3);
  ASSERT_EQ(o.size(), 6u);
  EXPECT_EQ(o.front().perm(), (std::vector<Expert>{0, 1, 2}));
  EXPECT_EQ(o[1].perm(), (std::vector<Expert>{0, 2, 1}));
  EXPECT_EQ(o.back().perm(), (std::vector<Expert>{2, 1, 0}));
  EXPECT_EQ(all_orderings(1).size(), 1u);
  EXPECT_THROW(all_orderings(7, 1000), CapacityError);
}

TEST(DedupBehaviors, Examples) {
  const auto none = oracle::dedup_behaviors(DyingSchedule::none(4, 5));
  EXPECT_EQ(none.count, 4u);
  for (auto m : none.multiplicity) EXPECT_EQ(m, 6u);

  const auto singles = oracle::dedup_behaviors(DyingSchedule(4, 6, {1, 3, 5, std::nullopt}));
  EXPECT_EQ(singles.count, 8u);
  EXPECT_EQ(std::accumulate(singles.multiplicity.begin(), singles.multiplicity.end(),
                            std::uint64_t{0}),
            24u);

  const auto pair = oracle::dedup_behaviors(DyingSchedule(4, 4, {2, 2, std::nullopt, std::nullopt}));
  EXPECT_EQ(pair.count, 6u);
  EXPECT_THROW(oracle::dedup_behaviors(DyingSchedule::none(10, 2)), CapacityError);
}

TEST(DedupBehaviors, RepresentativesHaveDistinctBehaviors) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t K = 2 + trial % 5, T = 3 + trial;
    const auto s = random_multi_death_schedule(K, T, rng);
    const auto g = oracle::dedup_behaviors(s);
    EXPECT_EQ(g.count, count_effective(s));
    for (std::size_t a = 0; a < g.count; ++a)
      EXPECT_TRUE(behavior_of(g.representatives[a], s) == g.behaviors[a]);
  }
}

TEST(HedgeOverOrderings, NoDeathsEqualsHedge) {
  std::mt19937_64 rng(2);
  for (std::size_t K = 1; K <= 5; ++K) {
    const std::size_t T = 30;
    const auto l = random_losses(T, K, rng);
    const auto s = DyingSchedule::none(K, T);
    // Rates that depend on ln N need it pinned to ln K! on the Hedge side.
    for (const auto& rate : {RateSchedule::fixed(0.7), RateSchedule::fixed(3.0),
                             RateSchedule::anytime(8.0, std::lgamma(double(K) + 1)),
                             RateSchedule::infinite()}) {
      const auto o = hedge_over_orderings(all_orderings(K), l, s, rate);
      HedgeLearner h(K, rate);
      const auto ref = simulate(h, l, s);
      EXPECT_LE(max_abs_diff(o, ref.distributions), 1e-12) << rate.describe();
    }
  }
}

TEST(HedgeOverOrderings, SingleOrderingFollowsItsHead) {
  const auto o = std::vector<Ordering>{Ordering({2, 0, 1})};
  std::mt19937_64 rng(3);
  const auto l = random_losses(6, 3, rng);
  const DyingSchedule s(3, 6, {std::nullopt, std::nullopt, 3});
  const auto p = hedge_over_orderings(o, l, s, RateSchedule::fixed(1.0));
  for (std::size_t t = 0; t < 6; ++t) EXPECT_EQ(p[t * 3 + (t < 3 ? 2 : 0)], 1.0);
}

TEST(HedgeOverOrderings, PermutationEquivariant) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t K = 4, T = 12;
    std::vector<std::size_t> pi(K);
    std::iota(pi.begin(), pi.end(), 0);
    std::shuffle(pi.begin(), pi.end(), rng);
    const auto l = random_losses(T, K, rng);
    const auto s = random_single_death_schedule(K, T, rng);
    std::vector<double> v(T * K);
    std::vector<std::optional<std::size_t>> d(K);
    for (std::size_t i = 0; i < K; ++i) {
      d[pi[i]] = s.death_round(Expert(i));
      for (std::size_t t = 0; t < T; ++t) v[t * K + pi[i]] = l(t, Expert(i));
    }
    const LossStream lp(T, K, v);
    const DyingSchedule sp(K, T, d);
    const auto rate = random_rate(std::size_t(trial), rng);
    // leader tie-breaks depend on labels
    if (rate.kind() == RateSchedule::Kind::adahedge) continue;
    const auto a = hedge_over_orderings(all_orderings(K), l, s, rate);
    const auto b = hedge_over_orderings(all_orderings(K), lp, sp, rate);
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t i = 0; i < K; ++i) EXPECT_NEAR(a[t * K + i], b[t * K + pi[i]], 1e-12);
  }
}

TEST(HedgeOverOrderings, GroupingByBehaviorWithMultiplicities) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t K = 2 + trial % 5, T = 4 + trial;
    const auto l = random_losses(T, K, rng);
    const auto s = random_multi_death_schedule(K, T, rng);
    const auto rate = random_rate(std::size_t(trial), rng);
    const auto all = all_orderings(K);
    const auto g = oracle::group_behaviors(all, s);
    const auto prior = oracle::log_prior_from(g.multiplicity);
    EXPECT_LE(max_abs_diff(hedge_over_orderings(all, l, s, rate),
                           hedge_over_orderings(g.representatives, l, s, rate, prior)),
              1e-12)
        << rate.describe();
  }
}

TEST(HedgeOverOrderings, RejectsBadInput) {
  const auto l = LossStream::zeros(3, 2);
  const auto s = DyingSchedule::none(2, 3);
  const auto rate = RateSchedule::fixed(1.0);
  EXPECT_THROW(hedge_over_orderings(std::vector<Ordering>{}, l, s, rate), ValidationError);
  EXPECT_THROW(hedge_over_orderings(all_orderings(2), l, DyingSchedule::none(2, 4), rate),
               ValidationError);
  const std::vector<double> prior{0.0};
  EXPECT_THROW(hedge_over_orderings(all_orderings(2), l, s, rate, prior), ValidationError);
  EXPECT_THROW(hedge_over_orderings(all_orderings(3), LossStream::zeros(3, 3),
                                    DyingSchedule::none(3, 3), rate, {}, 5),
               CapacityError);
}

TEST(BestOrderingTrace, EndsAtBestOrderingLoss) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t K = 2 + trial % 5, T = 2 + trial;
    const auto l = random_losses(T, K, rng);
    const auto s = random_multi_death_schedule(K, T, rng);
    const auto trace = oracle::best_ordering_trace(all_orderings(K), l, s);
    ASSERT_EQ(trace.size(), T);
    EXPECT_NEAR(trace.back(), best_ordering_loss(l, s).loss, 1e-12);
    for (std::size_t t = 1; t < T; ++t) EXPECT_GE(trace[t], trace[t - 1]);
  }
}

TEST(Certify, ReplayHasZeroGap) {
  std::mt19937_64 rng(7);
  const auto l = random_losses(20, 4, rng);
  const auto s = random_single_death_schedule(4, 20, rng);
  HpuLearner first(4, RateSchedule::anytime(8.0));
  const auto ref = simulate(first, l, s);
  HpuLearner second(4, RateSchedule::anytime(8.0));
  const auto rep = oracle::certify(second, l, s, ref.distributions, 0.0);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.max_gap, 0.0);
  EXPECT_FALSE(rep.first_divergent_round);
}

TEST(Certify, ReportsFirstDivergence) {
  const auto l = LossStream::zeros(3, 2);
  const auto s = DyingSchedule::none(2, 3);
  const std::vector<double> wrong{0.5, 0.5, 0.5, 0.5, 1.0, 0.0};
  HpuLearner learner(2, RateSchedule::fixed(1.0));
  const auto rep = oracle::certify(learner, l, s, wrong, 1e-9);
  EXPECT_FALSE(rep.pass);
  EXPECT_EQ(rep.first_divergent_round, 2u);
  EXPECT_DOUBLE_EQ(rep.max_gap, 0.5);
  EXPECT_NE(rep.to_text().find("FAIL"), std::string::npos);
  EXPECT_NE(rep.to_text().find("first_divergent_round: 2"), std::string::npos);
}

TEST(Certify, DimensionMismatchThrows) {
  const auto l = LossStream::zeros(3, 2);
  const auto s = DyingSchedule::none(2, 3);
  HpuLearner learner(2, RateSchedule::fixed(1.0));
  EXPECT_THROW(oracle::certify(learner, l, s, std::vector<double>(4, 0.5), 1e-9),
               ValidationError);
  HpuLearner three(3, RateSchedule::fixed(1.0));
  EXPECT_THROW(oracle::certify(three, l, s, std::vector<double>(6, 0.5), 1e-9),
               ValidationError);
}

}  // namespace
}  // namespace dyexp
