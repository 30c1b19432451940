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

#include "dyexp/ftl.hpp"

#include <gtest/gtest.h>

#include <random>

#include "dyexp/oracle.hpp"
#include "dyexp/verify.hpp"

namespace dyexp {
namespace {

TEST(FtlState, ClampExample) {
  FtlState s(2);
  s.accumulate(std::vector<double>{1, 1});
  s.accumulate(std::vector<double>{1, 1});
  s.accumulate(std::vector<double>{1, 0});
  s.accumulate(std::vector<double>{1, 0});
  s.accumulate(std::vector<double>{1, 1});  // L = (5, 3)
  EXPECT_EQ(s.leader(), 1);
  s.kill(1);
  EXPECT_EQ(s.cumulative()[0], 3.0);
  EXPECT_EQ(s.best(), 3.0);
  EXPECT_EQ(s.leader(), 0);
}

TEST(FtlState, TiesGoToLowestIndex) {
  FtlState s(3);
  EXPECT_EQ(s.leader(), 0);
  s.accumulate(std::vector<double>{0.5, 0.2, 0.2});
  EXPECT_EQ(s.leader(), 1);
}

TEST(FtlState, KillErrors) {
  FtlState s(2);
  s.kill(0);
  EXPECT_THROW(s.kill(0), ScheduleViolation);
  EXPECT_THROW(s.kill(1), ScheduleViolation);
}

TEST(FtlDyingStep, WithoutDeathsIsStandardFtl) {
  std::mt19937_64 rng(1);
  const auto l = random_losses(40, 4, rng);
  FtlState s(4);
  std::vector<double> cum(4, 0.0);
  for (std::size_t t = 0; t < 40; ++t) {
    const auto arg = std::min_element(cum.begin(), cum.end()) - cum.begin();
    EXPECT_EQ(ftl_dying_step(s, l.round(t), {}), arg);
    for (std::size_t i = 0; i < 4; ++i) cum[i] += l(t, Expert(i));
  }
}

TEST(FtlDyingStep, BestEqualsBruteForceEveryRound) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t K = 2 + trial % 5, T = 2 + trial % 40;
    const auto l = random_losses(T, K, rng);
    const auto sch = trial % 2 ? random_multi_death_schedule(K, T, rng)
                               : random_single_death_schedule(K, T, rng);
    const auto all = oracle::all_orderings(K);
    const auto truth = oracle::best_ordering_trace(all, l, sch);
    FtlState s(K);
    for (std::size_t t = 0; t < T; ++t) {
      ftl_dying_step(s, l.round(t), sch.deaths_after(t));
      EXPECT_EQ(s.best(), truth[t]) << "trial " << trial << " round " << t;
    }
    EXPECT_NEAR(s.best(), best_ordering_loss(l, sch).loss, 1e-12);
  }
}

TEST(FtlLearner, DeterministicMeansHaveRegretAtMostOne) {
  std::vector<double> v;
  for (int t = 0; t < 100; ++t) v.insert(v.end(), {0.0, 1.0});
  FtlLearner f(2);
  const auto r = simulate(f, LossStream(100, 2, v), DyingSchedule::none(2, 100));
  EXPECT_LE(r.ranking_regret, 1.0);
}

TEST(FtlLearner, PlaysClampedLeaderAfterDeath) {
  // e1 leads, then dies; e0 and e2 are tied on raw loss but the clamp makes
  // both equal to e1's loss, so the lowest index (e0) plays.
  const LossStream l(3, 3, {0.9, 0.0, 0.9,
                            0.0, 0.0, 0.0,
                            0.0, 1.0, 0.0});
  FtlLearner f(3);
  const auto r = simulate(f, l, DyingSchedule(3, 3, {std::nullopt, 2, std::nullopt}));
  EXPECT_EQ(r.distribution(1)[1], 1.0);
  EXPECT_EQ(r.distribution(2)[0], 1.0);
  EXPECT_EQ(f.state().cumulative()[2], 0.0);
}

}  // namespace
}  // namespace dyexp
