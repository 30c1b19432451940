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

#include "dyexp/adversaries.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace dyexp {
namespace {

AdversaryConfig config(AdversaryKind kind, std::size_t K, std::size_t T, std::size_t m,
                       std::uint64_t seed = 0) {
  AdversaryConfig c;
  c.kind = kind;
  c.experts = K;
  c.horizon = T;
  c.nights = m;
  c.seed = seed;
  return c;
}

double day_loss(const LossStream& l, Expert i, std::pair<std::size_t, std::size_t> day) {
  return l.segment_loss(i, day.first, day.second);
}

TEST(Bernoulli, ExtremeProbabilities) {
  auto c = config(AdversaryKind::bernoulli, 3, 50, 0);
  c.p = 0.0;
  for (double v : generate(c).losses.values()) EXPECT_EQ(v, 0.0);
  c.p = 1.0;
  for (double v : generate(c).losses.values()) EXPECT_EQ(v, 1.0);
  c.p = 1.5;
  EXPECT_THROW(generate(c), ValidationError);
}

TEST(Bernoulli, MeanConcentrates) {
  auto c = config(AdversaryKind::bernoulli, 4, 20000, 0, 11);
  c.p = 0.3;
  const auto inst = generate(c);
  double sum = 0;
  for (double v : inst.losses.values()) sum += v;
  EXPECT_NEAR(sum / 80000.0, 0.3, 0.01);
  EXPECT_EQ(inst.schedule.deaths(), 0u);
}

TEST(Bernoulli, PerExpertMeansConcentrateAcrossSeeds) {
  std::size_t inside = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = generate(config(AdversaryKind::bernoulli, 10, 10000, 0, seed));
    for (std::size_t i = 0; i < 10; ++i) {
      const double mean = inst.losses.segment_loss(Expert(i), 0, 10000) / 10000;
      inside += (mean >= 0.48 && mean <= 0.52) ? 1 : 0;
      ++total;
    }
  }
  EXPECT_GE(double(inside), 0.95 * double(total));
}

TEST(Bernoulli, UsesSuppliedSchedule) {
  auto c = config(AdversaryKind::bernoulli, 3, 10, 0);
  c.schedule = DyingSchedule(3, 10, {4, std::nullopt, std::nullopt});
  EXPECT_EQ(generate(c).schedule.deaths(), 1u);
  c.schedule = DyingSchedule(3, 11, {4, std::nullopt, std::nullopt});
  EXPECT_THROW(generate(c), ValidationError);
}

TEST(Generators, Reproducible) {
  for (auto kind : {AdversaryKind::bernoulli, AdversaryKind::unknown_lb, AdversaryKind::known_lb}) {
    const auto c = config(kind, 6, 60, 2, 5);
    EXPECT_TRUE(generate(c).losses == generate(c).losses);
    EXPECT_TRUE(generate(c).schedule == generate(c).schedule);
    auto d = c;
    d.seed = 6;
    EXPECT_FALSE(generate(c).losses == generate(d).losses);
  }
}

TEST(UnknownOrderLowerBound, DayStructure) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t K = 5, m = 3, T = 43 + seed;  // includes odd day lengths
    const auto inst = generate(config(AdversaryKind::unknown_lb, K, T, m, seed));
    const auto& s = inst.schedule;
    EXPECT_EQ(s.deaths(), m);
    EXPECT_EQ(s.deaths_per_night(), (std::vector<std::size_t>(m, 1)));
    const auto days = s.days();
    ASSERT_EQ(days.size(), m + 1);
    for (std::size_t d = 0; d < days.size(); ++d) {
      const auto [begin, end] = days[d];
      const std::size_t half = (end - begin) / 2;
      // Every alive expert but the day's winner totals half the day; the
      // winner has a loss-free second half and dies unless it is the last day.
      std::size_t winners = 0;
      for (std::size_t i = 0; i < K; ++i) {
        const auto e = Expert(i);
        if (!s.alive(e, begin)) {
          EXPECT_EQ(day_loss(inst.losses, e, days[d]), double(end - begin));
          continue;
        }
        const bool dies = s.death_round(e) && *s.death_round(e) == end;
        const bool winner =
            dies || (d == m && inst.losses.segment_loss(e, begin + half, begin + 2 * half) == 0.0 &&
                     day_loss(inst.losses, e, days[d]) != 0.5 * double(end - begin));
        if (winner) {
          ++winners;
          EXPECT_EQ(inst.losses.segment_loss(e, begin + half, begin + 2 * half), 0.0);
        } else {
          EXPECT_DOUBLE_EQ(day_loss(inst.losses, e, days[d]), 0.5 * double(end - begin));
        }
      }
      EXPECT_LE(winners, 1u);
      if (d < m) { EXPECT_EQ(winners, 1u); }
    }
  }
}

TEST(UnknownOrderLowerBound, DyingExpertHadTheBestFirstHalf) {
  const std::size_t K = 6, m = 4, T = 200;
  const auto inst = generate(config(AdversaryKind::unknown_lb, K, T, m, 3));
  const auto days = inst.schedule.days();
  for (std::size_t d = 0; d < m; ++d) {
    const auto [begin, end] = days[d];
    const std::size_t half = (end - begin) / 2;
    const auto& dying = inst.schedule.deaths_after(end - 1);
    ASSERT_EQ(dying.size(), 1u);
    const double best = inst.losses.segment_loss(dying[0], begin, begin + half);
    for (std::size_t i = 0; i < K; ++i)
      if (inst.schedule.alive(Expert(i), begin)) {
        EXPECT_LE(best, inst.losses.segment_loss(Expert(i), begin, begin + half));
      }
  }
}

TEST(UnknownOrderLowerBound, BestOrderingSumsDailyMinima) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = generate(config(AdversaryKind::unknown_lb, 4, 80, 3, seed));
    double want = 0;
    for (const auto& day : inst.schedule.days()) {
      double lo = 1e9;
      for (std::size_t i = 0; i < 4; ++i)
        if (inst.schedule.alive(Expert(i), day.first))
          lo = std::min(lo, day_loss(inst.losses, Expert(i), day));
      want += lo;
    }
    EXPECT_DOUBLE_EQ(best_ordering_loss(inst.losses, inst.schedule).loss, want);
  }
}

TEST(UnknownOrderLowerBound, NoNights) {
  const auto inst = generate(config(AdversaryKind::unknown_lb, 3, 10, 0));
  EXPECT_EQ(inst.schedule.deaths(), 0u);
  EXPECT_TRUE(inst.dying_order.empty());
}

TEST(UnknownOrderLowerBound, RejectsInfeasibleInputs) {
  EXPECT_THROW(generate(config(AdversaryKind::unknown_lb, 3, 100, 3)), ValidationError);
  EXPECT_THROW(generate(config(AdversaryKind::unknown_lb, 4, 5, 2)), ValidationError);
  EXPECT_NO_THROW(generate(config(AdversaryKind::unknown_lb, 4, 6, 2)));
}

TEST(KnownOrderLowerBound, PairsAndOrder) {
  const std::size_t K = 8, m = 6, T = 90;
  const auto inst = generate(config(AdversaryKind::known_lb, K, T, m, 2));
  EXPECT_EQ(inst.dying_order, (std::vector<Expert>{0, 1, 2, 3}));
  EXPECT_EQ(inst.schedule.dying_order(), inst.dying_order);
  EXPECT_EQ(inst.schedule.deaths_per_night(), (std::vector<std::size_t>{2, 2}));
  const auto days = inst.schedule.days();
  ASSERT_EQ(days.size(), 3u);
  for (std::size_t d = 0; d < 3; ++d)
    for (std::size_t t = days[d].first; t < days[d].second; ++t)
      for (std::size_t i = 0; i < K; ++i)
        if (i / 2 != d) { EXPECT_EQ(inst.losses(t, Expert(i)), 1.0); }
}

TEST(KnownOrderLowerBound, BestOrderingSumsPairMinima) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = generate(config(AdversaryKind::known_lb, 6, 60, 6, seed));
    double want = 0;
    const auto days = inst.schedule.days();
    for (std::size_t d = 0; d < days.size(); ++d)
      want += std::min(day_loss(inst.losses, Expert(2 * d), days[d]),
                       day_loss(inst.losses, Expert(2 * d + 1), days[d]));
    EXPECT_DOUBLE_EQ(best_ordering_loss(inst.losses, inst.schedule).loss, want);
  }
}

TEST(KnownOrderLowerBound, RejectsInfeasibleInputs) {
  EXPECT_THROW(generate(config(AdversaryKind::known_lb, 6, 60, 3)), ValidationError);
  EXPECT_THROW(generate(config(AdversaryKind::known_lb, 6, 60, 0)), ValidationError);
  EXPECT_THROW(generate(config(AdversaryKind::known_lb, 4, 60, 6)), ValidationError);
  EXPECT_THROW(generate(config(AdversaryKind::known_lb, 8, 3, 8)), ValidationError);
  EXPECT_NO_THROW(generate(config(AdversaryKind::known_lb, 2, 1, 2)));
}

TEST(StochasticGap, WarnsWithoutAGap) {
  auto c = config(AdversaryKind::stochastic_gap, 3, 20, 0);
  c.means = {0.2, 0.5, 0.5};
  EXPECT_TRUE(generate(c).warnings.empty());
  c.means = {0.2, 0.2, 0.5};
  ASSERT_EQ(generate(c).warnings.size(), 1u);
  c.means = {0.2, 0.5};
  EXPECT_THROW(generate(c), ValidationError);
  c.means = {0.2, 0.5, -0.1};
  EXPECT_THROW(generate(c), ValidationError);
}

TEST(StochasticGap, MeansConcentrate) {
  auto c = config(AdversaryKind::stochastic_gap, 2, 20000, 0, 4);
  c.means = {0.1, 0.7};
  const auto inst = generate(c);
  EXPECT_NEAR(inst.losses.segment_loss(0, 0, 20000) / 20000, 0.1, 0.01);
  EXPECT_NEAR(inst.losses.segment_loss(1, 0, 20000) / 20000, 0.7, 0.01);
}

}  // namespace
}  // namespace dyexp
