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

#include "dyexp/experiment.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

namespace dyexp {
namespace {

TEST(ParseRate, Forms) {
  EXPECT_EQ(parse_rate("anytime").kind(), RateSchedule::Kind::anytime);
  EXPECT_EQ(parse_rate("adahedge").kind(), RateSchedule::Kind::adahedge);
  const auto f = parse_rate("fixed:0.25");
  EXPECT_EQ(f.kind(), RateSchedule::Kind::fixed);
  EXPECT_EQ(f.value(), 0.25);
  EXPECT_THROW(parse_rate("fixed:"), ValidationError);
  EXPECT_THROW(parse_rate("fixed:abc"), ValidationError);
  EXPECT_THROW(parse_rate("fixed:-1"), ValidationError);
  EXPECT_THROW(parse_rate("slow"), ValidationError);
}

TEST(ParseAdversary, Names) {
  EXPECT_EQ(parse_adversary("gap"), AdversaryKind::stochastic_gap);
  EXPECT_EQ(parse_adversary("unknown-lb"), AdversaryKind::unknown_lb);
  EXPECT_THROW(parse_adversary("file"), ValidationError);
}

TEST(MakeLearner, EveryNameRuns) {
  AdversaryConfig g;
  g.kind = AdversaryKind::known_lb;
  g.experts = 6;
  g.horizon = 60;
  g.nights = 4;
  const auto inst = generate(g);
  for (const auto& name : learner_names()) {
    for (auto base : {GroupBase::unknown_order, GroupBase::known_order}) {
      LearnerSpec spec;
      spec.name = name;
      spec.base = base;
      const auto rec = run_learner(spec, inst);
      EXPECT_EQ(rec.horizon, 60u) << name;
      EXPECT_EQ(rec.distributions.size(), 360u) << name;
    }
  }
  LearnerSpec bad;
  bad.name = "oracle";
  EXPECT_THROW(make_learner(bad, inst), ValidationError);
}

TEST(RunLearner, HpuDefaultRateIsTuned) {
  AdversaryConfig g;
  g.experts = 4;
  g.horizon = 100;
  const auto inst = generate(g);
  LearnerSpec a, b;
  b.rate = hpu_default_rate(4, 100);
  EXPECT_EQ(run_learner(a, inst).distributions, run_learner(b, inst).distributions);
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.learner.name = "hpu";
  c.adversary = "unknown-lb";
  c.generator.experts = 5;
  c.generator.horizon = 200;
  c.generator.nights = 3;
  c.seeds = 12;
  c.base_seed = 40;
  return c;
}

std::string csv(const std::vector<RunRow>& rows) {
  std::ostringstream os;
  write_run_csv(os, rows);
  return os.str();
}

TEST(RunExperiment, RowsInSeedOrder) {
  const auto rows = run_experiment(small_config());
  ASSERT_EQ(rows.size(), 12u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].seed, 40 + i);
    EXPECT_EQ(rows[i].m, 3u);
    EXPECT_NEAR(rows[i].ranking_regret, rows[i].learner_loss - rows[i].best_ordering_loss, 1e-9);
  }
}

TEST(RunExperiment, MIsTheNightCountForSuppliedSchedules) {
  ExperimentConfig c;
  c.adversary = "gap";
  c.generator.experts = 3;
  c.generator.horizon = 20;
  c.generator.nights = 7;  // ignored by this adversary
  c.generator.means = {0.2, 0.5, 0.5};
  c.generator.schedule = DyingSchedule(3, 20, {5, 9, std::nullopt});
  EXPECT_EQ(run_experiment(c).at(0).m, 2u);
}

TEST(RunExperiment, IdenticalAcrossThreadCounts) {
  auto c = small_config();
  c.threads = 1;
  const auto one = csv(run_experiment(c));
  c.threads = 4;
  EXPECT_EQ(one, csv(run_experiment(c)));
  c.threads = 0;
  EXPECT_EQ(one, csv(run_experiment(c)));
}

TEST(WorkerCount, Caps) {
  EXPECT_EQ(worker_count(4, 2), 2u);
  EXPECT_EQ(worker_count(3, 10), 3u);
  EXPECT_EQ(worker_count(5, 0), 1u);
  ::setenv("DYEXP_THREADS", "2", 1);
  EXPECT_EQ(worker_count(8, 10), 2u);
  ::setenv("DYEXP_THREADS", "junk", 1);
  EXPECT_EQ(worker_count(8, 10), 8u);
  ::unsetenv("DYEXP_THREADS");
}

TEST(ParallelFor, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw ValidationError("boom");
                            }),
               ValidationError);
}

TEST(Csv, HeaderAndFormatting) {
  RunRow r;
  r.seed = 3;
  r.T = 10;
  r.K = 2;
  r.m = 1;
  r.learner_loss = 0.1;
  const auto text = csv({r});
  EXPECT_EQ(text.substr(0, text.find('\n')), kRunHeader);
  EXPECT_NE(text.find("3,10,2,1,0.10000000000000001,0,0,0,0"), std::string::npos);
  EXPECT_EQ(format_g17(1.0), "1");
  EXPECT_EQ(std::stod(format_g17(std::numbers::pi)), std::numbers::pi);
}

TEST(RunSweep, OneBlockPerValue) {
  auto c = small_config();
  c.seeds = 3;
  const auto rows = run_sweep(c, "t", {50, 100});
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].param, 50.0);
  EXPECT_EQ(rows[0].run.T, 50u);
  EXPECT_EQ(rows[5].run.T, 100u);
  EXPECT_THROW(run_sweep(c, "q", {1}), ValidationError);
  std::ostringstream os;
  write_sweep_csv(os, rows);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), kSweepHeader);
}

std::map<double, std::vector<double>> power_law(double c, double a) {
  std::map<double, std::vector<double>> s;
  for (double T : {100.0, 1000.0, 10000.0, 100000.0})
    for (int i = 0; i < 30; ++i) s[T].push_back(c * std::pow(T, a) * (1.0 + 0.01 * (i % 3 - 1)));
  return s;
}

TEST(FitExponent, RecoversKnownSlopes) {
  const auto half = fit_exponent(power_law(2.0, 0.5));
  ASSERT_TRUE(half.testable);
  EXPECT_NEAR(half.slope, 0.5, 1e-6);
  EXPECT_LE(half.ci_low, half.slope);
  EXPECT_GE(half.ci_high, half.slope);
  EXPECT_EQ(half.resamples, 1000u);
  const auto one = fit_exponent(power_law(0.3, 1.0));
  EXPECT_NEAR(one.slope, 1.0, 1e-6);
}

TEST(FitExponent, Untestable) {
  auto s = power_law(1.0, 0.5);
  s.erase(s.begin());
  s.erase(s.begin());
  EXPECT_FALSE(fit_exponent(s).testable);
  auto few = power_law(1.0, 0.5);
  few.begin()->second.resize(10);
  EXPECT_FALSE(fit_exponent(few).testable);
  auto neg = power_law(1.0, 0.5);
  for (double& v : neg.begin()->second) v = -1.0;
  const auto f = fit_exponent(neg);
  EXPECT_FALSE(f.testable);
  EXPECT_NE(f.reason.find("non-positive"), std::string::npos);
}

}  // namespace
}  // namespace dyexp
