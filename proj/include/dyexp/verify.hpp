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

// Randomized equivalence suites: fast learners against the brute-force oracle.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dyexp/core.hpp"
#include "dyexp/dying_learners.hpp"
#include "dyexp/ftl.hpp"
#include "dyexp/hedge.hpp"
#include "dyexp/oracle.hpp"

namespace dyexp {

struct SuiteConfig {
  std::size_t k_max = 6;
  std::size_t trials = 50;  // per K for the oracle suites, total otherwise
  double tol = 1e-9;
  std::uint64_t seed = 1;
  std::size_t max_horizon = 50;
};

struct SuiteResult {
  std::string suite;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double max_gap = 0.0;
  std::vector<std::string> reports;  // one per failure, capped

  bool pass() const { return cases > 0 && failures == 0; }
  std::string summary() const {
    std::ostringstream os;
    os.precision(6);
    os << suite << ": " << (pass() ? "PASS" : "FAIL") << " cases=" << cases
       << " failures=" << failures << " max_gap=" << max_gap;
    return os.str();
  }
};

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"thm1", "thm7", "thm8", "dummy", "ftl-lstar"};
  return names;
}

// --- random instances -------------------------------------------------------

inline LossStream random_losses(std::size_t T, std::size_t K, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(T * K);
  for (double& x : v) x = u(rng);
  return LossStream(T, K, std::move(v));
}

// One death per night, on distinct rounds; 0..min(K-1, T-1) deaths.
inline DyingSchedule random_single_death_schedule(std::size_t K, std::size_t T,
                                                  std::mt19937_64& rng) {
  if (T < 2) return DyingSchedule::none(K, T);
  const std::size_t max_d = std::min(K - 1, T - 1);
  const std::size_t d = std::uniform_int_distribution<std::size_t>(0, max_d)(rng);
  std::vector<Expert> experts(K);
  std::iota(experts.begin(), experts.end(), 0);
  std::shuffle(experts.begin(), experts.end(), rng);
  std::vector<std::size_t> rounds(T - 1);
  std::iota(rounds.begin(), rounds.end(), 1);
  std::shuffle(rounds.begin(), rounds.end(), rng);
  std::vector<std::optional<std::size_t>> death(K);
  for (std::size_t k = 0; k < d; ++k) death[static_cast<std::size_t>(experts[k])] = rounds[k];
  return DyingSchedule(K, T, std::move(death));
}

// Deaths drawn from a few candidate rounds so that nights often carry several
// deaths.
inline DyingSchedule random_multi_death_schedule(std::size_t K, std::size_t T,
                                                 std::mt19937_64& rng) {
  if (T < 2) return DyingSchedule::none(K, T);
  std::uniform_int_distribution<std::size_t> pick_round(1, T - 1);
  std::vector<std::size_t> candidates;
  const std::size_t n_candidates = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
  for (std::size_t c = 0; c < n_candidates; ++c) candidates.push_back(pick_round(rng));
  std::vector<Expert> experts(K);
  std::iota(experts.begin(), experts.end(), 0);
  std::shuffle(experts.begin(), experts.end(), rng);
  const std::size_t d = std::uniform_int_distribution<std::size_t>(0, K - 1)(rng);
  std::vector<std::optional<std::size_t>> death(K);
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  for (std::size_t k = 0; k < d; ++k)
    death[static_cast<std::size_t>(experts[k])] = candidates[pick(rng)];
  return DyingSchedule(K, T, std::move(death));
}

// Cycles through the rate families the learners support.
inline RateSchedule random_rate(std::size_t trial, std::mt19937_64& rng) {
  switch (trial % 3) {
    case 0: return RateSchedule::fixed(std::uniform_real_distribution<double>(0.05, 3.0)(rng));
    case 1: return RateSchedule::anytime(8.0);
    default: return RateSchedule::adahedge();
  }
}

namespace detail {

inline std::mt19937_64 trial_rng(const SuiteConfig& cfg, std::uint64_t salt,
                                 std::size_t k, std::size_t trial) {
  std::seed_seq seq{cfg.seed, salt, static_cast<std::uint64_t>(k),
                    static_cast<std::uint64_t>(trial)};
  return std::mt19937_64(seq);
}

inline void record(SuiteResult& r, const oracle::CertifyReport& rep,
                   const std::string& label) {
  ++r.cases;
  r.max_gap = std::max(r.max_gap, rep.max_gap);
  if (!rep.pass) {
    ++r.failures;
    if (r.reports.size() < 5) r.reports.push_back(label + "\n" + rep.to_text());
  }
}

inline std::string describe_case(std::size_t K, std::size_t T, const DyingSchedule& s,
                                 const RateSchedule& rate) {
  std::ostringstream os;
  os << "K=" << K << " T=" << T << " rate=" << rate.describe() << " deaths=[";
  for (std::size_t i = 0; i < K; ++i) {
    const auto& d = s.death_round(static_cast<Expert>(i));
    os << (i ? " " : "") << (d ? std::to_string(*d) : "-");
  }
  os << "]";
  return os.str();
}

}  // namespace detail

// Counting: A * prod (d_s + 1) equals the number of distinct behaviors among
// all K! orderings. Also checks the no-death value and the 2^(K-1) maximum.
inline SuiteResult verify_counting(const SuiteConfig& cfg) {
  SuiteResult r;
  r.suite = "thm1";
  const std::size_t k_max = std::min<std::size_t>(cfg.k_max, 7);
  auto fail = [&](const std::string& msg) {
    ++r.failures;
    if (r.reports.size() < 5) r.reports.push_back(msg);
  };
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    auto rng = detail::trial_rng(cfg, 1, 0, trial);
    const std::size_t K = std::uniform_int_distribution<std::size_t>(2, k_max)(rng);
    const std::size_t T = std::uniform_int_distribution<std::size_t>(2, cfg.max_horizon)(rng);
    const auto s = trial % 2 ? random_multi_death_schedule(K, T, rng)
                             : random_single_death_schedule(K, T, rng);
    const auto groups = oracle::dedup_behaviors(s);
    const auto f = count_effective(s);
    ++r.cases;
    if (groups.count != f)
      fail(detail::describe_case(K, T, s, RateSchedule::fixed(0)) +
           " dedup=" + std::to_string(groups.count) + " formula=" + std::to_string(f));
    if (f > (std::uint64_t{1} << (K - 1)))
      fail("count above 2^(K-1) for K=" + std::to_string(K));
  }
  for (std::size_t K = 1; K <= k_max; ++K) {
    ++r.cases;
    if (count_effective(std::span<const std::size_t>{}, K) != K)
      fail("f({}, A) != A for A=" + std::to_string(K));
  }
  for (std::size_t K = 3; K <= k_max; ++K) {
    std::vector<std::optional<std::size_t>> death(K);
    for (std::size_t i = 0; i + 1 < K; ++i) death[i] = i + 1;
    const DyingSchedule s(K, K, std::move(death));
    ++r.cases;
    const auto n = oracle::dedup_behaviors(s).count;
    if (n != (std::uint64_t{1} << (K - 1)) || count_effective(s) != n)
      fail("maximum 2^(K-1) not attained for K=" + std::to_string(K));
  }
  return r;
}

// HPU against Hedge over all K! orderings.
inline SuiteResult verify_hpu(const SuiteConfig& cfg) {
  SuiteResult r;
  r.suite = "thm7";
  for (std::size_t K = 2; K <= cfg.k_max; ++K) {
    const auto all = oracle::all_orderings(K);
    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
      auto rng = detail::trial_rng(cfg, 7, K, trial);
      const std::size_t T = std::uniform_int_distribution<std::size_t>(2, cfg.max_horizon)(rng);
      const auto losses = random_losses(T, K, rng);
      const auto s = random_single_death_schedule(K, T, rng);
      const auto rate = random_rate(trial, rng);
      const auto marg = oracle::hedge_over_orderings(all, losses, s, rate);
      HpuLearner hpu(K, rate);
      detail::record(r, oracle::certify(hpu, losses, s, marg, cfg.tol),
                     detail::describe_case(K, T, s, rate));
    }
  }
  return r;
}

/// HPK against Hedge over the effective orderings.
///
/// Even trials use single-death schedules and the effective set itself. Odd
/// trials use multi-death nights: HPK runs on the dummy-expanded instance and
/// the oracle runs on the original schedule over the behavior classes of the
/// expanded effective set, each weighted by its multiplicity.
inline SuiteResult verify_hpk(const SuiteConfig& cfg) {
  SuiteResult r;
  r.suite = "thm8";
  for (std::size_t K = 2; K <= cfg.k_max; ++K) {
    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
      auto rng = detail::trial_rng(cfg, 8, K, trial);
      const std::size_t T = std::uniform_int_distribution<std::size_t>(2, cfg.max_horizon)(rng);
      const auto losses = random_losses(T, K, rng);
      const auto rate = random_rate(trial / 2, rng);
      if (trial % 2 == 0) {
        const auto s = random_single_death_schedule(K, T, rng);
        const auto eff = enumerate_effective(s);
        const auto marg = oracle::hedge_over_orderings(eff, losses, s, rate);
        HpkLearner hpk(K, s.dying_order(), rate);
        detail::record(r, oracle::certify(hpk, losses, s, marg, cfg.tol),
                       detail::describe_case(K, T, s, rate));
      } else {
        const auto s = random_multi_death_schedule(K, T, rng);
        const auto ex = preprocess_dummy_rounds(losses, s);
        const auto eff = enumerate_effective(ex.schedule);
        const auto groups = oracle::group_behaviors(eff, s);
        const auto prior = oracle::log_prior_from(groups.multiplicity);
        const auto marg =
            oracle::hedge_over_orderings(groups.representatives, losses, s, rate, prior);
        HpkLearner hpk(K, ex.schedule.dying_order(), rate);
        detail::record(r, oracle::certify_expanded(hpk, ex, marg, cfg.tol),
                       detail::describe_case(K, T, s, rate) + " (expanded)");
      }
    }
  }
  return r;
}

// Multi-death nights: learners on the dummy-expanded instance against the
// oracle applying simultaneous deaths directly. Also checks that the regret
// computed on the expansion equals the original one.
inline SuiteResult verify_dummy(const SuiteConfig& cfg) {
  SuiteResult r;
  r.suite = "dummy";
  const std::size_t k_max = std::min<std::size_t>(cfg.k_max, 6);
  for (std::size_t K = 2; K <= k_max; ++K) {
    const auto all = oracle::all_orderings(K);
    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
      auto rng = detail::trial_rng(cfg, 53, K, trial);
      const std::size_t T = std::uniform_int_distribution<std::size_t>(2, cfg.max_horizon)(rng);
      const auto losses = random_losses(T, K, rng);
      const auto s = random_multi_death_schedule(K, T, rng);
      const auto rate = random_rate(trial, rng);
      const auto ex = preprocess_dummy_rounds(losses, s);
      const auto label = detail::describe_case(K, T, s, rate);

      HpuLearner hpu(K, rate);
      detail::record(r, oracle::certify_expanded(hpu, ex,
                                                 oracle::hedge_over_orderings(all, losses, s, rate),
                                                 cfg.tol),
                     "hpu " + label);

      const auto eff = enumerate_effective(ex.schedule);
      HpkLearner hpk(K, ex.schedule.dying_order(), rate);
      detail::record(r, oracle::certify_expanded(hpk, ex,
                                                 oracle::hedge_over_orderings(eff, losses, s, rate),
                                                 cfg.tol),
                     "hpk " + label);

      // One run over the expansion: regret on all expanded rounds against
      // regret on the original rounds only.
      HpuLearner a(K, rate);
      std::vector<double> all_rounds, original_rounds;
      for (std::size_t e = 0; e < ex.losses.horizon(); ++e) {
        const auto p = a.play();
        all_rounds.insert(all_rounds.end(), p.begin(), p.end());
        if (ex.original_round[e]) {
          original_rounds.insert(original_rounds.end(), p.begin(), p.end());
          a.observe(ex.losses.round(e));
        } else {
          a.observe_dummy();
        }
        for (Expert j : ex.schedule.deaths_after(e)) a.on_death(j);
      }
      const double expanded = regret_report(all_rounds, ex.losses, ex.schedule).ranking_regret;
      const double original = regret_report(original_rounds, losses, s).ranking_regret;
      oracle::CertifyReport reg;
      reg.tol = cfg.tol;
      reg.max_gap = std::abs(expanded - original);
      reg.pass = reg.max_gap <= cfg.tol;
      detail::record(r, reg, "regret " + label);
    }
  }
  return r;
}

// The clamped FTL minimum equals the brute-force best-ordering loss after every
// round, exactly.
inline SuiteResult verify_ftl_lstar(const SuiteConfig& cfg) {
  SuiteResult r;
  r.suite = "ftl-lstar";
  const std::size_t k_max = std::min<std::size_t>(cfg.k_max, 6);
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    auto rng = detail::trial_rng(cfg, 99, 0, trial);
    const std::size_t K = std::uniform_int_distribution<std::size_t>(2, k_max)(rng);
    const std::size_t T = std::uniform_int_distribution<std::size_t>(2, cfg.max_horizon)(rng);
    const auto losses = random_losses(T, K, rng);
    const auto s = trial % 2 ? random_multi_death_schedule(K, T, rng)
                             : random_single_death_schedule(K, T, rng);
    const auto all = oracle::all_orderings(K);
    const auto truth = oracle::best_ordering_trace(all, losses, s);
    FtlState ftl(K);
    oracle::CertifyReport rep;
    rep.tol = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      ftl_dying_step(ftl, losses.round(t), s.deaths_after(t));
      const double gap = std::abs(ftl.best() - truth[t]);
      rep.max_gap = std::max(rep.max_gap, gap);
      if (gap != 0.0 && rep.pass) {
        rep.pass = false;
        rep.first_divergent_round = t;
        rep.learner_row = {ftl.best()};
        rep.oracle_row = {truth[t]};
      }
    }
    detail::record(r, rep, detail::describe_case(K, T, s, RateSchedule::infinite()));
  }
  return r;
}

inline SuiteResult run_suite(const std::string& name, const SuiteConfig& cfg) {
  if (name == "thm1") return verify_counting(cfg);
  if (name == "thm7") return verify_hpu(cfg);
  if (name == "thm8") return verify_hpk(cfg);
  if (name == "dummy") return verify_dummy(cfg);
  if (name == "ftl-lstar") return verify_ftl_lstar(cfg);
  throw ValidationError("unknown suite '" + name + "'");
}

}  // namespace dyexp
