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

// Brute-force ground truth. Everything here keeps one weight per ordering and
// is only meant for K <= 9.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "dyexp/adahedge.hpp"
#include "dyexp/core.hpp"
#include "dyexp/dying_learners.hpp"
#include "dyexp/error.hpp"
#include "dyexp/hedge.hpp"
#include "dyexp/learner.hpp"
#include "dyexp/numeric.hpp"

namespace dyexp::oracle {

inline constexpr std::uint64_t kDefaultCap = 1'000'000;

// All K! permutations in lexicographic order.
inline std::vector<Ordering> all_orderings(std::size_t experts,
                                           std::uint64_t cap = kDefaultCap) {
  std::uint64_t n = 1;
  for (std::size_t k = 2; k <= experts; ++k) {
    n *= k;
    if (n > cap)
      throw CapacityError(std::to_string(experts) + "! orderings exceed the cap of " +
                          std::to_string(cap));
  }
  std::vector<Expert> p(experts);
  std::iota(p.begin(), p.end(), 0);
  std::vector<Ordering> out;
  out.reserve(n);
  do out.emplace_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

struct BehaviorGroups {
  std::size_t count = 0;
  std::vector<Ordering> representatives;   // first ordering of each group
  std::vector<std::uint64_t> multiplicity;  // group sizes, same order
  std::vector<Behavior> behaviors;
};

// Groups orderings by behavior. Groups are listed in order of first
// appearance.
inline BehaviorGroups group_behaviors(std::span<const Ordering> orderings,
                                      const DyingSchedule& schedule) {
  BehaviorGroups g;
  std::map<Behavior, std::size_t> index;
  for (const auto& o : orderings) {
    auto b = behavior_of(o, schedule);
    auto [it, fresh] = index.try_emplace(b, g.count);
    if (fresh) {
      g.representatives.push_back(o);
      g.multiplicity.push_back(1);
      g.behaviors.push_back(std::move(b));
      ++g.count;
    } else {
      ++g.multiplicity[it->second];
    }
  }
  return g;
}

// Behavior classes of all K! orderings.
inline BehaviorGroups dedup_behaviors(const DyingSchedule& schedule) {
  if (schedule.experts() > 9) throw CapacityError("dedup_behaviors needs K <= 9");
  const auto all = all_orderings(schedule.experts());
  return group_behaviors(all, schedule);
}

// Log-weights from integer multiplicities.
inline std::vector<double> log_prior_from(std::span<const std::uint64_t> multiplicity) {
  std::vector<double> out;
  out.reserve(multiplicity.size());
  for (auto m : multiplicity) out.push_back(std::log(static_cast<double>(m)));
  return out;
}

namespace detail {

// Tracks the expert each ordering currently plays.
class Heads {
 public:
  Heads(std::span<const Ordering> orderings, std::size_t experts)
      : orderings_(orderings), alive_(experts, 1), pos_(orderings.size(), 0) {
    for (const auto& o : orderings)
      if (o.size() != experts) throw ValidationError("ordering has the wrong size");
  }
  Expert operator[](std::size_t n) const { return orderings_[n][pos_[n]]; }
  void kill(std::span<const Expert> dying) {
    for (Expert j : dying) alive_[static_cast<std::size_t>(j)] = 0;
    for (std::size_t n = 0; n < pos_.size(); ++n)
      while (!alive_[static_cast<std::size_t>(orderings_[n][pos_[n]])]) ++pos_[n];
  }
  std::size_t size() const { return pos_.size(); }

 private:
  std::span<const Ordering> orderings_;
  ExpertMask alive_;
  std::vector<std::size_t> pos_;
};

}  // namespace detail

/// Hedge with one weight per ordering. Returns the T x K expert marginals,
/// row-major.
///
/// log_prior gives the initial log-weights (uniform when empty); ln N is their
/// log-sum. Infinite rates, and AdaHedge while its gap is zero, play the
/// lowest-index expert among those played by a minimal-loss ordering.
inline std::vector<double> hedge_over_orderings(std::span<const Ordering> orderings,
                                                const LossStream& losses,
                                                const DyingSchedule& schedule,
                                                const RateSchedule& rate,
                                                std::span<const double> log_prior = {},
                                                std::uint64_t cap = kDefaultCap) {
  const std::size_t N = orderings.size(), K = losses.experts(), T = losses.horizon();
  if (N == 0) throw ValidationError("need at least one ordering");
  if (N > cap)
    throw CapacityError(std::to_string(N) + " orderings exceed the cap of " +
                        std::to_string(cap));
  if (schedule.experts() != K || schedule.horizon() != T)
    throw ValidationError("loss stream and schedule dimensions differ");
  if (!log_prior.empty() && log_prior.size() != N)
    throw ValidationError("prior and ordering set differ in size");

  std::vector<double> log_w(N, 0.0);
  if (!log_prior.empty()) std::copy(log_prior.begin(), log_prior.end(), log_w.begin());
  const double log_n = log_sum_exp(log_w);
  std::vector<double> cum(N, 0.0);
  detail::Heads heads(orderings, K);
  double gap = 0.0;

  std::vector<double> out(T * K, 0.0);
  std::vector<double> ell(N);
  for (std::size_t t = 0; t < T; ++t) {
    const auto l = losses.round(t);
    for (std::size_t n = 0; n < N; ++n) ell[n] = l[static_cast<std::size_t>(heads[n])];

    bool leader_round = rate.kind() == RateSchedule::Kind::infinite;
    double eta = 0.0;
    if (rate.kind() == RateSchedule::Kind::adahedge) {
      leader_round = gap <= 0.0;
      if (!leader_round) eta = log_n / gap;
    } else if (!leader_round) {
      eta = rate.at(t + 1, log_n);
    }

    double* p = out.data() + t * K;
    double best_before = kInf;
    for (double c : cum) best_before = std::min(best_before, c);
    if (leader_round) {
      Expert lead = -1;
      for (std::size_t n = 0; n < N; ++n)
        if (cum[n] == best_before && (lead < 0 || heads[n] < lead)) lead = heads[n];
      p[static_cast<std::size_t>(lead)] = 1.0;
    } else {
      const double z = log_sum_exp(log_w);
      for (std::size_t n = 0; n < N; ++n)
        p[static_cast<std::size_t>(heads[n])] += std::exp(log_w[n] - z);
    }

    double h = 0.0;
    for (std::size_t i = 0; i < K; ++i) h += p[i] * l[i];
    for (std::size_t n = 0; n < N; ++n) cum[n] += ell[n];

    if (rate.kind() == RateSchedule::Kind::adahedge) {
      double m;
      if (leader_round) {
        double best_after = kInf;
        for (double c : cum) best_after = std::min(best_after, c);
        m = best_after - best_before;
      } else {
        std::vector<double> shifted(N);
        for (std::size_t n = 0; n < N; ++n) shifted[n] = log_w[n] - eta * ell[n];
        m = -(log_sum_exp(shifted) - log_sum_exp(log_w)) / eta;
      }
      gap += std::max(0.0, h - m);
    }
    if (!leader_round) {
      double hi = -kInf;
      for (std::size_t n = 0; n < N; ++n) {
        log_w[n] -= eta * ell[n];
        hi = std::max(hi, log_w[n]);
      }
      for (double& v : log_w) v -= hi;
    }

    heads.kill(schedule.deaths_after(t));
  }
  return out;
}

// L*_t for every round: the smallest cumulative loss of any ordering in the
// set through the end of round t.
inline std::vector<double> best_ordering_trace(std::span<const Ordering> orderings,
                                               const LossStream& losses,
                                               const DyingSchedule& schedule) {
  detail::Heads heads(orderings, losses.experts());
  std::vector<double> cum(orderings.size(), 0.0), out;
  for (std::size_t t = 0; t < losses.horizon(); ++t) {
    const auto l = losses.round(t);
    double best = kInf;
    for (std::size_t n = 0; n < cum.size(); ++n) {
      cum[n] += l[static_cast<std::size_t>(heads[n])];
      best = std::min(best, cum[n]);
    }
    out.push_back(best);
    heads.kill(schedule.deaths_after(t));
  }
  return out;
}

// --- certification ----------------------------------------------------------

struct CertifyReport {
  double max_gap = 0.0;
  double tol = 0.0;
  bool pass = true;
  std::optional<std::size_t> first_divergent_round;
  std::vector<double> learner_row;  // at the first divergent round
  std::vector<double> oracle_row;
  std::string snapshot;             // learner state before that round's play

  std::string to_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "result: " << (pass ? "PASS" : "FAIL") << "\nmax_gap: " << max_gap
       << "\ntol: " << tol << "\n";
    if (first_divergent_round) {
      os << "first_divergent_round: " << *first_divergent_round << "\nlearner:";
      for (double v : learner_row) os << ' ' << v;
      os << "\noracle:";
      for (double v : oracle_row) os << ' ' << v;
      os << "\nstate: " << snapshot << "\n";
    }
    return os.str();
  }
};

namespace detail {

struct Comparer {
  std::span<const double> oracle;
  std::size_t K;
  double tol;
  CertifyReport report;

  void operator()(std::size_t t, std::span<const double> p, const OnlineLearner& learner) {
    if (p.size() != K) throw ValidationError("learner played a distribution of the wrong size");
    const auto row = oracle.subspan(t * K, K);
    double gap = 0.0;
    for (std::size_t i = 0; i < K; ++i) gap = std::max(gap, std::abs(p[i] - row[i]));
    if (!(gap <= report.max_gap)) report.max_gap = gap;  // also catches NaN
    if (!(gap <= tol) && !report.first_divergent_round) {
      report.pass = false;
      report.first_divergent_round = t;
      report.learner_row.assign(p.begin(), p.end());
      report.oracle_row.assign(row.begin(), row.end());
      report.snapshot = learner.snapshot();
    }
  }
};

}  // namespace detail

/// Drives learner through the instance and compares every played
/// distribution with the oracle's marginals.
inline CertifyReport certify(OnlineLearner& learner, const LossStream& losses,
                             const DyingSchedule& schedule,
                             std::span<const double> oracle_marginals, double tol) {
  const std::size_t K = losses.experts();
  if (oracle_marginals.size() != losses.horizon() * K || learner.experts() != K)
    throw ValidationError("oracle marginals do not match the instance");
  detail::Comparer cmp{oracle_marginals, K, tol, {}};
  cmp.report.tol = tol;
  simulate(learner, losses, schedule, cmp);
  return cmp.report;
}

// Same, with multi-death nights serialized through dummy rounds. The oracle
// covers the original rounds only.
inline CertifyReport certify_expanded(OnlineLearner& learner,
                                      const DummyExpansion& expansion,
                                      std::span<const double> oracle_marginals,
                                      double tol) {
  const std::size_t K = expansion.losses.experts();
  std::size_t original = 0;
  for (const auto& r : expansion.original_round) original += r ? 1 : 0;
  if (oracle_marginals.size() != original * K || learner.experts() != K)
    throw ValidationError("oracle marginals do not match the instance");
  detail::Comparer cmp{oracle_marginals, K, tol, {}};
  cmp.report.tol = tol;
  for (std::size_t e = 0; e < expansion.losses.horizon(); ++e) {
    const auto p = learner.play();
    if (const auto& r = expansion.original_round[e]) {
      cmp(*r, p, learner);
      learner.observe(expansion.losses.round(e));
    } else {
      learner.observe_dummy();
    }
    for (Expert j : expansion.schedule.deaths_after(e)) learner.on_death(j);
  }
  return cmp.report;
}

}  // namespace dyexp::oracle
