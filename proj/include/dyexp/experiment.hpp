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

// Monte-Carlo driver: learner factory, seeded replications, CSV rows and the
// log-log exponent fit.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "dyexp/adversaries.hpp"
#include "dyexp/core.hpp"
#include "dyexp/dying_learners.hpp"
#include "dyexp/flipflop.hpp"
#include "dyexp/ftl.hpp"
#include "dyexp/hedge.hpp"
#include "dyexp/instance.hpp"
#include "dyexp/quantile.hpp"

namespace dyexp {

inline const std::vector<std::string>& learner_names() {
  static const std::vector<std::string> names{"hedge", "resetting", "hpu",      "hpk",
                                              "ftl",   "adahedge",  "flipflop", "quantile"};
  return names;
}

inline const std::vector<std::string>& adversary_names() {
  static const std::vector<std::string> names{"bernoulli", "unknown-lb", "known-lb", "gap",
                                              "file"};
  return names;
}

// "fixed:x", "anytime" or "adahedge".
inline RateSchedule parse_rate(const std::string& text) {
  if (text == "anytime") return RateSchedule::anytime(8.0);
  if (text == "adahedge") return RateSchedule::adahedge();
  if (text.rfind("fixed:", 0) == 0) {
    const std::string v = text.substr(6);
    double eta = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), eta);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
      throw ValidationError("bad learning rate '" + text + "'");
    return RateSchedule::fixed(eta);
  }
  throw ValidationError("bad learning rate '" + text +
                        "' (expected fixed:x, anytime or adahedge)");
}

inline AdversaryKind parse_adversary(const std::string& name) {
  if (name == "bernoulli") return AdversaryKind::bernoulli;
  if (name == "unknown-lb") return AdversaryKind::unknown_lb;
  if (name == "known-lb") return AdversaryKind::known_lb;
  if (name == "gap") return AdversaryKind::stochastic_gap;
  throw ValidationError("unknown adversary '" + name + "'");
}

struct LearnerSpec {
  std::string name = "hpu";
  std::optional<RateSchedule> rate;  // learner default when unset
  GroupBase base = GroupBase::unknown_order;
};

// Dying order a known-order learner is given: the generator's when it
// supplies one, otherwise the schedule's.
inline std::vector<Expert> known_order_of(const Instance& inst) {
  return inst.dying_order.empty() ? inst.schedule.dying_order() : inst.dying_order;
}

inline std::unique_ptr<OnlineLearner> make_learner(const LearnerSpec& spec,
                                                   const Instance& inst) {
  const std::size_t K = inst.losses.experts(), T = inst.losses.horizon();
  const auto& n = spec.name;
  if (n == "hedge")
    return std::make_unique<HedgeLearner>(K, spec.rate.value_or(RateSchedule::anytime(8.0)));
  if (n == "resetting")
    return std::make_unique<HedgeLearner>(K, spec.rate.value_or(RateSchedule::anytime(8.0)),
                                          true);
  if (n == "hpu")
    return std::make_unique<HpuLearner>(K, spec.rate.value_or(hpu_default_rate(K, T)));
  if (n == "hpk")
    return std::make_unique<HpkLearner>(
        K, known_order_of(inst),
        spec.rate.value_or(hpk_default_rate(K, inst.schedule.deaths(), T)));
  if (n == "ftl") return std::make_unique<FtlLearner>(K);
  if (n == "adahedge") {
    if (spec.base == GroupBase::known_order)
      return std::make_unique<HpkLearner>(K, known_order_of(inst), RateSchedule::adahedge());
    return std::make_unique<HpuLearner>(K, RateSchedule::adahedge());
  }
  if (n == "flipflop") {
    const auto rate = RateSchedule::fixed(0.0);
    if (spec.base == GroupBase::known_order)
      return std::make_unique<FlipFlopLearner>(hpk_init(K, known_order_of(inst), rate),
                                               spec.base);
    return std::make_unique<FlipFlopLearner>(hpu_init(K, rate), spec.base);
  }
  if (n == "quantile") return std::make_unique<QuantileMetaLearner>(K);
  throw ValidationError("unknown learner '" + n + "'");
}

// Runs one learner on one instance. Multi-death nights go through dummy
// rounds.
inline RunRecord run_learner(const LearnerSpec& spec, const Instance& inst) {
  auto learner = make_learner(spec, inst);
  const auto per_night = inst.schedule.deaths_per_night();
  if (std::any_of(per_night.begin(), per_night.end(), [](std::size_t d) { return d > 1; })) {
    const auto ex = preprocess_dummy_rounds(inst.losses, inst.schedule);
    return simulate_expanded(*learner, ex, inst.losses, inst.schedule);
  }
  return simulate(*learner, inst.losses, inst.schedule);
}

struct ExperimentConfig {
  LearnerSpec learner;
  std::string adversary = "bernoulli";
  AdversaryConfig generator;  // kind taken from `adversary`; seed set per replica
  std::string instance_file;  // adversary "file"
  std::size_t seeds = 1;
  std::uint64_t base_seed = 0;
  std::size_t threads = 0;  // 0: hardware concurrency, capped by DYEXP_THREADS
};

struct RunRow {
  std::uint64_t seed = 0;
  std::size_t T = 0, K = 0, m = 0;
  double learner_loss = 0.0;
  double best_ordering_loss = 0.0;
  double ranking_regret = 0.0;
  double classical_regret_all = 0.0;
  double classical_regret_alive = 0.0;
};

inline std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DYEXP_THREADS")) {
    std::size_t cap = 0;
    const std::string_view v(env);
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), cap);
    if (ec == std::errc() && ptr == v.data() + v.size() && cap > 0) n = std::min(n, cap);
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

// Calls job(i) for i in [0, n) on up to `threads` workers. The first exception
// is rethrown after all workers stop.
template <typename Job>
void parallel_for(std::size_t n, std::size_t threads, Job&& job) {
  const std::size_t w = worker_count(threads, n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < w; ++k)
    pool.emplace_back([&, k] {
      for (std::size_t i = k; i < n; i += w) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

inline Instance make_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.adversary == "file") return load_instance(cfg.instance_file);
  AdversaryConfig g = cfg.generator;
  g.kind = parse_adversary(cfg.adversary);
  g.seed = seed;
  return generate(g);
}

// One row per seed base_seed + i, in seed order regardless of threading.
inline std::vector<RunRow> run_experiment(const ExperimentConfig& cfg) {
  std::vector<RunRow> rows(cfg.seeds);
  std::vector<std::string> warnings;
  const std::optional<Instance> shared =
      cfg.adversary == "file" ? std::optional<Instance>(load_instance(cfg.instance_file))
                              : std::nullopt;
  parallel_for(cfg.seeds, cfg.threads, [&](std::size_t i) {
    const std::uint64_t seed = cfg.base_seed + i;
    const Instance inst = shared ? *shared : make_instance(cfg, seed);
    const auto rec = run_learner(cfg.learner, inst);
    RunRow& row = rows[i];
    row.seed = seed;
    row.T = inst.losses.horizon();
    row.K = inst.losses.experts();
    // The lower-bound generators take m as a parameter; elsewhere it is the
    // schedule's night count.
    const bool lb = cfg.adversary == "unknown-lb" || cfg.adversary == "known-lb";
    row.m = lb ? cfg.generator.nights : inst.schedule.night_count();
    row.learner_loss = rec.total_loss();
    row.best_ordering_loss = rec.best_ordering_loss;
    row.ranking_regret = rec.ranking_regret;
    row.classical_regret_all = rec.classical_regret_all;
    row.classical_regret_alive = rec.classical_regret_alive;
  });
  return rows;
}

struct SweepRow {
  RunRow run;
  double param = 0.0;
};

// Varies one of t, k, m over `values`; every other setting comes from cfg.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const std::string& param,
                                       const std::vector<std::size_t>& values) {
  if (param != "t" && param != "k" && param != "m")
    throw ValidationError("sweep parameter must be one of t, k, m");
  if (cfg.adversary == "file") throw ValidationError("cannot sweep a fixed instance file");
  std::vector<SweepRow> out;
  for (std::size_t v : values) {
    ExperimentConfig c = cfg;
    if (param == "t") c.generator.horizon = v;
    if (param == "k") c.generator.experts = v;
    if (param == "m") c.generator.nights = v;
    for (const auto& r : run_experiment(c)) out.push_back({r, static_cast<double>(v)});
  }
  return out;
}

// --- CSV --------------------------------------------------------------------

inline std::string format_g17(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline constexpr const char* kRunHeader =
    "seed,T,K,m,learner_loss,best_ordering_loss,ranking_regret,classical_regret_all,"
    "classical_regret_alive";
inline constexpr const char* kSweepHeader =
    "seed,param,T,K,m,learner_loss,best_ordering_loss,ranking_regret";

inline void write_run_csv(std::ostream& os, const std::vector<RunRow>& rows) {
  os << kRunHeader << '\n';
  for (const auto& r : rows)
    os << r.seed << ',' << r.T << ',' << r.K << ',' << r.m << ',' << format_g17(r.learner_loss)
       << ',' << format_g17(r.best_ordering_loss) << ',' << format_g17(r.ranking_regret) << ','
       << format_g17(r.classical_regret_all) << ',' << format_g17(r.classical_regret_alive)
       << '\n';
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepHeader << '\n';
  for (const auto& s : rows) {
    const auto& r = s.run;
    os << r.seed << ',' << format_g17(s.param) << ',' << r.T << ',' << r.K << ',' << r.m << ','
       << format_g17(r.learner_loss) << ',' << format_g17(r.best_ordering_loss) << ','
       << format_g17(r.ranking_regret) << '\n';
  }
}

// --- exponent fit -----------------------------------------------------------

struct ExponentFit {
  bool testable = false;
  std::string reason;  // set when not testable
  double slope = 0.0;
  double intercept = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t resamples = 0;  // bootstrap draws that produced a fit
};

inline void ols(const std::vector<double>& x, const std::vector<double>& y, double& slope,
                double& intercept) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  slope = sxy / sxx;
  intercept = my - slope * mx;
}

/// OLS of ln(mean regret) on ln T, with a 95% seed-bootstrap interval.
///
/// samples maps each T to its per-seed regrets. Needs at least three T values
/// with 30 samples each; a non-positive mean makes the fit untestable.
inline ExponentFit fit_exponent(const std::map<double, std::vector<double>>& samples,
                                std::size_t resamples = 1000, std::uint64_t seed = 0) {
  ExponentFit fit;
  if (samples.size() < 3) {
    fit.reason = "need at least 3 distinct T values";
    return fit;
  }
  for (const auto& [T, v] : samples) {
    if (!(T > 0)) throw ValidationError("T must be positive");
    if (v.size() < 30) {
      fit.reason = "need at least 30 seeds per T";
      return fit;
    }
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  std::vector<double> x, y;
  for (const auto& [T, v] : samples) {
    const double mu = mean(v);
    if (!(mu > 0)) {
      fit.reason = "non-positive mean regret at T=" + format_g17(T);
      return fit;
    }
    x.push_back(std::log(T));
    y.push_back(std::log(mu));
  }
  ols(x, y, fit.slope, fit.intercept);
  fit.testable = true;

  std::mt19937_64 rng(seed);
  std::vector<double> slopes;
  std::vector<double> draw;
  for (std::size_t b = 0; b < resamples; ++b) {
    std::vector<double> yb;
    bool ok = true;
    for (const auto& [T, v] : samples) {
      std::uniform_int_distribution<std::size_t> pick(0, v.size() - 1);
      draw.resize(v.size());
      for (double& d : draw) d = v[pick(rng)];
      const double mu = mean(draw);
      if (!(mu > 0)) {
        ok = false;
        break;
      }
      yb.push_back(std::log(mu));
    }
    if (!ok) continue;
    double s, c;
    ols(x, yb, s, c);
    slopes.push_back(s);
  }
  fit.resamples = slopes.size();
  if (!slopes.empty()) {
    std::sort(slopes.begin(), slopes.end());
    auto q = [&](double p) {
      const double pos = p * static_cast<double>(slopes.size() - 1);
      const auto lo = static_cast<std::size_t>(std::floor(pos));
      const auto hi = std::min(lo + 1, slopes.size() - 1);
      return slopes[lo] + (pos - static_cast<double>(lo)) * (slopes[hi] - slopes[lo]);
    };
    fit.ci_low = q(0.025);
    fit.ci_high = q(0.975);
  } else {
    fit.ci_low = fit.ci_high = fit.slope;
  }
  return fit;
}

// Groups sweep rows by T and fits.
inline ExponentFit fit_exponent(const std::vector<SweepRow>& rows, std::size_t resamples = 1000,
                                std::uint64_t seed = 0) {
  std::map<double, std::vector<double>> samples;
  for (const auto& r : rows) samples[static_cast<double>(r.run.T)].push_back(r.run.ranking_regret);
  return fit_exponent(samples, resamples, seed);
}

}  // namespace dyexp
