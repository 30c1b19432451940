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

// Loss and schedule generators. All randomness comes from CounterRng with one
// stream per (day, expert) and the round within the day as counter.

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dyexp/core.hpp"
#include "dyexp/instance.hpp"
#include "dyexp/rng.hpp"

namespace dyexp {

enum class AdversaryKind { bernoulli, unknown_lb, known_lb, stochastic_gap };

struct AdversaryConfig {
  AdversaryKind kind = AdversaryKind::bernoulli;
  std::size_t experts = 2;
  std::size_t horizon = 1;
  std::size_t nights = 0;  // m
  std::uint64_t seed = 0;
  double p = 0.5;                               // bernoulli
  std::vector<double> means;                    // stochastic_gap
  std::optional<DyingSchedule> schedule;        // bernoulli, stochastic_gap
};

namespace detail {

inline DyingSchedule supplied_or_empty(const AdversaryConfig& cfg) {
  if (!cfg.schedule) return DyingSchedule::none(cfg.experts, cfg.horizon);
  if (cfg.schedule->experts() != cfg.experts || cfg.schedule->horizon() != cfg.horizon)
    throw ValidationError("supplied schedule does not match K and T");
  return *cfg.schedule;
}

// Splits T rounds into n equal days; leftover rounds go to the last day.
inline std::vector<std::pair<std::size_t, std::size_t>> split_days(std::size_t horizon,
                                                                  std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> days;
  const std::size_t len = horizon / n;
  for (std::size_t s = 0; s < n; ++s)
    days.emplace_back(s * len, s + 1 == n ? horizon : (s + 1) * len);
  return days;
}

}  // namespace detail

// i.i.d. Bernoulli(p) losses.
inline Instance gen_bernoulli(const AdversaryConfig& cfg) {
  if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) throw ValidationError("bernoulli p must lie in [0,1]");
  if (cfg.experts < 1 || cfg.horizon < 1) throw ValidationError("need K >= 1 and T >= 1");
  const CounterRng rng(cfg.seed);
  std::vector<double> v(cfg.horizon * cfg.experts);
  for (std::size_t t = 0; t < cfg.horizon; ++t)
    for (std::size_t i = 0; i < cfg.experts; ++i)
      v[t * cfg.experts + i] = rng.bernoulli(cfg.p, substream(0, i), t) ? 1.0 : 0.0;
  return Instance{LossStream(cfg.horizon, cfg.experts, std::move(v)),
                  detail::supplied_or_empty(cfg), {}, {}};
}

/// Unknown-order lower-bound construction.
///
/// m+1 days, each split in halves. First half: i.i.d. Bernoulli(1/2) for every
/// alive expert. The expert with the smallest first-half loss (lowest index on
/// ties) then gets zero loss in the second half and dies at the end of the day;
/// every other alive expert replays its first half mirrored, l' = 1 - l. On a
/// day of odd length the final round charges 1/2 to every alive expert. Dead
/// experts get loss 1. Each surviving expert's day total is exactly half the
/// day length.
inline Instance gen_unknown_lb(const AdversaryConfig& cfg) {
  const std::size_t K = cfg.experts, T = cfg.horizon, m = cfg.nights;
  if (K < 1 || m + 1 > K)
    throw ValidationError("unknown-order construction needs m <= K-1");
  if (T < 2 * (m + 1))
    throw ValidationError("unknown-order construction needs T >= 2(m+1)");
  const CounterRng rng(cfg.seed);
  std::vector<double> v(T * K, 1.0);
  std::vector<std::optional<std::size_t>> death(K);
  std::vector<char> alive(K, 1);
  const auto days = detail::split_days(T, m + 1);
  for (std::size_t s = 0; s < days.size(); ++s) {
    const auto [begin, end] = days[s];
    const std::size_t half = (end - begin) / 2;
    std::vector<double> first_half(K, 0.0);
    for (std::size_t i = 0; i < K; ++i) {
      if (!alive[i]) continue;
      for (std::size_t r = 0; r < half; ++r) {
        const double l = rng.bernoulli(0.5, substream(s, i), r) ? 1.0 : 0.0;
        v[(begin + r) * K + i] = l;
        first_half[i] += l;
      }
    }
    std::size_t best = K;
    for (std::size_t i = 0; i < K; ++i)
      if (alive[i] && (best == K || first_half[i] < first_half[best])) best = i;
    for (std::size_t i = 0; i < K; ++i) {
      if (!alive[i]) continue;
      for (std::size_t r = 0; r < half; ++r)
        v[(begin + half + r) * K + i] = i == best ? 0.0 : 1.0 - v[(begin + r) * K + i];
      if (begin + 2 * half < end) v[(end - 1) * K + i] = 0.5;
    }
    if (s < m) {
      death[best] = end;
      alive[best] = 0;
    }
  }
  return Instance{LossStream(T, K, std::move(v)), DyingSchedule(K, T, std::move(death)), {}, {}};
}

/// Known-order lower-bound construction.
///
/// m/2 days. On day s only experts 2s and 2s+1 are informative (i.i.d.
/// Bernoulli(1/2)); every other expert suffers loss 1. The pair dies at the
/// end of its day; the last pair's day ends the game, so it survives. The
/// returned instance carries the full dying order.
inline Instance gen_known_lb(const AdversaryConfig& cfg) {
  const std::size_t K = cfg.experts, T = cfg.horizon, m = cfg.nights;
  if (m < 2 || m % 2 != 0) throw ValidationError("known-order construction needs even m >= 2");
  if (m > K) throw ValidationError("known-order construction needs m <= K");
  const std::size_t n_days = m / 2;
  if (T < n_days) throw ValidationError("known-order construction needs T >= m/2");
  const CounterRng rng(cfg.seed);
  std::vector<double> v(T * K, 1.0);
  std::vector<std::optional<std::size_t>> death(K);
  std::vector<Expert> order;
  const auto days = detail::split_days(T, n_days);
  for (std::size_t s = 0; s < n_days; ++s) {
    const auto [begin, end] = days[s];
    for (std::size_t e : {2 * s, 2 * s + 1})
      for (std::size_t t = begin; t < end; ++t)
        v[t * K + e] = rng.bernoulli(0.5, substream(s, e), t - begin) ? 1.0 : 0.0;
    if (s + 1 < n_days) {
      death[2 * s] = end;
      death[2 * s + 1] = end;
      order.push_back(static_cast<Expert>(2 * s));
      order.push_back(static_cast<Expert>(2 * s + 1));
    }
  }
  return Instance{LossStream(T, K, std::move(v)), DyingSchedule(K, T, std::move(death)),
                  std::move(order), {}};
}

// i.i.d. Bernoulli(means[i]) per expert, optionally on a supplied schedule.
inline Instance gen_stochastic_gap(const AdversaryConfig& cfg) {
  const std::size_t K = cfg.experts, T = cfg.horizon;
  if (cfg.means.size() != K)
    throw ValidationError("stochastic gap needs one mean per expert");
  for (double mu : cfg.means)
    if (!(mu >= 0.0 && mu <= 1.0)) throw ValidationError("means must lie in [0,1]");
  const CounterRng rng(cfg.seed);
  std::vector<double> v(T * K);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t i = 0; i < K; ++i)
      v[t * K + i] = rng.bernoulli(cfg.means[i], substream(0, i), t) ? 1.0 : 0.0;
  Instance inst{LossStream(T, K, std::move(v)), detail::supplied_or_empty(cfg), {}, {}};
  const double lo = *std::min_element(cfg.means.begin(), cfg.means.end());
  if (std::count(cfg.means.begin(), cfg.means.end(), lo) > 1)
    inst.warnings.push_back("no unique minimum mean: there is no gap");
  return inst;
}

inline Instance generate(const AdversaryConfig& cfg) {
  switch (cfg.kind) {
    case AdversaryKind::bernoulli: return gen_bernoulli(cfg);
    case AdversaryKind::unknown_lb: return gen_unknown_lb(cfg);
    case AdversaryKind::known_lb: return gen_known_lb(cfg);
    case AdversaryKind::stochastic_gap: return gen_stochastic_gap(cfg);
  }
  throw ValidationError("unknown adversary kind");
}

}  // namespace dyexp
