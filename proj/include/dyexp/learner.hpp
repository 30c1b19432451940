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

#include <span>
#include <string>
#include <vector>

#include "dyexp/core.hpp"

namespace dyexp {

/// The online protocol every learner follows:
///
///   init -> repeat { play -> observe(losses) -> on_death(j)* }
///
/// Deaths are announced after the round's losses, one expert at a time, in
/// the schedule's dying order. Known-order learners get that order at
/// construction; unknown-order learners only ever see on_death.
class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;

  virtual std::size_t experts() const = 0;
  // Distribution over all K initial experts, zero on dead ones.
  virtual std::vector<double> play() = 0;
  virtual void observe(std::span<const double> losses) = 0;
  // A zero-loss round with the rate clock held still. Zero losses leave every
  // learner's weights and gap accounting untouched, so the default is a no-op.
  virtual void observe_dummy() {}
  virtual void on_death(Expert j) = 0;

  // Human-readable internal state for failure reports.
  virtual std::string snapshot() const { return {}; }
  // Per-round diagnostics accumulated so far.
  virtual std::vector<Trace> traces() const { return {}; }
};

// Per-round callback hook for callers that need to inspect the learner
// mid-run (certification). Called after play() with the round index and the
// played distribution.
struct NoRoundHook {
  void operator()(std::size_t, std::span<const double>, const OnlineLearner&) const {}
};

template <typename Hook = NoRoundHook>
RunRecord simulate(OnlineLearner& learner, const LossStream& losses,
                   const DyingSchedule& schedule, Hook&& hook = {}) {
  const std::size_t T = losses.horizon();
  const std::size_t K = losses.experts();
  if (learner.experts() != K || schedule.experts() != K ||
      schedule.horizon() != T)
    throw ValidationError("learner, losses and schedule dimensions differ");
  std::vector<double> dist;
  dist.reserve(T * K);
  for (std::size_t t = 0; t < T; ++t) {
    const auto p = learner.play();
    hook(t, std::span<const double>(p), static_cast<const OnlineLearner&>(learner));
    dist.insert(dist.end(), p.begin(), p.end());
    learner.observe(losses.round(t));
    for (Expert j : schedule.deaths_after(t)) learner.on_death(j);
  }
  auto record = regret_report(std::move(dist), losses, schedule);
  record.traces = learner.traces();
  return record;
}

}  // namespace dyexp
