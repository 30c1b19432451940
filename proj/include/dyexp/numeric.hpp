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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace dyexp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)), exact for -inf arguments.
inline double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// log(sum_i exp(x_i)) with max-shift. Empty input or all -inf gives -inf.
inline double log_sum_exp(std::span<const double> x) {
  double hi = -kInf;
  for (double v : x) hi = std::max(hi, v);
  if (hi == -kInf) return -kInf;
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

// Normalized exp(x) restricted to entries with mask[i] != 0; masked entries
// are exactly zero. The caller guarantees at least one finite unmasked entry.
inline std::vector<double> masked_softmax(std::span<const double> x,
                                          std::span<const char> mask) {
  std::vector<double> p(x.size(), 0.0);
  double hi = -kInf;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (mask[i]) hi = std::max(hi, x[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!mask[i]) continue;
    p[i] = std::exp(x[i] - hi);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

inline std::vector<double> softmax(std::span<const double> x) {
  const std::vector<char> all(x.size(), 1);
  return masked_softmax(x, all);
}

// ln(n!)
inline double log_factorial(std::size_t n) {
  return std::lgamma(static_cast<double>(n) + 1.0);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace dyexp
