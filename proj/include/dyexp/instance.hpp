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

// Plain-text instance format:
//
//   K T
//   d_1 d_2 ... d_K        death round per expert, '-' for never
//   l_11 l_12 ... l_1K     T lines of K losses
//   ...
//
// Losses are written in the shortest decimal form that parses back to the
// same double, so write(read(s)) == s for any file already in that form and
// read(write(x)) reproduces x bit for bit.

#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "dyexp/core.hpp"
#include "dyexp/error.hpp"

namespace dyexp {

struct Instance {
  LossStream losses;
  DyingSchedule schedule;
  // Death order known in advance (known-order adversaries); empty otherwise.
  std::vector<Expert> dying_order;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line_no) {
  T v{};
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ValidationError("line " + std::to_string(line_no) + ": cannot parse '" +
                          std::string(tok) + "'");
  return v;
}

inline void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace detail

inline void write_instance(std::ostream& os, const LossStream& losses,
                           const DyingSchedule& schedule) {
  if (losses.experts() != schedule.experts() ||
      losses.horizon() != schedule.horizon())
    throw ValidationError("loss stream and schedule dimensions differ");
  const std::size_t K = losses.experts();
  std::string out;
  out += std::to_string(K) + " " + std::to_string(losses.horizon()) + "\n";
  for (std::size_t i = 0; i < K; ++i) {
    if (i) out += ' ';
    const auto& d = schedule.death_round(static_cast<Expert>(i));
    out += d ? std::to_string(*d) : "-";
  }
  out += '\n';
  for (std::size_t t = 0; t < losses.horizon(); ++t) {
    const auto row = losses.round(t);
    for (std::size_t i = 0; i < K; ++i) {
      if (i) out += ' ';
      detail::append_double(out, row[i]);
    }
    out += '\n';
  }
  os << out;
}

inline std::string format_instance(const LossStream& losses,
                                   const DyingSchedule& schedule) {
  std::ostringstream os;
  write_instance(os, losses, schedule);
  return os.str();
}

inline Instance read_instance(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::vector<std::string_view> {
    while (std::getline(is, line)) {
      ++line_no;
      auto toks = detail::split_ws(line);
      if (!toks.empty()) return toks;
    }
    throw ValidationError("unexpected end of instance after line " +
                          std::to_string(line_no));
  };

  auto header = next_line();
  if (header.size() != 2)
    throw ValidationError("line " + std::to_string(line_no) + ": expected 'K T'");
  const auto K = detail::parse_number<std::size_t>(header[0], line_no);
  const auto T = detail::parse_number<std::size_t>(header[1], line_no);
  if (K < 1 || T < 1) throw ValidationError("K and T must be positive");

  auto deaths_tok = next_line();
  if (deaths_tok.size() != K)
    throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                          std::to_string(K) + " death rounds");
  std::vector<std::optional<std::size_t>> deaths(K);
  for (std::size_t i = 0; i < K; ++i)
    if (deaths_tok[i] != "-")
      deaths[i] = detail::parse_number<std::size_t>(deaths_tok[i], line_no);

  std::vector<double> values;
  values.reserve(K * T);
  for (std::size_t t = 0; t < T; ++t) {
    auto row = next_line();
    if (row.size() != K)
      throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(K) + " losses");
    for (auto tok : row) values.push_back(detail::parse_number<double>(tok, line_no));
  }
  while (std::getline(is, line)) {
    ++line_no;
    if (!detail::split_ws(line).empty())
      throw ValidationError("line " + std::to_string(line_no) +
                            ": trailing data after " + std::to_string(T) +
                            " loss rows");
  }
  return Instance{LossStream(T, K, std::move(values)),
                  DyingSchedule(K, T, std::move(deaths)), {}, {}};
}

inline Instance parse_instance(const std::string& text) {
  std::istringstream is(text);
  return read_instance(is);
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open instance file " + path);
  return read_instance(in);
}

inline void save_instance(const std::string& path, const LossStream& losses,
                          const DyingSchedule& schedule) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write instance file " + path);
  write_instance(out, losses, schedule);
}

}  // namespace dyexp
