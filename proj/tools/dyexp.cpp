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

// dyexp: run experiments, verification suites and parameter sweeps.
//
// Exit codes: 0 success, 1 usage or input error, 2 verification failure.

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dyexp/dyexp.hpp"

namespace {

using namespace dyexp;

constexpr int kUsageError = 1;
constexpr int kVerifyFailure = 2;

struct RunFlags {
  std::string learner = "hpu";
  std::string adversary = "bernoulli";
  std::size_t k = 2, t = 100, m = 0, seeds = 1, threads = 0;
  std::uint64_t seed = 0;
  std::string eta;
  std::string base = "unknown";
  double p = 0.5;
  std::vector<double> means;
  std::string deaths;
  std::string file;
  std::string out;
  std::string dump_instance;
  std::string trace;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--learner", f.learner, "Learner")
      ->check(CLI::IsMember(learner_names()))
      ->capture_default_str();
  cmd->add_option("--adversary", f.adversary, "Loss and schedule generator")
      ->check(CLI::IsMember(adversary_names()))
      ->capture_default_str();
  cmd->add_option("--k", f.k, "Number of experts")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--t", f.t, "Horizon")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--m", f.m, "Nights (unknown-lb) or dying experts (known-lb)")
      ->capture_default_str();
  cmd->add_option("--seeds", f.seeds, "Replications")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--seed", f.seed, "Base seed; replica i uses seed + i")->capture_default_str();
  cmd->add_option("--eta", f.eta, "Learning rate: fixed:x, anytime or adahedge");
  cmd->add_option("--base", f.base, "Comparator set for adahedge/flipflop")
      ->check(CLI::IsMember({"unknown", "known"}))
      ->capture_default_str();
  cmd->add_option("--p", f.p, "Bernoulli loss probability")->capture_default_str();
  cmd->add_option("--means", f.means, "Per-expert means for the gap adversary")->delimiter(',');
  cmd->add_option("--deaths", f.deaths,
                  "Death round per expert for bernoulli/gap, comma separated, '-' = never");
  cmd->add_option("--file", f.file, "Instance file for --adversary file");
  cmd->add_option("--out", f.out, "CSV output file (default stdout)");
  cmd->add_option("--dump-instance", f.dump_instance, "Write the first replica's instance here");
  cmd->add_option("--trace", f.trace, "Write the first replica's per-round traces here (CSV)");
  cmd->add_option("--threads", f.threads, "Worker threads (0 = all, capped by DYEXP_THREADS)");
}

std::optional<DyingSchedule> parse_deaths(const std::string& text, std::size_t K, std::size_t T) {
  if (text.empty()) return std::nullopt;
  std::vector<std::optional<std::size_t>> d;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "-") {
      d.emplace_back();
      continue;
    }
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size() || item.empty())
      throw ValidationError("bad death round '" + item + "'");
    d.emplace_back(v);
  }
  if (d.size() != K) throw ValidationError("--deaths needs one entry per expert");
  return DyingSchedule(K, T, std::move(d));
}

ExperimentConfig to_config(const RunFlags& f) {
  ExperimentConfig c;
  c.learner.name = f.learner;
  if (!f.eta.empty()) c.learner.rate = parse_rate(f.eta);
  c.learner.base = f.base == "known" ? GroupBase::known_order : GroupBase::unknown_order;
  c.adversary = f.adversary;
  c.instance_file = f.file;
  if (f.adversary == "file" && f.file.empty())
    throw ValidationError("--adversary file needs --file");
  c.generator.experts = f.k;
  c.generator.horizon = f.t;
  c.generator.nights = f.m;
  c.generator.p = f.p;
  c.generator.means = f.means;
  c.generator.schedule = parse_deaths(f.deaths, f.k, f.t);
  c.seeds = f.seeds;
  c.base_seed = f.seed;
  c.threads = f.threads;
  return c;
}

// Side outputs for the first replica.
void write_extras(const RunFlags& f, const ExperimentConfig& cfg) {
  if (f.dump_instance.empty() && f.trace.empty()) return;
  const Instance inst = make_instance(cfg, cfg.base_seed);
  for (const auto& w : inst.warnings) std::cerr << "warning: " << w << "\n";
  if (!f.dump_instance.empty()) save_instance(f.dump_instance, inst.losses, inst.schedule);
  if (!f.trace.empty()) {
    const auto rec = run_learner(cfg.learner, inst);
    std::ofstream os(f.trace);
    if (!os) throw ValidationError("cannot open " + f.trace);
    os << "t";
    for (std::size_t i = 0; i < rec.experts; ++i) os << ",p" << i;
    os << ",learner_loss";
    for (const auto& tr : rec.traces) os << ',' << tr.name;
    os << '\n';
    for (std::size_t t = 0; t < rec.horizon; ++t) {
      os << t;
      for (double v : rec.distribution(t)) os << ',' << format_g17(v);
      os << ',' << format_g17(rec.learner_loss[t]);
      for (const auto& tr : rec.traces)
        os << ',' << (t < tr.values.size() ? format_g17(tr.values[t]) : "");
      os << '\n';
    }
  }
}

template <typename Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot open " + path);
  write(os);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dying-experts online learning simulator"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Run a learner against an adversary over several seeds");
  add_run_flags(run, run_flags);

  SuiteConfig suite_cfg;
  std::string suite;
  bool show_reports = false;
  auto* verify = app.add_subcommand("verify", "Check fast learners against brute force");
  verify->add_option("--suite", suite, "Suite")->required()->check(CLI::IsMember(suite_names()));
  verify->add_option("--k-max", suite_cfg.k_max, "Largest K")->check(CLI::Range(2, 8))->capture_default_str();
  verify->add_option("--trials", suite_cfg.trials, "Trials (per K for oracle suites)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  verify->add_option("--tol", suite_cfg.tol, "Max per-round distribution gap")->capture_default_str();
  verify->add_option("--seed", suite_cfg.seed, "Seed")->capture_default_str();
  verify->add_option("--max-t", suite_cfg.max_horizon, "Largest horizon")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  verify->add_flag("--reports", show_reports, "Print failure reports");

  RunFlags sweep_flags;
  std::string param = "t";
  std::vector<std::size_t> values;
  bool fit = false;
  auto* sweep = app.add_subcommand("sweep", "Repeat a run over a list of parameter values");
  add_run_flags(sweep, sweep_flags);
  sweep->add_option("--param", param, "Swept parameter")
      ->check(CLI::IsMember({"t", "k", "m"}))
      ->capture_default_str();
  sweep->add_option("--values", values, "Comma separated values")->required()->delimiter(',');
  sweep->add_flag("--fit", fit, "Print the log-log regret slope vs T to stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*run) {
      const auto cfg = to_config(run_flags);
      const auto rows = run_experiment(cfg);
      emit(run_flags.out, [&](std::ostream& os) { write_run_csv(os, rows); });
      write_extras(run_flags, cfg);
      return 0;
    }
    if (*verify) {
      const auto res = run_suite(suite, suite_cfg);
      std::cout << res.summary() << "\n";
      if (show_reports || !res.pass())
        for (const auto& r : res.reports) std::cout << r << "\n";
      return res.pass() ? 0 : kVerifyFailure;
    }
    if (*sweep) {
      const auto cfg = to_config(sweep_flags);
      const auto rows = run_sweep(cfg, param, values);
      emit(sweep_flags.out, [&](std::ostream& os) { write_sweep_csv(os, rows); });
      if (fit) {
        if (param != "t") throw ValidationError("--fit needs --param t");
        const auto f = fit_exponent(rows);
        if (f.testable)
          std::cerr << "slope " << format_g17(f.slope) << " 95% CI [" << format_g17(f.ci_low)
                    << ", " << format_g17(f.ci_high) << "]\n";
        else
          std::cerr << "untestable: " << f.reason << "\n";
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}
