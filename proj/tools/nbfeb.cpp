/*
 * Copyright 2026 The nbfeb Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
// Command-line driver: run, explore, check, contend.
#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "nbfeb/harness/explore.hpp"
#include "nbfeb/harness/history.hpp"
#include "nbfeb/harness/script.hpp"
#include "nbfeb/harness/workloads.hpp"

namespace h = nbfeb::harness;

namespace {

constexpr int kViolation = 1;
constexpr int kUsage = 2;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw h::UsageError("cannot open " + path);
  return in;
}

int cmd_run(h::RunConfig cfg, const std::string& cm, const std::string& mode) {
  cfg.cm = nbfeb::stm::parse_cm_policy(cm);
  if (mode == "threads") {
    cfg.mode = h::RunMode::Threads;
  } else if (mode != "sim") {
    throw h::UsageError("--mode must be sim or threads");
  }
  const h::RunResult r = h::run_workload(cfg);
  h::emit(r, cfg);
  if (!r.ok()) std::cerr << "run: " << r.violations << " invariant violation(s)\n";
  return r.ok() ? 0 : kViolation;
}

int cmd_explore(const std::string& path, std::size_t bound) {
  std::ifstream in = open_input(path);
  const h::Script script = h::parse_script(in);
  const h::ExploreReport rep = h::explore_script(script, bound);
  std::cout << rep.to_json() << '\n';
  constexpr std::size_t kShown = 3;
  for (std::size_t i = 0; i < rep.violations.size() && i < kShown; ++i) std::cerr << rep.violations[i] << '\n';
  if (rep.violations.size() > kShown) std::cerr << "... " << rep.violations.size() - kShown << " more\n";
  return rep.ok() ? 0 : kViolation;
}

int cmd_check(const std::string& path) {
  std::ifstream in = open_input(path);
  const h::History hist = h::parse_history(in);
  const h::LinVerdict v = h::check_linearizable(hist);
  nlohmann::json j{{"phase", "check"},
                   {"operations", hist.ops.size()},
                   {"linearizable", v.linearizable},
                   {"witness", v.witness},
                   {"states_explored", v.states_explored}};
  std::cout << j.dump() << '\n';
  return v.linearizable ? 0 : kViolation;
}

int cmd_contend(std::size_t m, unsigned depth, unsigned arity, std::uint64_t seed, const std::string& out) {
  const h::ContentionReport rep = h::compare_contention(m, depth, arity, seed);
  h::RunResult r;
  r.phases = rep.phases(seed);
  h::RunConfig cfg;
  cfg.out = out;
  h::emit(r, cfg);
  return rep.nbfeb.winners == 1 && rep.cas.winners == 1 ? 0 : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nbfeb: FEB words, combining network and lock-free STM toolkit"};
  app.require_subcommand(1);

  h::RunConfig cfg;
  std::string cm = "aggressive";
  std::string mode = "sim";
  std::string workloads;
  for (const auto& w : h::workload_names()) workloads += (workloads.empty() ? "" : ", ") + w;
  auto* run = app.add_subcommand("run", "run a workload and print JSON-lines stats");
  run->add_option("--workload", cfg.workload, "one of: " + workloads)->required();
  run->add_option("--threads", cfg.threads, "worker count")->capture_default_str();
  run->add_option("--ops", cfg.ops, "transactions per worker (trials for consensus, M for contention-sweep)")
      ->capture_default_str();
  run->add_option("--payload", cfg.payload, "object payload bytes")->capture_default_str();
  run->add_option("--cm", cm, "contention manager: aggressive, polite, timid")->capture_default_str();
  run->add_option("--strict", cfg.strict, "strict mode (true/false)")->capture_default_str();
  run->add_option("--depth", cfg.depth, "combining tree depth")->capture_default_str();
  run->add_option("--arity", cfg.arity, "combining tree arity")->capture_default_str();
  run->add_option("--seed", cfg.seed, "seed")->capture_default_str();
  run->add_option("--out", cfg.out, "output file (default stdout)");
  run->add_option("--mode", mode, "sim (seeded fibers, deterministic) or threads")->capture_default_str();
  run->add_flag("--timing", cfg.timing, "add wall_seconds to each record");

  std::string script_path;
  std::size_t bound = 100000;
  auto* explore = app.add_subcommand("explore", "exhaustively interleave a small script");
  explore->add_option("--script", script_path, "script file")->required();
  explore->add_option("--bound", bound, "maximum executions")->capture_default_str();

  std::string history_path;
  auto* check = app.add_subcommand("check", "check a FEB word history for linearizability");
  check->add_option("--history", history_path, "history file")->required();

  std::size_t m = 256;
  unsigned depth = 8;
  unsigned arity = 2;
  std::uint64_t seed = 1;
  std::string out;
  auto* contend = app.add_subcommand("contend", "compare combined TFAS against uncombined CAS");
  contend->add_option("--m", m, "requests")->capture_default_str();
  contend->add_option("--depth", depth, "tree depth")->capture_default_str();
  contend->add_option("--arity", arity, "tree arity")->capture_default_str();
  contend->add_option("--seed", seed, "seed")->capture_default_str();
  contend->add_option("--out", out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (*run) return cmd_run(cfg, cm, mode);
    if (*explore) return cmd_explore(script_path, bound);
    if (*check) return cmd_check(history_path);
    return cmd_contend(m, depth, arity, seed, out);
  } catch (const h::ExploreBoundExceeded& e) {
    std::cerr << "explore: " << e.what() << '\n';
    return kUsage;
  } catch (const h::UsageError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const h::FormatError& e) {
    std::cerr << "format: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kUsage;
  }
}
