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
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbfeb/stm/types.hpp"

namespace nbfeb::harness {

/// Bad command-line or configuration input.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunMode : std::uint8_t {
  Sim,      // cooperative fibers under a seeded random interleaving
  Threads,  // one OS thread per worker; counts vary run to run
};

struct RunConfig {
  std::string workload = "counter";
  std::size_t threads = 4;
  std::size_t ops = 1000;  // transactions (or trials) per thread
  std::size_t payload = 8;
  stm::CmPolicy cm = stm::CmPolicy::Aggressive;
  bool strict = true;
  unsigned depth = 3;
  unsigned arity = 2;
  std::uint64_t seed = 1;
  std::string out;  // empty: standard output
  RunMode mode = RunMode::Sim;
  bool timing = false;  // adds wall_seconds, which breaks byte-for-byte repeatability
};

const std::vector<std::string>& workload_names();

/// One JSON-lines record.
struct PhaseStats {
  std::string phase;
  std::uint64_t commits = 0;
  std::uint64_t aborts_cm = 0;
  std::uint64_t aborts_lsa = 0;
  std::uint64_t aborts_enemy = 0;
  std::uint64_t controller_requests = 0;
  std::uint64_t max_contention_level = 0;
  std::uint64_t live_locators_max = 0;
  std::uint64_t seed = 0;
  std::map<std::string, std::int64_t> counts;  // workload-specific fields
  std::map<std::string, double> reals;
  std::optional<double> wall_seconds;

  [[nodiscard]] std::string to_json() const;
};

struct RunResult {
  std::vector<PhaseStats> phases;
  std::uint64_t violations = 0;
  [[nodiscard]] bool ok() const noexcept { return violations == 0; }
};

/// Runs the configured workload with its oracle enabled. Throws UsageError
/// for an unknown workload or unusable parameters.
///
/// For transactional workloads controller_requests counts shared-memory
/// primitives issued, and max_contention_level is the largest number of
/// workers simultaneously about to access one location (simulation mode
/// only; 0 with real threads).
RunResult run_workload(const RunConfig& config);

/// Writes one JSON line per phase to `config.out` (or standard output).
void emit(const RunResult& result, const RunConfig& config);

struct ContentionSide {
  std::uint64_t controller_requests = 0;
  std::uint64_t max_contention_level = 0;
  std::uint64_t combines = 0;
  std::uint64_t winners = 0;  // requests that took effect
};

struct ContentionReport {
  std::size_t m = 0;
  unsigned depth = 0;
  unsigned arity = 2;
  ContentionSide nbfeb;
  ContentionSide cas;
  /// CAS controller requests per NB-FEB controller request.
  [[nodiscard]] double ratio() const noexcept {
    return nbfeb.controller_requests == 0 ? 0.0
                                          : static_cast<double>(cas.controller_requests) / nbfeb.controller_requests;
  }
  [[nodiscard]] std::vector<PhaseStats> phases(std::uint64_t seed) const;
};

/// M processes append to the same object at once. With NB-FEB each append is
/// a TFAS on the head locator's link word, which switches may combine; with
/// the CAS baseline each is a CAS on the head reference, which they may not.
/// Both batches go through a `depth`-level `arity`-ary network.
ContentionReport compare_contention(std::size_t m, unsigned depth, unsigned arity = 2, std::uint64_t seed = 0);

}  // namespace nbfeb::harness
