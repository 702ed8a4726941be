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

#include <cstddef>
#include <string>
#include <vector>

#include "nbfeb/harness/dpor.hpp"
#include "nbfeb/harness/script.hpp"

namespace nbfeb::harness {

struct ExploreReport {
  Script::Kind kind = Script::Kind::Stm;
  std::size_t executions = 0;
  std::size_t max_depth = 0;
  /// Executions in which at least one transaction committed.
  std::size_t committed_histories = 0;
  std::vector<std::string> violations;

  [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
  /// One JSON object with the counts above.
  [[nodiscard]] std::string to_json() const;
};

/// Runs `script` under every interleaving of its shared steps (up to
/// commutation of independent steps) and checks each execution:
///  - transactional scripts: committed transactions have a real-time
///    respecting serial witness that also explains the final object values,
///    aborted ones saw a consistent prefix, every status word changed at
///    most once, and the locator chains are well formed;
///  - word scripts: the history is linearizable and no two TFAS calls on a
///    word that is never cleared both found the flag clear.
/// Throws ExploreBoundExceeded when more than `bound` executions are needed.
ExploreReport explore_script(const Script& script, std::size_t bound);

}  // namespace nbfeb::harness
