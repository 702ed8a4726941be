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
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbfeb/sched/fiber.hpp"

namespace nbfeb::harness {

class ExploreBoundExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DporStats {
  std::size_t executions = 0;
  std::size_t max_depth = 0;
  /// Runs abandoned because they could only repeat an explored trace.
  std::size_t pruned = 0;
  std::vector<std::string> violations;
};

/// Systematic exploration of all interleavings of a fiber program up to
/// commutation of independent steps: stateless dynamic partial-order
/// reduction with vector clocks and sleep sets. Every execution re-runs
/// `setup` from scratch.
///
/// `setup` spawns the fibers of one fresh instance of the program. `check`
/// runs after each complete execution and returns a description of any
/// violation, to which the offending fiber schedule is appended. Throws
/// ExploreBoundExceeded once more than `bound` runs (complete or pruned)
/// would be needed.
DporStats explore_all(const std::function<void(sched::FiberScheduler&)>& setup,
                      const std::function<std::optional<std::string>()>& check, std::size_t bound);

}  // namespace nbfeb::harness
