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

#include <stdexcept>

#include "nbfeb/feb/store.hpp"

namespace nbfeb::consensus {

/// One-shot wait-free consensus object over a single TFAS word.
class ConsensusInstance {
 public:
  /// Allocates the decision word as (bottom, clear).
  explicit ConsensusInstance(FebStore& store);
  ~ConsensusInstance();
  ConsensusInstance(const ConsensusInstance&) = delete;
  ConsensusInstance& operator=(const ConsensusInstance&) = delete;

  /// Returns the proposal of whichever caller's TFAS reached the decision
  /// word first. Exactly one shared primitive per call. Throws
  /// std::invalid_argument for a bottom proposal, before touching memory.
  FebValue propose(FebValue proposal);

  [[nodiscard]] WordId decision() const noexcept { return decision_; }

 private:
  FebStore& store_;
  WordId decision_;
};

}  // namespace nbfeb::consensus
