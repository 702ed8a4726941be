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
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbfeb/feb/value.hpp"

namespace nbfeb::harness {

/// Malformed history or script input.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One primitive call on a word, with its response if it returned.
/// `call` and `ret` are positions in the original event sequence.
struct HistoryEvent {
  std::uint32_t thread = 0;
  FebOp op = FebOp::Load;
  std::uint32_t word = 0;
  FebValue operand;
  std::optional<FebPair> response;
  std::size_t call = 0;
  std::size_t ret = 0;  // meaningless while pending
};

struct History {
  /// Initial word states; words not listed start as (bot, 0).
  std::map<std::uint32_t, FebPair> init;
  std::vector<HistoryEvent> ops;
};

/// Text format, one event per line, '#' starts a comment:
///   * init <word> <value> [<flag>]
///   <thread> call <load|sac|sas|tfas> <word> [<value>]
///   <thread> ret <value> <flag>
/// Values are decimal or `bot`/`_`. A thread has at most one call pending.
History parse_history(std::istream& in);
History parse_history(const std::string& text);
std::string format_history(const History& h);

struct LinVerdict {
  bool linearizable = false;
  /// Indices into History::ops in linearization order (pending ops that
  /// were dropped are absent).
  std::vector<std::size_t> witness;
  std::size_t states_explored = 0;
};

/// Search for a real-time-respecting sequential witness under the FEB word
/// model; depth-first with memoisation of (linearized set, word state).
/// Pending calls may take effect or not. At most 64 operations.
LinVerdict check_linearizable(const History& h);

/// Reference oracle: tries every subset of pending calls and every
/// permutation. Exponential; meant for histories of a handful of calls.
LinVerdict brute_force_linearizable(const History& h);

struct HistoryGenOptions {
  std::size_t threads = 3;
  std::size_t ops = 6;
  std::size_t words = 2;
};

/// Records a real concurrent history: fibers issue random primitives on a
/// FebStore under a seeded random interleaving.
History generate_history(std::uint64_t seed, const HistoryGenOptions& options = {});

/// Alters one response of a completed call (seeded); returns false when the
/// history has no completed call.
bool corrupt_history(History& h, std::uint64_t seed);

}  // namespace nbfeb::harness
