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

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "nbfeb/lsa/lsa.hpp"

namespace nbfeb::stm {

using lsa::Timestamp;

/// Values stored in a transaction's status word.
enum class TxStatus : std::uint64_t { Active = 1, Committed = 2, Aborted = 3 };

enum class TxOutcome : std::uint8_t { Committed, Aborted };

enum class AbortCause : std::uint8_t { None, Cm, Lsa, Enemy, User };

const char* to_string(TxStatus s) noexcept;
const char* to_string(AbortCause c) noexcept;

enum class CmPolicy : std::uint8_t { Aggressive, Polite, Timid };

const char* to_string(CmPolicy p) noexcept;
CmPolicy parse_cm_policy(const std::string& text);

/// What the contention manager wants the attacker to do about an active
/// enemy: abort it (`proceed`), back off for `backoff` idle steps and look
/// again, or, with both unset, abort itself.
struct ContentionDecision {
  bool proceed = false;
  std::uint32_t backoff = 0;

  [[nodiscard]] bool self_abort() const noexcept { return !proceed && backoff == 0; }
  friend bool operator==(const ContentionDecision&, const ContentionDecision&) = default;
};

/// Pure policy table. `attempt` counts conflicts already seen on the current
/// open; Polite waits 2^attempt steps for up to `polite_bound` attempts.
ContentionDecision cm_decide(CmPolicy policy, std::uint32_t attempt, std::uint32_t polite_bound = 4) noexcept;

struct StmConfig {
  std::size_t threads = 1;
  std::size_t payload_bytes = 8;
  CmPolicy cm = CmPolicy::Aggressive;
  std::uint32_t polite_bound = 4;
  /// Seal obsolete links and re-check after append; false runs the
  /// published algorithm verbatim.
  bool strict = true;
  /// Free displaced locators while transactions run. Only safe when no two
  /// sessions execute simultaneously (cooperative scheduling); otherwise
  /// call Stm::collect() at quiescent points.
  bool inline_collect = true;
  std::uint32_t collect_period = 4;
};

/// Immutable-once-committed payload of one object version.
struct Data {
  std::vector<std::uint8_t> bytes;

  [[nodiscard]] std::uint64_t u64() const noexcept {
    std::uint64_t v = 0;
    std::memcpy(&v, bytes.data(), std::min(bytes.size(), sizeof v));
    return v;
  }
  void set_u64(std::uint64_t v) noexcept { std::memcpy(bytes.data(), &v, std::min(bytes.size(), sizeof v)); }
};

struct ObjectId {
  std::uint32_t index = 0;
  friend bool operator==(ObjectId, ObjectId) = default;
};

struct SessionStats {
  std::uint64_t commits = 0;
  std::uint64_t aborts_cm = 0;
  std::uint64_t aborts_lsa = 0;
  std::uint64_t aborts_enemy = 0;
  std::uint64_t aborts_user = 0;
  std::uint64_t find_head_calls = 0;
  std::uint32_t find_head_iterations_max = 0;

  SessionStats& operator+=(const SessionStats& o) noexcept;
};

}  // namespace nbfeb::stm
