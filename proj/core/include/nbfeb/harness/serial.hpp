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
#include <string>
#include <vector>

namespace nbfeb::harness {

struct TxnOp {
  enum class Kind : std::uint8_t { Read, Write } kind = Kind::Read;
  std::uint32_t object = 0;
  std::uint64_t value = 0;  // value observed (Read) or stored (Write)
};

/// One transaction attempt as a client saw it. `begin` and `end` are
/// positions on a shared event counter: `begin` is taken before the
/// transaction starts, `end` once it has committed or aborted.
struct TxnRecord {
  std::uint32_t thread = 0;
  bool committed = false;
  std::vector<TxnOp> ops;
  std::uint64_t begin = 0;
  std::uint64_t end = 0;
};

struct SerialVerdict {
  bool ok = false;
  std::vector<std::size_t> witness;  // indices of committed records, in order
  std::string reason;
};

/// Looks for a serial order of the committed transactions that respects
/// real time (a ended before b began => a first), explains every read, and
/// ends in `final_state`. Each aborted transaction's reads must also be
/// explained by some prefix of that order consistent with real time.
/// Objects absent from `initial` start at 0. Exhaustive; keep inputs small.
SerialVerdict check_serializable(const std::map<std::uint32_t, std::uint64_t>& initial,
                                 const std::vector<TxnRecord>& txns,
                                 const std::optional<std::map<std::uint32_t, std::uint64_t>>& final_state);

std::string describe(const std::vector<TxnRecord>& txns);

}  // namespace nbfeb::harness
