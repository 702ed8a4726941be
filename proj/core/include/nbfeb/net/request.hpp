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
#include <optional>
#include <ostream>
#include <string>

#include "nbfeb/feb/store.hpp"
#include "nbfeb/feb/value.hpp"

namespace nbfeb::net {

/// Request kinds carried by the network. Cas is not combinable and exists
/// only for the CAS-based baseline.
enum class Kind : std::uint8_t { Load, Sac, Sas, Tfas, Fai, Cas };

const char* to_string(Kind k) noexcept;
Kind parse_kind(const std::string& text);

constexpr bool is_feb(Kind k) noexcept { return k == Kind::Load || k == Kind::Sac || k == Kind::Sas || k == Kind::Tfas; }

FebOp to_feb_op(Kind k);
Kind from_feb_op(FebOp op) noexcept;

/// One primitive invocation travelling towards a memory controller.
struct MemRequest {
  Kind kind = Kind::Load;
  WordId location;
  FebValue operand;         // Sac/Sas/Tfas operand; Cas desired value
  FebValue expected;        // Cas only
  std::uint64_t increment = 0;  // Fai only
  std::uint64_t tag = 0;

  static MemRequest load(WordId w, std::uint64_t tag = 0) { return {Kind::Load, w, {}, {}, 0, tag}; }
  static MemRequest feb(FebOp op, WordId w, FebValue v, std::uint64_t tag = 0) {
    return {from_feb_op(op), w, op == FebOp::Load ? FebValue{} : v, {}, 0, tag};
  }
  static MemRequest fai(WordId w, std::uint64_t inc, std::uint64_t tag = 0) { return {Kind::Fai, w, {}, {}, inc, tag}; }
  static MemRequest cas(WordId w, FebValue expected, FebValue desired, std::uint64_t tag = 0) {
    return {Kind::Cas, w, desired, expected, 0, tag};
  }

  /// Checks the operand-presence invariant.
  [[nodiscard]] bool well_formed() const noexcept;
};

std::ostream& operator<<(std::ostream& os, const MemRequest& r);

/// Reply to one request. For Fai the value carries the counter and flag is
/// false; for Cas the flag reports success.
struct MemReply {
  FebValue value;
  bool flag = false;

  friend bool operator==(const MemReply&, const MemReply&) = default;
};

std::ostream& operator<<(std::ostream& os, const MemReply& r);

inline MemReply to_reply(FebPair p) { return MemReply{p.value, p.flag}; }

}  // namespace nbfeb::net
