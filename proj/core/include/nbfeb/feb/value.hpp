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
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace nbfeb {

/// A 64-bit payload or the distinguished bottom value. Bottom is encoded as
/// the all-ones bit pattern, which is therefore not a legal payload.
class FebValue {
 public:
  static constexpr std::uint64_t kBottomBits = ~std::uint64_t{0};

  constexpr FebValue() noexcept = default;

  static constexpr FebValue bottom() noexcept { return FebValue{}; }

  static FebValue of(std::uint64_t payload) {
    if (payload == kBottomBits) throw std::invalid_argument("payload collides with the bottom encoding");
    return FebValue{payload};
  }

  static constexpr FebValue from_raw(std::uint64_t bits) noexcept { return FebValue{bits}; }

  [[nodiscard]] constexpr bool is_bottom() const noexcept { return bits_ == kBottomBits; }

  [[nodiscard]] std::uint64_t payload() const {
    if (is_bottom()) throw std::logic_error("payload() of bottom");
    return bits_;
  }

  [[nodiscard]] constexpr std::uint64_t raw() const noexcept { return bits_; }

  friend constexpr bool operator==(FebValue a, FebValue b) noexcept = default;

  [[nodiscard]] std::string to_string() const { return is_bottom() ? "bot" : std::to_string(bits_); }

  /// Parses "bot", "_" or a decimal payload.
  static FebValue parse(const std::string& text);

 private:
  constexpr explicit FebValue(std::uint64_t bits) noexcept : bits_(bits) {}
  std::uint64_t bits_ = kBottomBits;
};

inline std::ostream& operator<<(std::ostream& os, FebValue v) { return os << v.to_string(); }

/// A (value, flag) pair: the state of one word and the reply of a primitive.
struct FebPair {
  FebValue value;
  bool flag = false;

  friend constexpr bool operator==(const FebPair&, const FebPair&) noexcept = default;
};

inline std::ostream& operator<<(std::ostream& os, const FebPair& p) {
  return os << '(' << p.value << ',' << (p.flag ? 1 : 0) << ')';
}

enum class FebOp : std::uint8_t { Load, Sac, Sas, Tfas };

const char* to_string(FebOp op) noexcept;
FebOp parse_feb_op(const std::string& text);

/// Whether the primitive takes an operand value.
constexpr bool has_operand(FebOp op) noexcept { return op != FebOp::Load; }

/// Sequential semantics of the four primitives. Applies `op` to `word` in
/// place and returns the old pair.
constexpr FebPair apply(FebOp op, FebPair& word, FebValue operand) noexcept {
  const FebPair old = word;
  switch (op) {
    case FebOp::Load:
      break;
    case FebOp::Sac:
      word = FebPair{operand, false};
      break;
    case FebOp::Sas:
      word = FebPair{operand, true};
      break;
    case FebOp::Tfas:
      if (!word.flag) word = FebPair{operand, true};
      break;
  }
  return old;
}

}  // namespace nbfeb

template <>
struct std::hash<nbfeb::FebValue> {
  std::size_t operator()(nbfeb::FebValue v) const noexcept { return std::hash<std::uint64_t>{}(v.raw()); }
};
