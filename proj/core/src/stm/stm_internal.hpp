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

#include "nbfeb/feb/value.hpp"
#include "nbfeb/lsa/lsa.hpp"

namespace nbfeb::stm {

inline constexpr std::uint32_t kNoVersion = ~std::uint32_t{0};
// Stored in a transaction's cts while its commit timestamp is being drawn.
inline constexpr lsa::Timestamp kPending = lsa::kInfinity;

constexpr std::uint64_t slot_key(std::uint32_t object, std::uint32_t index) noexcept {
  return (std::uint64_t{object} << 16) | index;
}

// Link words carry locator index + 1 so that a zeroed word reads as empty.
inline FebValue link_to(std::uint32_t loc) { return FebValue::of(std::uint64_t{loc} + 1); }

inline std::optional<std::uint32_t> link_target(FebValue v) noexcept {
  if (v.is_bottom() || v.raw() == 0) return std::nullopt;
  return static_cast<std::uint32_t>(v.raw() - 1);
}

}  // namespace nbfeb::stm
