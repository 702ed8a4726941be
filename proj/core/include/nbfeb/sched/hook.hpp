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

namespace nbfeb::sched {

/// Kind of shared-memory access announced at a yield point.
enum class AccessKind : std::uint8_t { Read, Write, Rmw };

/// Address spaces for announced locations. Two accesses conflict only when
/// they name the same (space, id) pair and at least one of them writes.
enum class Space : std::uint8_t {
  Word = 1,   // FEB word
  Slot = 2,   // TMObj slot (object, index)
  Clock = 3,  // global commit clock
  TxCts = 4,  // a transaction's commit-timestamp field
  Baseline = 5,
  Idle = 6,   // backoff; never conflicts with anything real
};

struct Access {
  std::uint64_t location = 0;
  AccessKind kind = AccessKind::Read;

  [[nodiscard]] bool writes() const noexcept { return kind != AccessKind::Read; }
  [[nodiscard]] bool conflicts(const Access& other) const noexcept {
    return location == other.location && (writes() || other.writes());
  }
};

constexpr std::uint64_t location(Space space, std::uint64_t id) noexcept {
  return (static_cast<std::uint64_t>(space) << 56) | (id & ((1ULL << 56) - 1));
}

/// Called before every shared primitive. A no-op unless the calling code runs
/// inside a FiberScheduler, in which case control may pass to another fiber.
void point(Access access);

inline void point(Space space, std::uint64_t id, AccessKind kind) {
  point(Access{location(space, id), kind});
}

/// Per-execution-context counter of shared primitives (per fiber when running
/// under a scheduler, per OS thread otherwise).
std::uint64_t& primitive_counter() noexcept;

/// True when the caller is a fiber managed by a FiberScheduler.
bool in_fiber() noexcept;

}  // namespace nbfeb::sched
