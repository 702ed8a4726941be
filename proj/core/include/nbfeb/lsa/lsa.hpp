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

#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "nbfeb/net/simulator.hpp"

namespace nbfeb::lsa {

/// Value of the global commit clock. 0 stamps initial versions.
using Timestamp = std::uint64_t;
inline constexpr Timestamp kInfinity = std::numeric_limits<Timestamp>::max();

/// Half-open interval [lower, upper); upper == kInfinity means unbounded.
struct ValidityRange {
  Timestamp lower = 0;
  Timestamp upper = kInfinity;

  [[nodiscard]] bool empty() const noexcept { return lower >= upper; }
  [[nodiscard]] ValidityRange intersect(const ValidityRange& o) const noexcept {
    return {std::max(lower, o.lower), std::min(upper, o.upper)};
  }
  [[nodiscard]] bool intersects(const ValidityRange& o) const noexcept { return !intersect(o).empty(); }
  friend bool operator==(const ValidityRange&, const ValidityRange&) = default;
};

/// One version of an object as seen by a transaction. `range` is an
/// interval over which the version is known to be the current one.
struct VersionView {
  std::uint32_t version = 0;
  Timestamp commit_ts = 0;
  ValidityRange range;
};

/// Global counter incremented by fetch-and-increment.
class GlobalClock {
 public:
  /// Returns a fresh timestamp; the first tick returns 1.
  Timestamp tick();
  /// Current value without ticking.
  Timestamp now();
  /// Issues `count` ticks as FAI(+1) requests through a combining network
  /// and returns the timestamps handed to each requester, in request order.
  std::vector<Timestamp> tick_batch(std::size_t count, const net::Topology& topology,
                                    const net::SimOptions& options, net::SimStats* stats = nullptr);

 private:
  std::atomic<Timestamp> value_{0};
};

enum class OpenMode : std::uint8_t { Read, Write };

/// Validity-range bookkeeping of one transaction.
class LsaState {
 public:
  /// Recomputes an upper bound at which the whole read set is still valid,
  /// or nullopt when some read version has been superseded.
  using Extender = std::function<std::optional<Timestamp>()>;

  void start(Timestamp now) noexcept { range_ = {now, kInfinity}; }

  /// Selects a version from `versions` whose range meets the transaction's
  /// range and narrows the range to the intersection. Read mode takes the
  /// earliest such version; Write mode insists on the most recent one. When
  /// nothing intersects, one extension through `extend` is attempted. Returns
  /// nullopt when the transaction has to abort.
  std::optional<VersionView> open(std::span<const VersionView> versions, OpenMode mode, const Extender& extend);

  [[nodiscard]] const ValidityRange& range() const noexcept { return range_; }
  void set_range(ValidityRange r) noexcept { range_ = r; }

 private:
  std::optional<VersionView> choose(std::span<const VersionView> versions, OpenMode mode) const;
  ValidityRange range_;
};

}  // namespace nbfeb::lsa
