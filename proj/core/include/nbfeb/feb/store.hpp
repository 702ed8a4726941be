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

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbfeb/feb/value.hpp"
#include "nbfeb/util/chunks.hpp"

namespace nbfeb {

/// Opaque handle of one word in a FebStore.
struct WordId {
  std::uint32_t index = kInvalid;

  static constexpr std::uint32_t kInvalid = ~std::uint32_t{0};

  [[nodiscard]] constexpr bool valid() const noexcept { return index != kInvalid; }
  friend constexpr bool operator==(WordId, WordId) noexcept = default;
};

/// How an all-bits-zero word reads back. Link words hold locator references
/// and treat zero as bottom; data words read zero as the payload 0.
enum class WordKind : std::uint8_t { Data = 0, Link = 1 };

/// Raised on any access through an unknown or freed WordId.
class FebFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Shared memory of full/empty-bit words. Every primitive on a single word is
/// atomic and linearizable; there is no cross-word atomicity.
class FebStore {
 public:
  FebStore();
  ~FebStore();
  FebStore(const FebStore&) = delete;
  FebStore& operator=(const FebStore&) = delete;

  WordId alloc(FebValue initial, bool flag, WordKind kind = WordKind::Data);
  /// Allocates without initializing, relying on freed storage being zeroed.
  WordId alloc_zeroed(WordKind kind);
  /// Returns the word to the allocator; its storage is zero-filled.
  void free(WordId w);

  FebPair tfas(WordId w, FebValue v) { return apply(FebOp::Tfas, w, v); }
  FebPair load(WordId w) { return apply(FebOp::Load, w, FebValue::bottom()); }
  FebPair sac(WordId w, FebValue v) { return apply(FebOp::Sac, w, v); }
  FebPair sas(WordId w, FebValue v) { return apply(FebOp::Sas, w, v); }
  FebPair apply(FebOp op, WordId w, FebValue operand);

  /// Reads a word without announcing a scheduling point or counting a
  /// primitive. For audits and dumps only.
  [[nodiscard]] FebPair peek(WordId w) const;
  /// Overwrites a word without a scheduling point. Collector use only.
  void poke(WordId w, FebPair p);

  [[nodiscard]] bool valid(WordId w) const noexcept;
  [[nodiscard]] std::size_t live_words() const noexcept { return live_.load(std::memory_order_relaxed); }

  /// One line per live word: "w<index> <data|link> <value> <flag>".
  [[nodiscard]] std::string dump() const;

 private:
  struct Cell;
  static constexpr unsigned kBaseBits = 6;

  Cell& cell(WordId w) const;
  Cell* cell_if_exists(std::uint32_t index) const noexcept;
  WordId take_index();

  std::atomic<Cell*> chunks_[util::kMaxGeometricChunks];
  std::mutex alloc_mu_;
  std::vector<std::uint32_t> free_list_;
  std::uint32_t next_index_ = 0;
  std::atomic<std::size_t> live_{0};
};

}  // namespace nbfeb
