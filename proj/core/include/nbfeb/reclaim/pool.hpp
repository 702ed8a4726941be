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
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "nbfeb/reclaim/epoch.hpp"
#include "nbfeb/util/chunks.hpp"

namespace nbfeb::reclaim {

/// Stable-address slab of `T` records addressed by 32-bit index. Freed
/// records are reset to a value-initialized `T` (all fields zero) and marked
/// with a tombstone; `get` on a tombstoned index raises ReclaimFault.
template <class T>
class SlabPool {
 public:
  explicit SlabPool(std::string name) : name_(std::move(name)) {
    for (auto& c : chunks_) c.store(nullptr, std::memory_order_relaxed);
  }
  ~SlabPool() {
    for (auto& c : chunks_) delete[] c.load(std::memory_order_relaxed);
  }
  SlabPool(const SlabPool&) = delete;
  SlabPool& operator=(const SlabPool&) = delete;

  /// Returns an index whose record is zero-filled.
  std::uint32_t alloc(std::uint64_t birth_epoch = 0) {
    std::uint32_t index;
    {
      std::lock_guard lock(mu_);
      if (!free_.empty()) {
        index = free_.back();
        free_.pop_back();
      } else {
        index = next_++;
        if (next_ == 0) throw std::bad_alloc();
        const std::size_t chunk = util::chunk_pos(index, kBaseBits).chunk;
        if (chunks_[chunk].load(std::memory_order_relaxed) == nullptr) {
          chunks_[chunk].store(new Entry[util::chunk_size(chunk, kBaseBits)], std::memory_order_release);
        }
      }
    }
    Entry& e = entry(index);
    e.birth = birth_epoch;
    e.alive.store(true, std::memory_order_release);
    live_.fetch_add(1, std::memory_order_relaxed);
    return index;
  }

  void free(std::uint32_t index) {
    Entry& e = checked(index);
    e.alive.store(false, std::memory_order_release);
    e.value.~T();
    new (&e.value) T{};
    live_.fetch_sub(1, std::memory_order_relaxed);
    std::lock_guard lock(mu_);
    free_.push_back(index);
  }

  T& get(std::uint32_t index) const { return checked(index).value; }
  [[nodiscard]] bool alive(std::uint32_t index) const noexcept {
    const Entry* e = find(index);
    return e != nullptr && e->alive.load(std::memory_order_acquire);
  }
  [[nodiscard]] std::uint64_t birth(std::uint32_t index) const { return checked(index).birth; }
  [[nodiscard]] std::size_t live() const noexcept { return live_.load(std::memory_order_relaxed); }
  [[nodiscard]] std::uint32_t high_water() const {
    std::lock_guard lock(mu_);
    return next_;
  }

 private:
  struct Entry {
    std::atomic<bool> alive{false};
    std::uint64_t birth = 0;
    T value{};
  };
  static constexpr unsigned kBaseBits = 5;

  Entry* find(std::uint32_t index) const noexcept {
    const auto [chunk, offset] = util::chunk_pos(index, kBaseBits);
    Entry* base = chunks_[chunk].load(std::memory_order_acquire);
    return base == nullptr ? nullptr : &base[offset];
  }
  Entry& entry(std::uint32_t index) const { return *find(index); }
  Entry& checked(std::uint32_t index) const {
    Entry* e = find(index);
    if (e == nullptr || !e->alive.load(std::memory_order_acquire)) {
      throw ReclaimFault(name_ + " #" + std::to_string(index) + " used after free");
    }
    return *e;
  }

  std::string name_;
  std::atomic<Entry*> chunks_[util::kMaxGeometricChunks];
  mutable std::mutex mu_;
  std::vector<std::uint32_t> free_;
  std::uint32_t next_ = 0;
  std::atomic<std::size_t> live_{0};
};

}  // namespace nbfeb::reclaim
