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
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_set>
#include <vector>

namespace nbfeb::reclaim {

/// Contract violations: nested pin, unbalanced unpin, double retire, and
/// dereferencing a freed object.
class ReclaimFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Epoch-based deferred reclamation with interval reservations.
///
/// A pinned thread reserves the epochs [pin epoch, last read epoch]. A
/// retired object records [birth epoch, retire epoch] and is freed once no
/// active reservation overlaps that interval. A thread that stops while
/// pinned therefore only keeps alive objects that existed while it was
/// reading, not everything retired after it stopped.
class EpochDomain {
 public:
  explicit EpochDomain(std::size_t threads);
  ~EpochDomain();
  EpochDomain(const EpochDomain&) = delete;
  EpochDomain& operator=(const EpochDomain&) = delete;

  void pin(std::size_t thread);
  void unpin(std::size_t thread);
  [[nodiscard]] bool pinned(std::size_t thread) const;

  /// Read protocol: performs `load` and extends the caller's reservation so
  /// that whatever it returned stays allocated until unpin.
  template <class Load>
  auto protect(std::size_t thread, Load&& load) -> decltype(load()) {
    auto& r = *slots_.at(thread);
    for (;;) {
      const std::uint64_t e = epoch_.load(std::memory_order_seq_cst);
      if (r.upper.load(std::memory_order_relaxed) < e) r.upper.store(e, std::memory_order_seq_cst);
      auto value = load();
      if (epoch_.load(std::memory_order_seq_cst) == e) return value;
    }
  }

  [[nodiscard]] std::uint64_t epoch() const noexcept { return epoch_.load(std::memory_order_seq_cst); }

  /// Advances the global epoch and frees whatever became eligible.
  std::size_t advance();

  /// Hands `key` to the domain. `free_fn` runs exactly once, after the grace
  /// period. Retiring a key that is already pending raises ReclaimFault.
  void retire(std::uint64_t key, std::uint64_t birth_epoch, std::function<void()> free_fn);

  /// Frees every retired object whose lifetime no reservation overlaps.
  std::size_t reclaim();

  /// Frees everything still pending regardless of reservations. Only for
  /// tearing down a structure nobody can access any more.
  std::size_t release_all();

  [[nodiscard]] std::size_t pending() const;
  [[nodiscard]] std::uint64_t freed_total() const noexcept { return freed_.load(std::memory_order_relaxed); }
  [[nodiscard]] std::size_t threads() const noexcept { return slots_.size(); }

 private:
  struct Reservation {
    std::atomic<bool> active{false};
    std::atomic<std::uint64_t> lower{0};
    std::atomic<std::uint64_t> upper{0};
  };
  struct Retired {
    std::uint64_t key;
    std::uint64_t birth;
    std::uint64_t retire;
    std::function<void()> free_fn;
  };

  std::atomic<std::uint64_t> epoch_{1};
  std::vector<std::unique_ptr<Reservation>> slots_;
  mutable std::mutex mu_;
  std::vector<Retired> retired_;
  std::unordered_set<std::uint64_t> retired_keys_;
  std::atomic<std::uint64_t> freed_{0};
};

/// RAII pin.
class Guard {
 public:
  Guard(EpochDomain& domain, std::size_t thread) : domain_(domain), thread_(thread) { domain_.pin(thread_); }
  ~Guard() { domain_.unpin(thread_); }
  Guard(const Guard&) = delete;
  Guard& operator=(const Guard&) = delete;

 private:
  EpochDomain& domain_;
  std::size_t thread_;
};

}  // namespace nbfeb::reclaim
