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
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "nbfeb/stm/types.hpp"

namespace nbfeb::harness {

/// Reference STM in the classic locator style: every object has a single
/// head reference replaced by compare-and-swap, and a transaction's status
/// is switched by compare-and-swap too. Values are plain 64-bit words.
/// Records live until the instance is destroyed; meant for desk-scale runs.
class CasDstm {
 public:
  explicit CasDstm(std::size_t threads, stm::CmPolicy cm = stm::CmPolicy::Aggressive, std::uint32_t polite_bound = 4);
  ~CasDstm();
  CasDstm(const CasDstm&) = delete;
  CasDstm& operator=(const CasDstm&) = delete;

  /// Not thread-safe; create objects before running transactions.
  std::uint32_t create_object(std::uint64_t initial);

  void begin(std::size_t thread);
  /// nullopt when the transaction aborted.
  std::optional<std::uint64_t> open_read(std::size_t thread, std::uint32_t object);
  /// Pointer to the private new value, or nullptr when the transaction aborted.
  std::uint64_t* open_write(std::size_t thread, std::uint32_t object);
  bool commit(std::size_t thread);
  [[nodiscard]] bool active(std::size_t thread) const;

  /// Committed value; quiescent use only.
  [[nodiscard]] std::uint64_t latest(std::uint32_t object) const;
  [[nodiscard]] const stm::SessionStats& stats(std::size_t thread) const;
  [[nodiscard]] stm::SessionStats total_stats() const;
  /// CAS attempts on object heads, and how many failed.
  [[nodiscard]] std::uint64_t head_cas() const noexcept { return head_cas_.load(); }
  [[nodiscard]] std::uint64_t head_cas_failures() const noexcept { return head_cas_failed_.load(); }

 private:
  struct Tx {
    std::atomic<std::uint8_t> status{0};
  };
  struct Locator {
    Tx* tx = nullptr;
    std::uint64_t old_value = 0;
    std::uint64_t new_value = 0;
  };
  struct Object {
    std::atomic<Locator*> head{nullptr};
  };
  struct Thread {
    Tx* tx = nullptr;
    bool in_tx = false;
    std::vector<std::pair<std::uint32_t, Locator*>> reads;
    std::vector<std::pair<std::uint32_t, Locator*>> writes;
    stm::SessionStats stats;
  };

  Tx* new_tx();
  Locator* new_locator(Tx* tx, std::uint64_t old_value, std::uint64_t new_value);
  Locator* load_head(std::uint32_t object);
  std::uint8_t load_status(Tx* tx);
  bool cas_status(Tx* tx, std::uint8_t from, std::uint8_t to);
  std::uint64_t value_of(Locator* l);
  /// Settles a conflict with an active owner; false when `t` must abort.
  bool resolve(Thread& t, Tx* other);
  bool validate(Thread& t);
  void abort(Thread& t, stm::AbortCause cause);
  std::uint64_t tx_id(const Tx* tx) const;

  stm::CmPolicy cm_;
  std::uint32_t polite_bound_;
  std::vector<std::unique_ptr<Object>> objects_;
  std::vector<Thread> threads_;
  mutable std::mutex mu_;
  std::deque<Tx> txs_;
  std::deque<Locator> locators_;
  std::atomic<std::uint64_t> head_cas_{0};
  std::atomic<std::uint64_t> head_cas_failed_{0};
};

}  // namespace nbfeb::harness
