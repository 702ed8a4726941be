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
#include "nbfeb/reclaim/epoch.hpp"

#include <string>

namespace nbfeb::reclaim {

EpochDomain::EpochDomain(std::size_t threads) {
  slots_.reserve(threads);
  for (std::size_t i = 0; i < threads; ++i) slots_.push_back(std::make_unique<Reservation>());
}

EpochDomain::~EpochDomain() { release_all(); }

std::size_t EpochDomain::release_all() {
  std::vector<Retired> all;
  {
    std::lock_guard lock(mu_);
    all.swap(retired_);
    retired_keys_.clear();
  }
  for (auto& r : all) r.free_fn();
  freed_.fetch_add(all.size(), std::memory_order_relaxed);
  return all.size();
}

void EpochDomain::pin(std::size_t thread) {
  auto& r = *slots_.at(thread);
  if (r.active.load(std::memory_order_relaxed)) {
    throw ReclaimFault("nested pin on thread " + std::to_string(thread));
  }
  const std::uint64_t e = epoch_.load(std::memory_order_seq_cst);
  r.lower.store(e, std::memory_order_seq_cst);
  r.upper.store(e, std::memory_order_seq_cst);
  r.active.store(true, std::memory_order_seq_cst);
}

void EpochDomain::unpin(std::size_t thread) {
  auto& r = *slots_.at(thread);
  if (!r.active.load(std::memory_order_relaxed)) {
    throw ReclaimFault("unpin without pin on thread " + std::to_string(thread));
  }
  r.active.store(false, std::memory_order_seq_cst);
}

bool EpochDomain::pinned(std::size_t thread) const { return slots_.at(thread)->active.load(); }

std::size_t EpochDomain::advance() {
  epoch_.fetch_add(1, std::memory_order_seq_cst);
  return reclaim();
}

void EpochDomain::retire(std::uint64_t key, std::uint64_t birth_epoch, std::function<void()> free_fn) {
  std::lock_guard lock(mu_);
  if (!retired_keys_.insert(key).second) {
    throw ReclaimFault("double retire of object " + std::to_string(key));
  }
  retired_.push_back(Retired{key, birth_epoch, epoch_.load(std::memory_order_seq_cst), std::move(free_fn)});
}

std::size_t EpochDomain::reclaim() {
  std::vector<Retired> ready;
  {
    std::lock_guard lock(mu_);
    struct Window {
      std::uint64_t lower;
      std::uint64_t upper;
    };
    std::vector<Window> windows;
    for (const auto& s : slots_) {
      if (s->active.load(std::memory_order_seq_cst)) {
        windows.push_back({s->lower.load(std::memory_order_seq_cst), s->upper.load(std::memory_order_seq_cst)});
      }
    }
    std::vector<Retired> keep;
    for (auto& r : retired_) {
      bool protected_by_reader = false;
      for (const auto& w : windows) {
        if (r.birth <= w.upper && r.retire >= w.lower) {
          protected_by_reader = true;
          break;
        }
      }
      if (protected_by_reader) {
        keep.push_back(std::move(r));
      } else {
        retired_keys_.erase(r.key);
        ready.push_back(std::move(r));
      }
    }
    retired_ = std::move(keep);
  }
  for (auto& r : ready) r.free_fn();
  freed_.fetch_add(ready.size(), std::memory_order_relaxed);
  return ready.size();
}

std::size_t EpochDomain::pending() const {
  std::lock_guard lock(mu_);
  return retired_.size();
}

}  // namespace nbfeb::reclaim
