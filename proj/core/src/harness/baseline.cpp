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
#include "nbfeb/harness/baseline.hpp"

#include <stdexcept>

#include "nbfeb/sched/hook.hpp"

namespace nbfeb::harness {

namespace {

constexpr std::uint8_t kActive = 1;
constexpr std::uint8_t kCommitted = 2;
constexpr std::uint8_t kAborted = 3;

// Heads and status words share the baseline address space; status ids are
// offset so they never collide with object ids.
constexpr std::uint64_t kStatusBase = std::uint64_t{1} << 40;

}  // namespace

CasDstm::CasDstm(std::size_t threads, stm::CmPolicy cm, std::uint32_t polite_bound)
    : cm_(cm), polite_bound_(polite_bound), threads_(threads) {
  if (threads == 0) throw std::invalid_argument("the baseline needs at least one thread");
}

CasDstm::~CasDstm() = default;

CasDstm::Tx* CasDstm::new_tx() {
  std::lock_guard lock(mu_);
  Tx& tx = txs_.emplace_back();
  tx.status.store(kActive);
  return &tx;
}

CasDstm::Locator* CasDstm::new_locator(Tx* tx, std::uint64_t old_value, std::uint64_t new_value) {
  std::lock_guard lock(mu_);
  return &locators_.emplace_back(Locator{tx, old_value, new_value});
}

std::uint64_t CasDstm::tx_id(const Tx* tx) const {
  // Stable per record: address order inside the deque is not contiguous, so
  // hash the pointer instead.
  return kStatusBase | (reinterpret_cast<std::uintptr_t>(tx) >> 3 & ((std::uint64_t{1} << 40) - 1));
}

std::uint32_t CasDstm::create_object(std::uint64_t initial) {
  auto obj = std::make_unique<Object>();
  Tx* boot = new_tx();
  boot->status.store(kCommitted);
  obj->head.store(new_locator(boot, initial, initial));
  objects_.push_back(std::move(obj));
  return static_cast<std::uint32_t>(objects_.size() - 1);
}

CasDstm::Locator* CasDstm::load_head(std::uint32_t object) {
  sched::point(sched::Space::Baseline, object, sched::AccessKind::Read);
  ++sched::primitive_counter();
  return objects_.at(object)->head.load(std::memory_order_acquire);
}

std::uint8_t CasDstm::load_status(Tx* tx) {
  sched::point(sched::Space::Baseline, tx_id(tx), sched::AccessKind::Read);
  ++sched::primitive_counter();
  return tx->status.load(std::memory_order_acquire);
}

bool CasDstm::cas_status(Tx* tx, std::uint8_t from, std::uint8_t to) {
  sched::point(sched::Space::Baseline, tx_id(tx), sched::AccessKind::Rmw);
  ++sched::primitive_counter();
  return tx->status.compare_exchange_strong(from, to, std::memory_order_acq_rel);
}

std::uint64_t CasDstm::value_of(Locator* l) {
  return load_status(l->tx) == kCommitted ? l->new_value : l->old_value;
}

void CasDstm::begin(std::size_t thread) {
  Thread& t = threads_.at(thread);
  if (t.in_tx) throw std::logic_error("transaction already running");
  t.tx = new_tx();
  t.in_tx = true;
  t.reads.clear();
  t.writes.clear();
}

bool CasDstm::active(std::size_t thread) const { return threads_.at(thread).in_tx; }

void CasDstm::abort(Thread& t, stm::AbortCause cause) {
  cas_status(t.tx, kActive, kAborted);
  t.in_tx = false;
  switch (cause) {
    case stm::AbortCause::Cm:
      ++t.stats.aborts_cm;
      break;
    case stm::AbortCause::Lsa:
      ++t.stats.aborts_lsa;
      break;
    case stm::AbortCause::Enemy:
      ++t.stats.aborts_enemy;
      break;
    default:
      ++t.stats.aborts_user;
      break;
  }
}

bool CasDstm::resolve(Thread& t, Tx* other) {
  for (std::uint32_t attempt = 0;; ++attempt) {
    if (load_status(other) != kActive) return true;
    const stm::ContentionDecision d = stm::cm_decide(cm_, attempt, polite_bound_);
    if (d.proceed) {
      cas_status(other, kActive, kAborted);
      return true;
    }
    if (d.backoff == 0) return false;
    for (std::uint32_t i = 0; i < d.backoff; ++i) sched::point(sched::Space::Idle, 0, sched::AccessKind::Read);
  }
}

bool CasDstm::validate(Thread& t) {
  for (const auto& [o, seen] : t.reads) {
    if (load_head(o) != seen) return false;
  }
  return load_status(t.tx) == kActive;
}

std::optional<std::uint64_t> CasDstm::open_read(std::size_t thread, std::uint32_t object) {
  Thread& t = threads_.at(thread);
  if (!t.in_tx) return std::nullopt;
  for (const auto& [o, l] : t.writes) {
    if (o == object) return l->new_value;
  }
  Locator* h = load_head(object);
  if (h->tx != t.tx && load_status(h->tx) == kActive && !resolve(t, h->tx)) {
    abort(t, stm::AbortCause::Cm);
    return std::nullopt;
  }
  const std::uint64_t v = value_of(h);
  t.reads.emplace_back(object, h);
  // Invisible reads: re-validate everything read so far.
  if (!validate(t)) {
    abort(t, load_status(t.tx) == kActive ? stm::AbortCause::Lsa : stm::AbortCause::Enemy);
    return std::nullopt;
  }
  return v;
}

std::uint64_t* CasDstm::open_write(std::size_t thread, std::uint32_t object) {
  Thread& t = threads_.at(thread);
  if (!t.in_tx) return nullptr;
  for (const auto& [o, l] : t.writes) {
    if (o == object) return &l->new_value;
  }
  for (;;) {
    Locator* h = load_head(object);
    if (h->tx != t.tx && load_status(h->tx) == kActive && !resolve(t, h->tx)) {
      abort(t, stm::AbortCause::Cm);
      return nullptr;
    }
    const std::uint64_t v = value_of(h);
    Locator* mine = new_locator(t.tx, v, v);
    sched::point(sched::Space::Baseline, object, sched::AccessKind::Rmw);
    ++sched::primitive_counter();
    head_cas_.fetch_add(1);
    Locator* expected = h;
    if (objects_[object]->head.compare_exchange_strong(expected, mine, std::memory_order_acq_rel)) {
      t.writes.emplace_back(object, mine);
      for (auto& [o, seen] : t.reads) {
        if (o == object && seen == h) seen = mine;  // our own update is not a conflict
      }
      if (!validate(t)) {
        abort(t, load_status(t.tx) == kActive ? stm::AbortCause::Lsa : stm::AbortCause::Enemy);
        return nullptr;
      }
      return &mine->new_value;
    }
    head_cas_failed_.fetch_add(1);
  }
}

bool CasDstm::commit(std::size_t thread) {
  Thread& t = threads_.at(thread);
  if (!t.in_tx) return false;
  for (const auto& [o, seen] : t.reads) {
    if (load_head(o) != seen) {
      abort(t, stm::AbortCause::Lsa);
      return false;
    }
  }
  t.in_tx = false;
  if (!cas_status(t.tx, kActive, kCommitted)) {
    ++t.stats.aborts_enemy;
    return false;
  }
  ++t.stats.commits;
  return true;
}

std::uint64_t CasDstm::latest(std::uint32_t object) const {
  const Locator* h = objects_.at(object)->head.load();
  return h->tx->status.load() == kCommitted ? h->new_value : h->old_value;
}

const stm::SessionStats& CasDstm::stats(std::size_t thread) const { return threads_.at(thread).stats; }

stm::SessionStats CasDstm::total_stats() const {
  stm::SessionStats s;
  for (const Thread& t : threads_) s += t.stats;
  return s;
}

}  // namespace nbfeb::harness
