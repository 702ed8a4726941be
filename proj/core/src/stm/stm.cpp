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
#include "nbfeb/stm/stm.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "nbfeb/sched/hook.hpp"
#include "stm_internal.hpp"

namespace nbfeb::stm {

using detail::Locator;
using detail::Object;
using detail::TxRecord;
using detail::Version;

Stm::Stm(StmConfig config) : config_(config), epochs_(config.threads) {
  if (config_.threads == 0) throw std::invalid_argument("an STM needs at least one thread");
  if (config_.threads > 0xffff) throw std::invalid_argument("too many threads");
  if (config_.payload_bytes == 0) throw std::invalid_argument("payload width must be positive");
  sessions_.reserve(config_.threads);
  for (std::size_t i = 0; i < config_.threads; ++i) {
    sessions_.push_back(std::make_unique<Session>(*this, static_cast<std::uint32_t>(i)));
  }
}

Stm::~Stm() { epochs_.release_all(); }

Object& Stm::object(ObjectId o) const {
  if (o.index >= objects_.size()) throw std::out_of_range("unknown object " + std::to_string(o.index));
  return *objects_[o.index];
}

ObjectId Stm::create_object(std::uint64_t initial) {
  auto obj = std::make_unique<Object>();
  obj->index = static_cast<std::uint32_t>(objects_.size());
  obj->slots = std::make_unique<detail::Slot[]>(config_.threads);

  // Bootstrap: an already-committed transaction with timestamp 0 whose
  // locator carries the initial version as both old and new.
  const std::uint32_t tx = new_tx(0);
  store_.tfas(txs_.get(tx).status, FebValue::of(static_cast<std::uint64_t>(TxStatus::Committed)));
  const std::uint32_t v = new_version(nullptr);
  versions_.get(v).data.set_u64(initial);

  objects_.push_back(std::move(obj));
  const std::uint32_t loc = new_locator(objects_.back()->index);
  Locator& L = locators_.get(loc);
  L.tx = tx;  // the locator inherits the creator's reference
  L.old_version = v;
  L.new_version = v;
  ref_version(v);
  L.cts = 0;
  objects_.back()->slots[0].loc.store(loc + 1);
  return ObjectId{objects_.back()->index};
}

// --- records -----------------------------------------------------------

std::uint32_t Stm::new_tx(std::uint32_t owner) {
  const std::uint32_t tx = txs_.alloc(epochs_.epoch());
  TxRecord& r = txs_.get(tx);
  r.status = store_.alloc_zeroed(WordKind::Data);
  r.owner = owner;
  r.refs.store(1);
  return tx;
}

std::uint32_t Stm::new_version(const Data* copy_of) {
  const std::uint32_t v = versions_.alloc(epochs_.epoch());
  Version& ver = versions_.get(v);
  if (copy_of != nullptr) {
    ver.data = *copy_of;
  } else {
    ver.data.bytes.assign(config_.payload_bytes, 0);
  }
  ver.refs.store(1);
  return v;
}

std::uint32_t Stm::new_locator(std::uint32_t object_index) {
  const std::uint32_t loc = locators_.alloc(epochs_.epoch());
  Locator& L = locators_.get(loc);
  L.object = object_index;
  L.old_version = kNoVersion;
  L.new_version = kNoVersion;
  L.next = store_.alloc(FebValue::bottom(), false, WordKind::Link);
  const std::size_t live = object(object_index).live_locators.fetch_add(1) + 1;
  std::size_t prev = live_max_.load();
  while (prev < live && !live_max_.compare_exchange_weak(prev, live)) {
  }
  return loc;
}

void Stm::ref_tx(std::uint32_t tx) { txs_.get(tx).refs.fetch_add(1); }

void Stm::unref_tx(std::uint32_t tx) {
  TxRecord& r = txs_.get(tx);
  if (r.refs.fetch_sub(1) == 1) {
    store_.free(r.status);
    txs_.free(tx);
  }
}

void Stm::ref_version(std::uint32_t v) { versions_.get(v).refs.fetch_add(1); }

void Stm::unref_version(std::uint32_t v) {
  if (versions_.get(v).refs.fetch_sub(1) == 1) versions_.free(v);
}

void Stm::free_locator(std::uint32_t loc) {
  Locator& L = locators_.get(loc);
  if (L.old_version != kNoVersion) unref_version(L.old_version);
  if (L.new_version != kNoVersion) unref_version(L.new_version);
  unref_tx(L.tx);
  store_.free(L.next);
  object(L.object).live_locators.fetch_sub(1);
  locators_.free(loc);
}

// --- shared-memory steps ---------------------------------------------------

SlotView Stm::read_slot(Object& obj, std::uint32_t i) {
  sched::point(sched::Space::Slot, slot_key(obj.index, i), sched::AccessKind::Read);
  ++sched::primitive_counter();
  detail::Slot& s = obj.slots[i];
  for (;;) {
    const std::uint64_t s1 = s.seq.load(std::memory_order_acquire);
    if (s1 & 1U) continue;
    SlotView v{s.loc.load(std::memory_order_acquire), s.ts.load(std::memory_order_acquire), s1};
    std::atomic_thread_fence(std::memory_order_acquire);
    if (s.seq.load(std::memory_order_relaxed) == s1) return v;
  }
}

void Stm::write_slot(Object& obj, std::uint32_t i, std::uint32_t loc, Timestamp ts) {
  sched::point(sched::Space::Slot, slot_key(obj.index, i), sched::AccessKind::Write);
  ++sched::primitive_counter();
  detail::Slot& s = obj.slots[i];
  const std::uint64_t seq = s.seq.load(std::memory_order_relaxed);
  s.seq.store(seq + 1, std::memory_order_relaxed);
  std::atomic_thread_fence(std::memory_order_release);
  s.loc.store(loc, std::memory_order_relaxed);
  s.ts.store(ts, std::memory_order_relaxed);
  s.seq.store(seq + 2, std::memory_order_release);
}

std::vector<SlotView> Stm::snapshot_slots(ObjectId o) {
  Object& obj = object(o);
  const auto n = static_cast<std::uint32_t>(config_.threads);
  std::vector<SlotView> a(n);
  std::vector<SlotView> b(n);
  for (std::uint32_t i = 0; i < n; ++i) a[i] = read_slot(obj, i);
  if (n == 1) return a;
  for (;;) {
    for (std::uint32_t i = 0; i < n; ++i) b[i] = read_slot(obj, i);
    bool same = true;
    for (std::uint32_t i = 0; i < n && same; ++i) same = a[i].seq == b[i].seq;
    if (same) return b;
    std::swap(a, b);
  }
}

Timestamp Stm::load_cts(std::uint32_t tx) {
  sched::point(sched::Space::TxCts, tx, sched::AccessKind::Read);
  ++sched::primitive_counter();
  return txs_.get(tx).cts.load(std::memory_order_seq_cst);
}

void Stm::store_cts(std::uint32_t tx, Timestamp ts) {
  sched::point(sched::Space::TxCts, tx, sched::AccessKind::Write);
  ++sched::primitive_counter();
  txs_.get(tx).cts.store(ts, std::memory_order_seq_cst);
}

FebPair Stm::tfas_status(std::uint32_t tx, TxStatus s) {
  TxRecord& r = txs_.get(tx);
  const FebPair old = store_.tfas(r.status, FebValue::of(static_cast<std::uint64_t>(s)));
  if (!old.flag && r.transitions.fetch_add(1) >= 1) status_violations_.fetch_add(1);
  return old;
}

void Stm::abort_enemy(std::uint32_t tx) { tfas_status(tx, TxStatus::Aborted); }

TxStatus Stm::peek_status(std::uint32_t tx) const {
  return static_cast<TxStatus>(store_.peek(txs_.get(tx).status).value.raw());
}

// --- version views ---------------------------------------------------------

std::vector<lsa::VersionView> Stm::versions_from(const std::vector<SlotView>& snap, Timestamp c) {
  struct Acc {
    std::uint32_t version;
    Timestamp lower;
    Timestamp upper = lsa::kInfinity;  // known end of validity, if any
    Timestamp soft = lsa::kInfinity;   // limit implied by an active successor
  };
  std::vector<Acc> acc;
  auto add = [&](std::uint32_t v, Timestamp lower, Timestamp upper, Timestamp soft) {
    auto it = std::find_if(acc.begin(), acc.end(), [&](const Acc& a) { return a.version == v; });
    if (it == acc.end()) {
      acc.push_back(Acc{v, lower});
      it = std::prev(acc.end());
    }
    it->upper = std::min(it->upper, upper);
    it->soft = std::min(it->soft, soft);
  };

  std::vector<std::uint32_t> seen;
  for (const SlotView& s : snap) {
    if (s.locator == 0) continue;
    const std::uint32_t loc = s.locator - 1;
    if (std::find(seen.begin(), seen.end(), loc) != seen.end()) continue;
    seen.push_back(loc);
    const Locator& L = locators_.get(loc);
    const TxStatus st = load_status(L.tx);
    if (st == TxStatus::Committed) {
      const Timestamp tc = load_cts(L.tx);
      if (L.old_version != L.new_version) add(L.old_version, L.cts, tc, lsa::kInfinity);
      add(L.new_version, tc, lsa::kInfinity, lsa::kInfinity);
    } else if (st == TxStatus::Aborted) {
      add(L.old_version, L.cts, lsa::kInfinity, lsa::kInfinity);
    } else {
      // An active owner may be drawing its commit timestamp right now. While
      // the marker is up the outcome is unknown, so only the commit instant
      // of the old version itself is certain.
      const Timestamp tc = load_cts(L.tx);
      const Timestamp soft = tc == kPending ? L.cts + 1 : (tc != 0 ? tc : lsa::kInfinity);
      add(L.old_version, L.cts, lsa::kInfinity, soft);
    }
  }

  std::vector<lsa::VersionView> out;
  if (acc.empty()) return out;
  const auto latest = std::max_element(acc.begin(), acc.end(), [](const Acc& a, const Acc& b) {
    return a.lower < b.lower;
  });
  for (auto it = acc.begin(); it != acc.end(); ++it) {
    Timestamp upper = it->upper;
    if (upper == lsa::kInfinity) {
      if (it != latest || it->lower > c) {
        upper = it->lower + 1;
      } else {
        upper = std::min(c + 1, it->soft);
      }
      upper = std::max(upper, it->lower + 1);
    }
    out.push_back(lsa::VersionView{it->version, it->lower, {it->lower, upper}});
  }
  return out;
}

std::vector<lsa::VersionView> Stm::object_versions(ObjectId o) {
  const Timestamp c = clock_.now();
  return versions_from(snapshot_slots(o), c);
}

TxStatus Stm::load_status(std::uint32_t tx) {
  return static_cast<TxStatus>(store_.load(txs_.get(tx).status).value.raw());
}

SessionStats Stm::total_stats() const {
  SessionStats total;
  for (const auto& s : sessions_) total += s->stats();
  return total;
}

}  // namespace nbfeb::stm
