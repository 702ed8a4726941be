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
#include <algorithm>
#include <stdexcept>
#include <thread>

#include "nbfeb/sched/hook.hpp"
#include "nbfeb/stm/stm.hpp"
#include "stm_internal.hpp"

namespace nbfeb::stm {

using detail::Locator;
using detail::Object;

Session::Session(Stm& stm, std::uint32_t index) : stm_(stm), index_(index) {}

Session::~Session() = default;

std::vector<SlotView> Session::protected_snapshot(ObjectId o) {
  return stm_.epochs_.protect(index_, [&] { return stm_.snapshot_slots(o); });
}

std::vector<lsa::VersionView> Session::protected_versions(ObjectId o) {
  const Timestamp c = stm_.clock_.now();
  return stm_.versions_from(protected_snapshot(o), c);
}

void Session::begin() {
  if (in_tx_) throw std::logic_error("nested transactions are not supported");
  stm_.epochs_.pin(index_);
  tx_ = stm_.new_tx(index_);
  stm_.store_.sac(stm_.txs_.get(tx_).status, FebValue::of(static_cast<std::uint64_t>(TxStatus::Active)));
  lsa_.start(stm_.clock_.now());
  last_cause_ = AbortCause::None;
  in_tx_ = true;
}

void Session::finish(TxOutcome outcome) {
  if (outcome == TxOutcome::Committed) ++stats_.commits;
  reads_.clear();
  writes_.clear();
  held_new_.store(0);
  held_head_.store(0);
  held_old_.store(0);
  in_tx_ = false;
  stm_.unref_tx(tx_);
  stm_.epochs_.unpin(index_);
  stm_.epochs_.advance();
  if (stm_.config_.inline_collect && ++ends_ % std::max<std::uint32_t>(1, stm_.config_.collect_period) == 0) {
    stm_.collect();
  }
}

bool Session::self_abort(AbortCause cause) {
  const FebPair old = stm_.tfas_status(tx_, TxStatus::Aborted);
  // Losing the race means an enemy got there first.
  last_cause_ = old.flag ? AbortCause::Enemy : cause;
  switch (last_cause_) {
    case AbortCause::Cm: ++stats_.aborts_cm; break;
    case AbortCause::Lsa: ++stats_.aborts_lsa; break;
    case AbortCause::Enemy: ++stats_.aborts_enemy; break;
    case AbortCause::User: ++stats_.aborts_user; break;
    case AbortCause::None: break;
  }
  finish(TxOutcome::Aborted);
  return false;
}

void Session::abort() {
  if (!in_tx_) return;
  self_abort(AbortCause::User);
}

std::optional<Timestamp> Session::extend() {
  // Objects opened for write stay current as long as this transaction is
  // alive, so only the read set can cap the range.
  if (stm_.load_status(tx_) != TxStatus::Active) return std::nullopt;
  Timestamp upper = lsa::kInfinity;
  for (const ReadEntry& r : reads_) {
    const auto views = protected_versions(ObjectId{r.object});
    const auto it = std::find_if(views.begin(), views.end(), [&](const auto& v) { return v.version == r.version; });
    if (it == views.end()) return std::nullopt;
    upper = std::min(upper, it->range.upper);
  }
  return upper;
}

const Data* Session::open_read(ObjectId o) {
  if (!in_tx_) throw std::logic_error("open_read outside a transaction");
  for (const WriteEntry& w : writes_) {
    if (w.object == o.index) return &stm_.versions_.get(stm_.locators_.get(w.locator).new_version).data;
  }
  for (const ReadEntry& r : reads_) {
    if (r.object == o.index) return &stm_.versions_.get(r.version).data;
  }
  const auto views = protected_versions(o);
  const auto pick = lsa_.open(views, lsa::OpenMode::Read, [this] { return extend(); });
  if (!pick) {
    self_abort(AbortCause::Lsa);
    return nullptr;
  }
  reads_.push_back(ReadEntry{o.index, pick->version, pick->commit_ts});
  return &stm_.versions_.get(pick->version).data;
}

std::uint32_t Session::find_head(ObjectId o) {
  ++stats_.find_head_calls;
  Object& obj = stm_.object(o);
  const std::uint32_t head = stm_.config_.strict ? find_head_strict(obj) : find_head_literal(obj);
  stats_.find_head_iterations_max = std::max(stats_.find_head_iterations_max, last_find_iterations_);
  return head;
}

namespace {

Timestamp latest_ts(const std::vector<SlotView>& snap) {
  Timestamp m = 0;
  for (const auto& s : snap) {
    if (s.locator != 0) m = std::max(m, s.ts);
  }
  return m;
}

}  // namespace

std::uint32_t Session::find_head_literal(Object& obj) {
  const ObjectId o{obj.index};
  for (std::uint32_t iter = 1;; ++iter) {
    const auto start = protected_snapshot(o);
    const auto latest = std::max_element(start.begin(), start.end(), [](const SlotView& a, const SlotView& b) {
      return (a.locator != 0 ? a.ts : 0) < (b.locator != 0 ? b.ts : 0) || (a.locator == 0 && b.locator != 0);
    });
    std::uint32_t tmp = latest->locator - 1;
    for (;;) {
      const FebPair next = stm_.epochs_.protect(index_, [&] { return stm_.store_.load(stm_.locators_.get(tmp).next); });
      const auto target = link_target(next.value);
      if (!target) break;
      tmp = *target;
    }
    const auto again = protected_snapshot(o);
    if (stm_.locators_.get(tmp).cts >= latest_ts(again)) {
      last_find_iterations_ = iter;
      return tmp;
    }
  }
}

// A reset link is sealed (bottom with the flag set), so a clear bottom link
// identifies the head unambiguously. Starting points are tried from the
// highest timestamp down; the timestamp check still guards the result.
std::uint32_t Session::find_head_strict(Object& obj) {
  const ObjectId o{obj.index};
  for (std::uint32_t iter = 1;; ++iter) {
    auto start = protected_snapshot(o);
    std::erase_if(start, [](const SlotView& s) { return s.locator == 0; });
    std::stable_sort(start.begin(), start.end(), [](const SlotView& a, const SlotView& b) { return a.ts > b.ts; });
    std::vector<std::uint32_t> tried;
    for (const SlotView& s : start) {
      std::uint32_t tmp = s.locator - 1;
      if (std::find(tried.begin(), tried.end(), tmp) != tried.end()) continue;
      tried.push_back(tmp);
      FebPair next;
      for (;;) {
        next = stm_.epochs_.protect(index_, [&] { return stm_.store_.load(stm_.locators_.get(tmp).next); });
        const auto target = link_target(next.value);
        if (!target) break;
        tmp = *target;
      }
      if (next.flag) continue;  // sealed: an obsolete chain
      const auto again = protected_snapshot(o);
      if (stm_.locators_.get(tmp).cts >= latest_ts(again)) {
        last_find_iterations_ = iter;
        return tmp;
      }
    }
  }
}

void Session::reset_link(std::uint32_t loc) {
  const WordId next = stm_.locators_.get(loc).next;
  if (stm_.config_.strict) {
    stm_.store_.sas(next, FebValue::bottom());
  } else {
    stm_.store_.sac(next, FebValue::bottom());
  }
}

void Session::drop_unpublished(std::uint32_t loc) {
  held_new_.store(0);
  stm_.free_locator(loc);
}

void Session::backoff(std::uint32_t steps) {
  for (std::uint32_t k = 0; k < steps; ++k) {
    if (sched::in_fiber()) {
      sched::point(sched::Space::Idle, index_, sched::AccessKind::Read);
    } else {
      std::this_thread::yield();
    }
  }
}

Data* Session::open_write(ObjectId o) {
  if (!in_tx_) throw std::logic_error("open_write outside a transaction");
  for (const WriteEntry& w : writes_) {
    if (w.object == o.index) return &stm_.versions_.get(stm_.locators_.get(w.locator).new_version).data;
  }
  Object& obj = stm_.object(o);
  const std::uint32_t me = tx_;

  const std::uint32_t loc = stm_.new_locator(o.index);
  Locator& L = stm_.locators_.get(loc);
  L.tx = me;
  stm_.ref_tx(me);
  held_new_.store(loc + 1);

  std::uint32_t attempt = 0;
  for (;;) {
    const Timestamp c = stm_.clock_.now();
    const std::uint32_t head = find_head(o);
    held_head_.store(head + 1);
    const Locator& H = stm_.locators_.get(head);

    // Look at the head's owner at most twice before finding the head again.
    std::optional<TxStatus> settled;
    for (int k = 0; k < 2 && !settled; ++k) {
      const TxStatus st = stm_.load_status(H.tx);
      if (st != TxStatus::Active) {
        settled = st;
        break;
      }
      const ContentionDecision d = cm_decide(stm_.config_.cm, attempt, stm_.config_.polite_bound);
      if (d.proceed) {
        stm_.abort_enemy(H.tx);
        continue;
      }
      if (d.backoff > 0) {
        backoff(d.backoff);
        ++attempt;
        break;
      }
      drop_unpublished(loc);
      self_abort(AbortCause::Cm);
      return nullptr;
    }
    if (!settled) continue;

    std::uint32_t base;
    Timestamp base_cts;
    if (*settled == TxStatus::Committed) {
      base = H.new_version;
      base_cts = stm_.load_cts(H.tx);
    } else {
      base = H.old_version;
      base_cts = H.cts;
    }
    if (L.old_version != kNoVersion) stm_.unref_version(L.old_version);
    if (L.new_version != kNoVersion) stm_.unref_version(L.new_version);
    stm_.ref_version(base);
    L.old_version = base;
    L.cts = base_cts;
    L.new_version = stm_.new_version(&stm_.versions_.get(base).data);

    stm_.store_.sac(L.next, FebValue::bottom());

    const lsa::VersionView view{base, base_cts, {base_cts, std::max(c, base_cts) + 1}};
    if (!lsa_.open(std::span(&view, 1), lsa::OpenMode::Write, [this] { return extend(); })) {
      drop_unpublished(loc);
      self_abort(AbortCause::Lsa);
      return nullptr;
    }
    if (stm_.load_status(me) == TxStatus::Aborted) {
      drop_unpublished(loc);
      self_abort(AbortCause::Enemy);
      return nullptr;
    }

    const FebPair r = stm_.store_.tfas(H.next, link_to(loc));
    const bool appended = stm_.config_.strict ? !r.flag : r.value.is_bottom();
    if (!appended) continue;  // another locator got there first
    held_new_.store(0);

    if (stm_.config_.strict && L.cts < latest_ts(protected_snapshot(o))) {
      // Appended behind an obsolete head. Nobody will ever slot this
      // locator; let it die with the chain.
      L.displaced.store(true);
      self_abort(AbortCause::Lsa);
      return nullptr;
    }

    const SlotView mine = stm_.read_slot(obj, index_);
    held_old_.store(mine.locator);
    stm_.write_slot(obj, index_, loc + 1, L.cts);
    if (mine.locator != 0) {
      reset_link(mine.locator - 1);
      stm_.locators_.get(mine.locator - 1).displaced.store(true);
    }
    const auto now = protected_snapshot(o);
    for (std::uint32_t j = 0; j < now.size(); ++j) {
      if (j == index_ || now[j].locator == 0 || now[j].ts >= L.cts) continue;
      reset_link(now[j].locator - 1);
    }
    held_old_.store(0);
    held_head_.store(0);
    writes_.push_back(WriteEntry{o.index, loc});
    return &stm_.versions_.get(L.new_version).data;
  }
}

TxOutcome Session::commit() {
  if (!in_tx_) return TxOutcome::Aborted;
  if (writes_.empty()) {
    finish(TxOutcome::Committed);
    return TxOutcome::Committed;
  }
  stm_.store_cts(tx_, kPending);
  const Timestamp t = stm_.clock_.tick();
  stm_.store_cts(tx_, t);
  for (const ReadEntry& r : reads_) {
    const bool written = std::any_of(writes_.begin(), writes_.end(), [&](const WriteEntry& w) { return w.object == r.object; });
    if (written) continue;
    const auto views = protected_versions(ObjectId{r.object});
    const auto it = std::find_if(views.begin(), views.end(), [&](const auto& v) { return v.version == r.version; });
    if (it == views.end() || it->range.upper < t) {
      self_abort(AbortCause::Lsa);
      return TxOutcome::Aborted;
    }
  }
  // Without the strict re-check a head is not unique, so a written object's
  // base version must also still be current at t. This rejects two commits
  // built on the same base through different chains.
  for (const WriteEntry& w : stm_.config_.strict ? std::vector<WriteEntry>{} : writes_) {
    const std::uint32_t base = stm_.locators_.get(w.locator).old_version;
    const auto views = protected_versions(ObjectId{w.object});
    const auto it = std::find_if(views.begin(), views.end(), [&](const auto& v) { return v.version == base; });
    if (it == views.end() || it->range.upper < t) {
      self_abort(AbortCause::Lsa);
      return TxOutcome::Aborted;
    }
  }
  const FebPair old = stm_.tfas_status(tx_, TxStatus::Committed);
  if (old.flag) {
    last_cause_ = AbortCause::Enemy;
    ++stats_.aborts_enemy;
    finish(TxOutcome::Aborted);
    return TxOutcome::Aborted;
  }
  finish(TxOutcome::Committed);
  return TxOutcome::Committed;
}

std::vector<std::uint32_t> Session::held_locators() const {
  std::vector<std::uint32_t> out;
  for (const auto* h : {&held_new_, &held_head_, &held_old_}) {
    const std::uint32_t v = h->load();
    if (v != 0) out.push_back(v - 1);
  }
  return out;
}

}  // namespace nbfeb::stm
