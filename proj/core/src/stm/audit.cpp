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
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "nbfeb/stm/stm.hpp"
#include "stm_internal.hpp"

namespace nbfeb::stm {

using detail::Locator;
using detail::Object;

// A displaced locator (no longer in its owner's slot) can be retired once no
// slot and no live, unretired locator links to it. Before retiring, its own
// link is sealed so that a reader still holding it cannot step onto a
// successor that might be freed independently.
std::size_t Stm::collect() {
  const std::uint32_t high = locators_.high_water();
  std::unordered_set<std::uint32_t> linked;
  for (const auto& obj : objects_) {
    for (std::size_t i = 0; i < config_.threads; ++i) {
      const std::uint32_t l = obj->slots[i].loc.load();
      if (l != 0) linked.insert(l - 1);
    }
  }
  std::unordered_map<std::uint32_t, std::uint32_t> successor;
  for (std::uint32_t loc = 0; loc < high; ++loc) {
    if (!locators_.alive(loc)) continue;
    const Locator& L = locators_.get(loc);
    if (L.retired.load()) continue;
    if (const auto t = link_target(store_.peek(L.next).value)) {
      successor[loc] = *t;
      linked.insert(*t);
    }
  }
  std::size_t retired = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::uint32_t loc = 0; loc < high; ++loc) {
      if (!locators_.alive(loc) || linked.count(loc) != 0) continue;
      Locator& L = locators_.get(loc);
      if (!L.displaced.load() || L.retired.load()) continue;
      L.retired.store(true);
      store_.poke(L.next, FebPair{FebValue::bottom(), true});
      if (const auto it = successor.find(loc); it != successor.end()) {
        // The successor may have lost its only incoming link.
        const std::uint32_t succ = it->second;
        successor.erase(it);
        const bool still = std::any_of(successor.begin(), successor.end(), [&](const auto& e) { return e.second == succ; });
        bool slotted = false;
        for (const auto& obj : objects_) {
          for (std::size_t i = 0; i < config_.threads && !slotted; ++i) slotted = obj->slots[i].loc.load() == succ + 1;
        }
        if (!still && !slotted) {
          linked.erase(succ);
          changed = true;
        }
      }
      epochs_.retire(loc, locators_.birth(loc), [this, loc] { free_locator(loc); });
      ++retired;
    }
  }
  epochs_.reclaim();
  return retired;
}

std::vector<std::uint32_t> Stm::reachable(const Object& obj, bool include_sessions) const {
  std::vector<std::uint32_t> roots;
  for (std::size_t i = 0; i < config_.threads; ++i) {
    const std::uint32_t l = obj.slots[i].loc.load();
    if (l != 0) roots.push_back(l - 1);
  }
  if (include_sessions) {
    for (const auto& s : sessions_) {
      for (const std::uint32_t l : s->held_locators()) {
        if (locators_.alive(l) && locators_.get(l).object == obj.index) roots.push_back(l);
      }
    }
  }
  std::unordered_set<std::uint32_t> seen;
  std::vector<std::uint32_t> out;
  while (!roots.empty()) {
    std::uint32_t loc = roots.back();
    roots.pop_back();
    while (seen.insert(loc).second) {
      out.push_back(loc);
      const auto t = link_target(store_.peek(locators_.get(loc).next).value);
      if (!t) break;
      loc = *t;
    }
  }
  return out;
}

ChainAudit Stm::audit(ObjectId o, bool include_sessions) const {
  const Object& obj = object(o);
  ChainAudit a;
  const auto reach = reachable(obj, include_sessions);
  a.reachable = reach.size();
  a.unreclaimed = obj.live_locators.load();
  for (const std::uint32_t loc : reach) {
    const Locator& L = locators_.get(loc);
    if (const auto t = link_target(store_.peek(L.next).value)) {
      if (locators_.get(*t).cts < L.cts) ++a.monotonicity_violations;
    }
  }
  std::unordered_map<std::uint32_t, int> incoming;
  const std::uint32_t high = locators_.high_water();
  for (std::uint32_t loc = 0; loc < high; ++loc) {
    if (!locators_.alive(loc) || locators_.get(loc).object != o.index) continue;
    if (const auto t = link_target(store_.peek(locators_.get(loc).next).value)) {
      if (++incoming[*t] == 2) ++a.publication_violations;
    }
  }
  return a;
}

std::size_t Stm::audit_live(ObjectId o) const { return object(o).live_locators.load(); }

Data Stm::latest(ObjectId o) const {
  const Object& obj = object(o);
  std::vector<std::pair<Timestamp, std::uint32_t>> starts;
  for (std::size_t i = 0; i < config_.threads; ++i) {
    const std::uint32_t l = obj.slots[i].loc.load();
    if (l != 0) starts.emplace_back(obj.slots[i].ts.load(), l - 1);
  }
  std::stable_sort(starts.begin(), starts.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::optional<std::uint32_t> head;
  for (const auto& [ts, start] : starts) {
    std::uint32_t loc = start;
    FebPair next;
    for (;;) {
      next = store_.peek(locators_.get(loc).next);
      const auto t = link_target(next.value);
      if (!t) break;
      loc = *t;
    }
    if (next.flag && config_.strict) continue;
    if (!head || locators_.get(loc).cts > locators_.get(*head).cts) head = loc;
    if (config_.strict) break;
  }
  if (!head) throw std::logic_error("object " + std::to_string(o.index) + " has no head");
  const Locator& H = locators_.get(*head);
  const std::uint32_t v = peek_status(H.tx) == TxStatus::Committed ? H.new_version : H.old_version;
  return versions_.get(v).data;
}

std::string Stm::dump(ObjectId o) const {
  const Object& obj = object(o);
  std::ostringstream out;
  out << "object " << o.index << '\n';
  for (std::size_t i = 0; i < config_.threads; ++i) {
    const std::uint32_t l = obj.slots[i].loc.load();
    out << "  slot " << i << ": ";
    if (l == 0) {
      out << "-\n";
      continue;
    }
    out << "L" << (l - 1) << " ts=" << obj.slots[i].ts.load() << '\n';
  }
  for (const std::uint32_t loc : reachable(obj, false)) {
    const Locator& L = locators_.get(loc);
    out << "  L" << loc << " tx=" << L.tx << '(' << to_string(peek_status(L.tx)) << ") cts=" << L.cts
        << " old=v" << L.old_version << " new=v" << L.new_version << " next=" << store_.peek(L.next) << '\n';
  }
  return out.str();
}

std::string Stm::dump_json(ObjectId o) const {
  const Object& obj = object(o);
  nlohmann::json j;
  j["object"] = o.index;
  j["slots"] = nlohmann::json::array();
  for (std::size_t i = 0; i < config_.threads; ++i) {
    const std::uint32_t l = obj.slots[i].loc.load();
    if (l == 0) {
      j["slots"].push_back(nullptr);
    } else {
      j["slots"].push_back({{"locator", l - 1}, {"ts", obj.slots[i].ts.load()}});
    }
  }
  j["locators"] = nlohmann::json::array();
  for (const std::uint32_t loc : reachable(obj, false)) {
    const Locator& L = locators_.get(loc);
    const FebPair next = store_.peek(L.next);
    const auto t = link_target(next.value);
    j["locators"].push_back({{"id", loc},
                             {"tx", L.tx},
                             {"status", to_string(peek_status(L.tx))},
                             {"cts", L.cts},
                             {"old", L.old_version},
                             {"new", L.new_version},
                             {"next", t ? nlohmann::json(*t) : nlohmann::json(nullptr)},
                             {"next_flag", next.flag}});
  }
  return j.dump();
}

}  // namespace nbfeb::stm
