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
#include "nbfeb/harness/serial.hpp"

#include <sstream>

namespace nbfeb::harness {

namespace {

using State = std::map<std::uint32_t, std::uint64_t>;

std::uint64_t get(const State& s, std::uint32_t o) {
  const auto it = s.find(o);
  return it == s.end() ? 0 : it->second;
}

// Applies `t` to `s`; false if one of its reads disagrees.
bool replay(const TxnRecord& t, State& s) {
  State local = s;
  for (const TxnOp& op : t.ops) {
    if (op.kind == TxnOp::Kind::Read) {
      if (get(local, op.object) != op.value) return false;
    } else {
      local[op.object] = op.value;
    }
  }
  s = std::move(local);
  return true;
}

struct Search {
  const std::vector<TxnRecord>& txns;
  std::vector<std::size_t> committed;
  std::vector<std::size_t> aborted;
  const std::optional<State>& final_state;
  std::vector<std::size_t> order;
  std::vector<State> states;  // states[k]: after the first k of `order`
  std::string last_failure;

  bool aborted_fit() {
    for (const std::size_t a : aborted) {
      const TxnRecord& t = txns[a];
      bool fits = false;
      for (std::size_t k = 0; k <= order.size() && !fits; ++k) {
        bool rt = true;
        // Committed ones that ended before t began must precede position k;
        // ones that began after t ended must follow it.
        for (std::size_t i = 0; i < order.size() && rt; ++i) {
          const TxnRecord& c = txns[order[i]];
          if (i >= k && c.end < t.begin) rt = false;
          if (i < k && c.begin > t.end) rt = false;
        }
        State s = states[k];
        fits = rt && replay(t, s);
      }
      if (!fits) {
        last_failure = "aborted transaction of thread " + std::to_string(t.thread) + " saw an inconsistent state";
        return false;
      }
    }
    return true;
  }

  bool dfs(std::vector<bool>& used) {
    if (order.size() == committed.size()) {
      if (final_state && states.back() != *final_state) {
        last_failure = "final state differs from every serial order";
        return false;
      }
      return aborted_fit();
    }
    for (std::size_t k = 0; k < committed.size(); ++k) {
      if (used[k]) continue;
      const TxnRecord& t = txns[committed[k]];
      // Every unplaced committed transaction that ended before t began must
      // be placed first.
      bool blocked = false;
      for (std::size_t j = 0; j < committed.size() && !blocked; ++j) {
        blocked = !used[j] && j != k && txns[committed[j]].end < t.begin;
      }
      if (blocked) continue;
      State s = states.back();
      if (!replay(t, s)) continue;
      used[k] = true;
      order.push_back(committed[k]);
      states.push_back(std::move(s));
      if (dfs(used)) return true;
      states.pop_back();
      order.pop_back();
      used[k] = false;
    }
    if (last_failure.empty()) last_failure = "no serial order explains the committed reads";
    return false;
  }
};

}  // namespace

SerialVerdict check_serializable(const State& initial, const std::vector<TxnRecord>& txns,
                                 const std::optional<State>& final_state) {
  std::optional<State> final_norm;
  if (final_state) {
    final_norm = *final_state;
    for (const auto& [o, v] : initial) final_norm->try_emplace(o, v);
  }
  Search s{txns, {}, {}, final_norm, {}, {initial}, {}};
  for (std::size_t i = 0; i < txns.size(); ++i) (txns[i].committed ? s.committed : s.aborted).push_back(i);
  // Objects written only by the final state or by nobody still compare
  // equal: fill the initial state's gaps from the final state keys.
  if (final_norm) {
    for (const auto& [o, v] : *final_norm) s.states[0].try_emplace(o, 0);
  }
  std::vector<bool> used(s.committed.size(), false);
  SerialVerdict v;
  v.ok = s.dfs(used);
  if (v.ok) {
    v.witness = s.order;
  } else {
    v.reason = s.last_failure;
  }
  return v;
}

std::string describe(const std::vector<TxnRecord>& txns) {
  std::ostringstream out;
  for (const TxnRecord& t : txns) {
    out << "T" << t.thread << "[" << t.begin << "," << t.end << "] " << (t.committed ? "commit" : "abort") << ":";
    for (const TxnOp& op : t.ops) {
      out << ' ' << (op.kind == TxnOp::Kind::Read ? 'r' : 'w') << op.object << '=' << op.value;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace nbfeb::harness
