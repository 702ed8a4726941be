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
#include "nbfeb/harness/explore.hpp"

#include <memory>
#include <sstream>

#include <json.hpp>

#include "nbfeb/feb/store.hpp"
#include "nbfeb/harness/history.hpp"
#include "nbfeb/harness/serial.hpp"
#include "nbfeb/stm/stm.hpp"

namespace nbfeb::harness {

namespace {

struct StmRun {
  std::unique_ptr<stm::Stm> stm;
  std::vector<stm::ObjectId> objects;
  std::vector<TxnRecord> records;
  std::uint64_t clock = 0;  // real-time event counter
};

// One transaction's ops for a thread; split at `commit`.
std::vector<std::vector<Script::Op>> transactions(const std::vector<Script::Op>& ops) {
  std::vector<std::vector<Script::Op>> out(1);
  for (const Script::Op& op : ops) {
    if (op.name == "commit") {
      out.emplace_back();
    } else {
      out.back().push_back(op);
    }
  }
  if (out.back().empty()) out.pop_back();
  return out;
}

void run_transaction(StmRun& run, std::uint32_t thread, const std::vector<Script::Op>& ops) {
  stm::Session& s = run.stm->session(thread);
  TxnRecord rec;
  rec.thread = thread;
  rec.begin = run.clock++;
  s.begin();
  bool alive = true;
  for (const Script::Op& op : ops) {
    const stm::ObjectId o = run.objects.at(op.target);
    if (op.name == "read") {
      const stm::Data* d = s.open_read(o);
      if (d == nullptr) {
        alive = false;
        break;
      }
      rec.ops.push_back({TxnOp::Kind::Read, op.target, d->u64()});
    } else {
      stm::Data* d = s.open_write(o);
      if (d == nullptr) {
        alive = false;
        break;
      }
      std::uint64_t v = op.value.is_bottom() ? 0 : op.value.raw();
      if (op.name == "incr") {
        rec.ops.push_back({TxnOp::Kind::Read, op.target, d->u64()});
        v = d->u64() + 1;
      }
      d->set_u64(v);
      rec.ops.push_back({TxnOp::Kind::Write, op.target, v});
    }
  }
  rec.committed = alive && s.commit() == stm::TxOutcome::Committed;
  rec.end = run.clock++;
  run.records.push_back(std::move(rec));
}

DporStats explore_stm(const Script& script, std::size_t bound, std::size_t& committed) {
  StmRun run;
  std::map<std::uint32_t, std::uint64_t> initial;
  for (std::uint32_t o = 0; o < script.targets(); ++o) {
    const auto it = script.init.find(o);
    initial[o] = it == script.init.end() ? 0 : it->second.value.raw();
  }
  auto setup = [&](sched::FiberScheduler& fs) {
    run.records.clear();
    run.objects.clear();
    run.clock = 0;
    stm::StmConfig cfg;
    cfg.threads = script.threads.size();
    cfg.cm = script.cm;
    cfg.strict = script.strict;
    cfg.inline_collect = false;
    run.stm = std::make_unique<stm::Stm>(cfg);
    for (const auto& [o, v] : initial) run.objects.push_back(run.stm->create_object(v));
    for (std::uint32_t t = 0; t < script.threads.size(); ++t) {
      fs.spawn([&run, &script, t] {
        for (const auto& tx : transactions(script.threads[t])) run_transaction(run, t, tx);
      });
    }
  };
  auto check = [&]() -> std::optional<std::string> {
    std::ostringstream problems;
    if (run.stm->status_violations() != 0) problems << "a status word changed twice\n";
    std::map<std::uint32_t, std::uint64_t> final_state;
    for (std::uint32_t o = 0; o < run.objects.size(); ++o) {
      const auto a = run.stm->audit(run.objects[o]);
      if (a.monotonicity_violations != 0 || a.publication_violations != 0) {
        problems << "object " << o << " has a malformed locator chain\n";
      }
      final_state[o] = run.stm->latest(run.objects[o]).u64();
    }
    const bool any = std::any_of(run.records.begin(), run.records.end(), [](const TxnRecord& r) { return r.committed; });
    if (any) ++committed;
    const SerialVerdict v = check_serializable(initial, run.records, final_state);
    if (!v.ok) problems << v.reason << '\n';
    if (problems.str().empty()) return std::nullopt;
    std::ostringstream out;
    out << problems.str() << describe(run.records);
    for (const auto& [o, val] : final_state) out << "final " << o << '=' << val << '\n';
    return out.str();
  };
  return explore_all(setup, check, bound);
}

DporStats explore_feb(const Script& script, std::size_t bound, std::size_t& completed) {
  std::unique_ptr<FebStore> store;
  std::vector<WordId> words;
  History h;
  std::uint64_t seq = 0;
  const std::uint32_t n = script.targets();
  std::vector<bool> cleared(n, false);
  for (const auto& ops : script.threads) {
    for (const Script::Op& op : ops) {
      if (op.name == "sac") cleared[op.target] = true;
    }
  }
  auto setup = [&](sched::FiberScheduler& fs) {
    store = std::make_unique<FebStore>();
    words.clear();
    h = History{};
    seq = 0;
    for (std::uint32_t w = 0; w < n; ++w) {
      const auto it = script.init.find(w);
      const FebPair p = it == script.init.end() ? FebPair{} : it->second;
      h.init[w] = p;
      words.push_back(store->alloc(p.value, p.flag));
    }
    for (std::uint32_t t = 0; t < script.threads.size(); ++t) {
      fs.spawn([&, t] {
        for (const Script::Op& op : script.threads[t]) {
          HistoryEvent e;
          e.thread = t;
          e.op = parse_feb_op(op.name);
          e.word = op.target;
          e.operand = op.value;
          e.call = seq++;
          const std::size_t at = h.ops.size();
          h.ops.push_back(e);
          const FebPair r = store->apply(e.op, words[e.word], e.operand);
          h.ops[at].response = r;
          h.ops[at].ret = seq++;
        }
      });
    }
  };
  auto check = [&]() -> std::optional<std::string> {
    ++completed;
    std::ostringstream problems;
    if (!check_linearizable(h).linearizable) problems << "history is not linearizable\n";
    std::vector<int> winners(n, 0);
    for (const HistoryEvent& e : h.ops) {
      if (e.op == FebOp::Tfas && e.response && !e.response->flag) ++winners[e.word];
    }
    for (std::uint32_t w = 0; w < n; ++w) {
      const int limit = h.init[w].flag ? 0 : 1;
      if (!cleared[w] && winners[w] > limit) problems << "word " << w << " was won " << winners[w] << " times\n";
    }
    if (problems.str().empty()) return std::nullopt;
    return problems.str() + format_history(h);
  };
  return explore_all(setup, check, bound);
}

}  // namespace

std::string ExploreReport::to_json() const {
  nlohmann::json j;
  j["phase"] = "explore";
  j["kind"] = kind == Script::Kind::Stm ? "stm" : "feb";
  j["executions"] = executions;
  j["max_depth"] = max_depth;
  j["committed_histories"] = committed_histories;
  j["violations"] = violations.size();
  return j.dump();
}

ExploreReport explore_script(const Script& script, std::size_t bound) {
  ExploreReport r;
  r.kind = script.kind;
  const DporStats stats = script.kind == Script::Kind::Stm ? explore_stm(script, bound, r.committed_histories)
                                                           : explore_feb(script, bound, r.committed_histories);
  r.executions = stats.executions;
  r.max_depth = stats.max_depth;
  r.violations = stats.violations;
  return r;
}

}  // namespace nbfeb::harness
