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
#include "nbfeb/harness/workloads.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "nbfeb/consensus/consensus.hpp"
#include "nbfeb/feb/store.hpp"
#include "nbfeb/net/simulator.hpp"
#include "nbfeb/sched/fiber.hpp"
#include "nbfeb/stm/stm.hpp"

namespace nbfeb::harness {

namespace {

// Random interleaving that also records the largest number of runnable
// fibers whose next step targets the same location.
class TrackingPolicy : public sched::Policy {
 public:
  explicit TrackingPolicy(std::uint64_t seed) : inner_(seed) {}

  std::optional<std::size_t> pick(sched::FiberScheduler& s) override {
    std::unordered_map<std::uint64_t, std::uint64_t> pending;
    for (const std::size_t f : s.runnable_set()) {
      const std::uint64_t loc = s.pending(f).location;
      if (loc >> 56 == static_cast<std::uint64_t>(sched::Space::Idle)) continue;
      max_level_ = std::max(max_level_, ++pending[loc]);
    }
    return inner_.pick(s);
  }

  [[nodiscard]] std::uint64_t max_level() const noexcept { return max_level_; }

 private:
  sched::RandomPolicy inner_;
  std::uint64_t max_level_ = 0;
};

struct Exec {
  std::uint64_t primitives = 0;
  std::uint64_t max_level = 0;
};

// Runs body(w) for every worker w, as fibers or as threads.
Exec execute(RunMode mode, std::size_t workers, std::uint64_t seed, const std::function<void(std::size_t)>& body) {
  std::vector<std::uint64_t> prims(workers, 0);
  auto wrapped = [&](std::size_t w) {
    const std::uint64_t before = sched::primitive_counter();
    body(w);
    prims[w] = sched::primitive_counter() - before;
  };
  Exec e;
  if (mode == RunMode::Sim) {
    sched::FiberScheduler fs(256 * 1024);
    for (std::size_t w = 0; w < workers; ++w) fs.spawn([&wrapped, w] { wrapped(w); });
    TrackingPolicy p(seed);
    fs.run(p);
    e.max_level = p.max_level();
  } else {
    std::vector<std::thread> ts;
    ts.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) ts.emplace_back(wrapped, w);
    for (auto& t : ts) t.join();
  }
  for (const std::uint64_t p : prims) e.primitives += p;
  return e;
}

stm::StmConfig stm_config(const RunConfig& c) {
  if (c.payload < 8) throw UsageError("--payload must be at least 8 bytes for transactional workloads");
  stm::StmConfig s;
  s.threads = c.threads;
  s.payload_bytes = c.payload;
  s.cm = c.cm;
  s.strict = c.strict;
  s.inline_collect = c.mode == RunMode::Sim;
  return s;
}

PhaseStats stm_phase(const std::string& name, stm::Stm& stm, const Exec& e, std::uint64_t seed) {
  const stm::SessionStats t = stm.total_stats();
  PhaseStats p;
  p.phase = name;
  p.commits = t.commits;
  p.aborts_cm = t.aborts_cm;
  p.aborts_lsa = t.aborts_lsa;
  p.aborts_enemy = t.aborts_enemy;
  p.controller_requests = e.primitives;
  p.max_contention_level = e.max_level;
  p.live_locators_max = stm.live_locators_max();
  p.seed = seed;
  p.counts["find_head_iterations_max"] = t.find_head_iterations_max;
  return p;
}

std::uint64_t worker_seed(std::uint64_t seed, std::size_t w) { return seed * 0x9e3779b97f4a7c15ULL + w + 1; }

RunResult run_counter(const RunConfig& c) {
  stm::Stm stm(stm_config(c));
  const stm::ObjectId o = stm.create_object(0);
  const Exec e = execute(c.mode, c.threads, c.seed, [&](std::size_t w) {
    stm::Session& s = stm.session(w);
    for (std::size_t i = 0; i < c.ops; ++i) {
      s.begin();
      if (stm::Data* d = s.open_write(o)) {
        d->set_u64(d->u64() + 1);
        s.commit();
      }
    }
  });
  if (c.mode == RunMode::Threads) stm.collect();
  RunResult r;
  PhaseStats p = stm_phase("counter", stm, e, c.seed);
  const std::uint64_t final_value = stm.latest(o).u64();
  r.violations = final_value == p.commits ? 0 : 1;
  p.counts["final"] = static_cast<std::int64_t>(final_value);
  p.counts["violations"] = static_cast<std::int64_t>(r.violations);
  r.phases.push_back(std::move(p));
  return r;
}

RunResult run_invariant_pair(const RunConfig& c) {
  constexpr std::uint64_t kTotal = 100;
  stm::Stm stm(stm_config(c));
  const stm::ObjectId x = stm.create_object(kTotal / 2);
  const stm::ObjectId y = stm.create_object(kTotal - kTotal / 2);
  std::atomic<std::uint64_t> snapshots{0};
  std::atomic<std::uint64_t> bad{0};
  const Exec e = execute(c.mode, c.threads, c.seed, [&](std::size_t w) {
    stm::Session& s = stm.session(w);
    std::mt19937_64 rng(worker_seed(c.seed, w));
    for (std::size_t i = 0; i < c.ops; ++i) {
      s.begin();
      if (rng() % 2 == 0) {
        stm::Data* a = s.open_write(x);
        stm::Data* b = a != nullptr ? s.open_write(y) : nullptr;
        if (b == nullptr) continue;
        if (a->u64() + b->u64() != kTotal) bad.fetch_add(1);
        // Move a random amount one way or the other, staying in [0, total].
        const bool to_y = rng() % 2 == 0;
        stm::Data* from = to_y ? a : b;
        stm::Data* to = to_y ? b : a;
        const std::uint64_t amount = from->u64() == 0 ? 0 : rng() % (from->u64() + 1);
        from->set_u64(from->u64() - amount);
        to->set_u64(to->u64() + amount);
        s.commit();
      } else {
        const stm::Data* a = s.open_read(x);
        const stm::Data* b = a != nullptr ? s.open_read(y) : nullptr;
        if (b == nullptr) continue;
        snapshots.fetch_add(1);
        if (a->u64() + b->u64() != kTotal) bad.fetch_add(1);
        s.commit();
      }
    }
  });
  if (c.mode == RunMode::Threads) stm.collect();
  RunResult r;
  PhaseStats p = stm_phase("invariant-pair", stm, e, c.seed);
  const bool final_ok = stm.latest(x).u64() + stm.latest(y).u64() == kTotal;
  r.violations = bad.load() + (final_ok ? 0 : 1);
  p.counts["snapshots"] = static_cast<std::int64_t>(snapshots.load());
  p.counts["violations"] = static_cast<std::int64_t>(r.violations);
  r.phases.push_back(std::move(p));
  return r;
}

// Values carry a write stamp in their low 40 bits. A transaction that
// starts after a commit returned must see that commit's stamp or a later one.
RunResult run_list_shuffle(const RunConfig& c) {
  constexpr unsigned kStampBits = 40;
  constexpr std::uint64_t kStampMask = (std::uint64_t{1} << kStampBits) - 1;
  const std::size_t k = std::max<std::size_t>(4, c.threads + 1);
  stm::Stm stm(stm_config(c));
  std::vector<stm::ObjectId> objs;
  for (std::size_t i = 0; i < k; ++i) objs.push_back(stm.create_object(std::uint64_t{i} << kStampBits));
  std::vector<std::atomic<std::uint64_t>> published(k);
  std::atomic<std::uint64_t> stamp{0};
  std::atomic<std::uint64_t> checked{0};
  std::atomic<std::uint64_t> bad{0};
  auto check = [&](std::size_t o, std::uint64_t value, const std::vector<std::uint64_t>& floor) {
    checked.fetch_add(1);
    if ((value & kStampMask) < floor[o]) bad.fetch_add(1);
  };
  const Exec e = execute(c.mode, c.threads, c.seed, [&](std::size_t w) {
    stm::Session& s = stm.session(w);
    std::mt19937_64 rng(worker_seed(c.seed, w));
    std::vector<std::uint64_t> floor(k);
    for (std::size_t i = 0; i < c.ops; ++i) {
      for (std::size_t o = 0; o < k; ++o) floor[o] = published[o].load();
      s.begin();
      if (rng() % 4 == 0) {
        bool alive = true;
        for (std::size_t o = 0; o < k && alive; ++o) {
          const stm::Data* d = s.open_read(objs[o]);
          alive = d != nullptr;
          if (alive) check(o, d->u64(), floor);
        }
        if (alive) s.commit();
        continue;
      }
      const std::size_t a = rng() % k;
      const std::size_t b = (a + 1 + rng() % (k - 1)) % k;
      stm::Data* da = s.open_write(objs[a]);
      if (da == nullptr) continue;
      check(a, da->u64(), floor);
      stm::Data* db = s.open_write(objs[b]);
      if (db == nullptr) continue;
      check(b, db->u64(), floor);
      const std::uint64_t va = da->u64() >> kStampBits;
      const std::uint64_t vb = db->u64() >> kStampBits;
      const std::uint64_t sa = stamp.fetch_add(1) + 1;
      const std::uint64_t sb = stamp.fetch_add(1) + 1;
      da->set_u64(vb << kStampBits | sa);
      db->set_u64(va << kStampBits | sb);
      if (s.commit() == stm::TxOutcome::Committed) {
        for (const auto& [o, st] : {std::pair{a, sa}, std::pair{b, sb}}) {
          std::uint64_t prev = published[o].load();
          while (prev < st && !published[o].compare_exchange_weak(prev, st)) {
          }
        }
      }
    }
  });
  if (c.mode == RunMode::Threads) stm.collect();
  RunResult r;
  PhaseStats p = stm_phase("list-shuffle", stm, e, c.seed);
  std::vector<std::uint64_t> values;
  for (const auto& o : objs) values.push_back(stm.latest(o).u64() >> kStampBits);
  std::sort(values.begin(), values.end());
  bool permutation = true;
  for (std::size_t i = 0; i < k; ++i) permutation = permutation && values[i] == i;
  r.violations = bad.load() + (permutation ? 0 : 1);
  p.counts["objects"] = static_cast<std::int64_t>(k);
  p.counts["reads_checked"] = static_cast<std::int64_t>(checked.load());
  p.counts["violations"] = static_cast<std::int64_t>(r.violations);
  r.phases.push_back(std::move(p));
  return r;
}

RunResult run_consensus(const RunConfig& c) {
  FebStore store;
  const std::size_t n = c.threads;
  std::uint64_t bad = 0;
  std::uint64_t prims = 0;
  std::uint64_t level = 0;
  std::uint64_t max_prims = 0;
  auto judge = [&](const std::vector<FebValue>& decided, const std::vector<std::uint64_t>& used) {
    for (std::size_t w = 0; w < n; ++w) {
      const bool valid = !decided[w].is_bottom() && decided[w].raw() >= 1 && decided[w].raw() <= n;
      if (!valid || decided[w] != decided[0] || used[w] != 1) ++bad;
      prims += used[w];
      max_prims = std::max(max_prims, used[w]);
    }
  };
  if (c.mode == RunMode::Sim) {
    for (std::size_t trial = 0; trial < c.ops; ++trial) {
      consensus::ConsensusInstance inst(store);
      std::vector<FebValue> decided(n);
      std::vector<std::uint64_t> used(n);
      const Exec e = execute(RunMode::Sim, n, worker_seed(c.seed, trial), [&](std::size_t w) {
        const std::uint64_t before = sched::primitive_counter();
        decided[w] = inst.propose(FebValue::of(w + 1));
        used[w] = sched::primitive_counter() - before;
      });
      level = std::max(level, e.max_level);
      judge(decided, used);
    }
  } else {
    std::vector<std::unique_ptr<consensus::ConsensusInstance>> insts;
    for (std::size_t trial = 0; trial < c.ops; ++trial) insts.push_back(std::make_unique<consensus::ConsensusInstance>(store));
    std::vector<std::vector<FebValue>> decided(c.ops, std::vector<FebValue>(n));
    std::vector<std::vector<std::uint64_t>> used(c.ops, std::vector<std::uint64_t>(n));
    execute(RunMode::Threads, n, c.seed, [&](std::size_t w) {
      for (std::size_t trial = 0; trial < c.ops; ++trial) {
        const std::uint64_t before = sched::primitive_counter();
        decided[trial][w] = insts[trial]->propose(FebValue::of(w + 1));
        used[trial][w] = sched::primitive_counter() - before;
      }
    });
    for (std::size_t trial = 0; trial < c.ops; ++trial) judge(decided[trial], used[trial]);
  }
  RunResult r;
  r.violations = bad;
  PhaseStats p;
  p.phase = "consensus";
  p.controller_requests = prims;
  p.max_contention_level = level;
  p.seed = c.seed;
  p.counts["trials"] = static_cast<std::int64_t>(c.ops);
  p.counts["primitives_per_propose_max"] = static_cast<std::int64_t>(max_prims);
  p.counts["violations"] = static_cast<std::int64_t>(bad);
  r.phases.push_back(std::move(p));
  return r;
}

RunResult run_contention_sweep(const RunConfig& c) {
  RunResult r;
  for (unsigned d = 0; d <= c.depth; ++d) {
    const ContentionReport rep = compare_contention(c.ops, d, c.arity, c.seed);
    if (rep.nbfeb.winners != 1 || rep.cas.winners != 1) ++r.violations;
    for (PhaseStats& p : rep.phases(c.seed)) r.phases.push_back(std::move(p));
  }
  return r;
}

}  // namespace

const std::vector<std::string>& workload_names() {
  static const std::vector<std::string> names{"counter", "invariant-pair", "list-shuffle", "consensus",
                                              "contention-sweep"};
  return names;
}

std::string PhaseStats::to_json() const {
  nlohmann::json j;
  j["phase"] = phase;
  j["commits"] = commits;
  j["aborts"] = {{"cm", aborts_cm}, {"lsa", aborts_lsa}, {"enemy", aborts_enemy}};
  j["controller_requests"] = controller_requests;
  j["max_contention_level"] = max_contention_level;
  j["live_locators_max"] = live_locators_max;
  j["seed"] = seed;
  for (const auto& [k, v] : counts) j[k] = v;
  for (const auto& [k, v] : reals) j[k] = v;
  if (wall_seconds) j["wall_seconds"] = *wall_seconds;
  return j.dump();
}

RunResult run_workload(const RunConfig& c) {
  if (c.threads == 0) throw UsageError("--threads must be positive");
  if (c.arity < 2) throw UsageError("--arity must be at least 2");
  const auto start = std::chrono::steady_clock::now();
  RunResult r;
  if (c.workload == "counter") {
    r = run_counter(c);
  } else if (c.workload == "invariant-pair") {
    r = run_invariant_pair(c);
  } else if (c.workload == "list-shuffle") {
    r = run_list_shuffle(c);
  } else if (c.workload == "consensus") {
    r = run_consensus(c);
  } else if (c.workload == "contention-sweep") {
    r = run_contention_sweep(c);
  } else {
    throw UsageError("unknown workload '" + c.workload + "'");
  }
  if (c.timing) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (PhaseStats& p : r.phases) p.wall_seconds = secs;
  }
  return r;
}

void emit(const RunResult& result, const RunConfig& config) {
  std::ofstream file;
  if (!config.out.empty()) {
    file.open(config.out, std::ios::trunc);
    if (!file) throw UsageError("cannot write " + config.out);
  }
  std::ostream& out = config.out.empty() ? std::cout : file;
  for (const PhaseStats& p : result.phases) out << p.to_json() << '\n';
}

std::vector<PhaseStats> ContentionReport::phases(std::uint64_t seed) const {
  std::vector<PhaseStats> out;
  for (const auto& [name, side] : {std::pair{"contention-nbfeb", nbfeb}, std::pair{"contention-cas", cas}}) {
    PhaseStats p;
    p.phase = name;
    p.controller_requests = side.controller_requests;
    p.max_contention_level = side.max_contention_level;
    p.seed = seed;
    p.counts["m"] = static_cast<std::int64_t>(m);
    p.counts["depth"] = depth;
    p.counts["arity"] = arity;
    p.counts["combines"] = static_cast<std::int64_t>(side.combines);
    p.counts["winners"] = static_cast<std::int64_t>(side.winners);
    p.reals["ratio"] = ratio();
    out.push_back(std::move(p));
  }
  return out;
}

ContentionReport compare_contention(std::size_t m, unsigned depth, unsigned arity, std::uint64_t seed) {
  if (m == 0) throw UsageError("contention needs at least one request");
  if (arity < 2) throw UsageError("arity must be at least 2");
  ContentionReport rep;
  rep.m = m;
  rep.depth = depth;
  rep.arity = arity;
  const net::Topology topo{arity, depth};

  {
    FebStore store;
    const WordId link = store.alloc(FebValue::bottom(), false, WordKind::Link);
    std::vector<net::MemRequest> batch;
    for (std::size_t i = 0; i < m; ++i) batch.push_back(net::MemRequest::feb(FebOp::Tfas, link, FebValue::of(i + 1), i));
    net::StoreController ctl(store);
    const net::SimResult res = net::simulate(topo, batch, ctl, {seed, 0, true});
    rep.nbfeb.controller_requests = res.stats.controller_requests;
    rep.nbfeb.max_contention_level = res.stats.max_contention_level;
    rep.nbfeb.combines = res.stats.combines;
    for (const auto& [tag, reply] : res.replies) rep.nbfeb.winners += reply.flag ? 0 : 1;
  }
  {
    FebStore store;
    const WordId head = store.alloc(FebValue::of(0), false);
    std::vector<net::MemRequest> batch;
    for (std::size_t i = 0; i < m; ++i) batch.push_back(net::MemRequest::cas(head, FebValue::of(0), FebValue::of(i + 1), i));
    net::StoreController ctl(store);
    const net::SimResult res = net::simulate(topo, batch, ctl, {seed, 0, false});
    rep.cas.controller_requests = res.stats.controller_requests;
    rep.cas.max_contention_level = res.stats.max_contention_level;
    rep.cas.combines = res.stats.combines;
    for (const auto& [tag, reply] : res.replies) rep.cas.winners += reply.flag ? 1 : 0;
  }
  return rep;
}

}  // namespace nbfeb::harness
