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
#include <benchmark/benchmark.h>

#include <thread>
#include <vector>

#include "nbfeb/feb/store.hpp"
#include "nbfeb/harness/baseline.hpp"
#include "nbfeb/harness/workloads.hpp"
#include "nbfeb/net/combine.hpp"
#include "nbfeb/stm/stm.hpp"

using namespace nbfeb;

namespace {

void BM_FebTfas(benchmark::State& state) {
  FebStore store;
  const WordId w = store.alloc(FebValue::bottom(), false);
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(store.tfas(w, FebValue::of(++i)));
    if ((i & 1023) == 0) store.sac(w, FebValue::bottom());
  }
}
BENCHMARK(BM_FebTfas);

void BM_CombinePair(benchmark::State& state) {
  const auto a = net::MemRequest::feb(FebOp::Tfas, WordId{0}, FebValue::of(1), 1);
  const auto b = net::MemRequest::feb(FebOp::Sas, WordId{0}, FebValue::of(2), 2);
  for (auto _ : state) benchmark::DoNotOptimize(net::combine(a, b));
}
BENCHMARK(BM_CombinePair);

void BM_ContentionSim(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(harness::compare_contention(m, 8));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * m));
}
BENCHMARK(BM_ContentionSim)->Arg(64)->Arg(256)->Arg(1024);

void BM_StmSoloIncrement(benchmark::State& state) {
  stm::Stm s(stm::StmConfig{.threads = 1});
  const stm::ObjectId o = s.create_object(0);
  stm::Session& se = s.session(0);
  for (auto _ : state) {
    se.begin();
    stm::Data* d = se.open_write(o);
    d->set_u64(d->u64() + 1);
    se.commit();
  }
}
BENCHMARK(BM_StmSoloIncrement);

void BM_BaselineSoloIncrement(benchmark::State& state) {
  harness::CasDstm d(1);
  const auto o = d.create_object(0);
  for (auto _ : state) {
    d.begin(0);
    std::uint64_t* v = d.open_write(0, o);
    *v += 1;
    d.commit(0);
  }
}
BENCHMARK(BM_BaselineSoloIncrement);

// Whole workload runs on OS threads; one iteration is ops x threads attempts.
void BM_CounterThreads(benchmark::State& state) {
  harness::RunConfig c;
  c.threads = static_cast<std::size_t>(state.range(0));
  c.ops = 2000;
  c.mode = harness::RunMode::Threads;
  std::uint64_t commits = 0;
  for (auto _ : state) commits += harness::run_workload(c).phases.front().commits;
  state.counters["commits"] = benchmark::Counter(static_cast<double>(commits), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_CounterThreads)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
