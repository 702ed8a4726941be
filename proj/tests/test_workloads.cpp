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
#include <gtest/gtest.h>

#include <json.hpp>

#include "nbfeb/harness/workloads.hpp"

using namespace nbfeb;
using namespace nbfeb::harness;

namespace {
RunConfig cfg(const std::string& w, std::size_t threads, std::size_t ops) {
  RunConfig c;
  c.workload = w;
  c.threads = threads;
  c.ops = ops;
  return c;
}
}  // namespace

TEST(Workloads, CounterMatchesCommitsEveryPolicy) {
  for (const auto cm : {stm::CmPolicy::Aggressive, stm::CmPolicy::Polite, stm::CmPolicy::Timid}) {
    RunConfig c = cfg("counter", 4, 200);
    c.cm = cm;
    const RunResult r = run_workload(c);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.phases[0].counts.at("final"), static_cast<std::int64_t>(r.phases[0].commits));
    EXPECT_GT(r.phases[0].commits, 0U);
  }
}

TEST(Workloads, ThreadsMode) {
  for (const std::string w : {"counter", "invariant-pair", "list-shuffle", "consensus"}) {
    RunConfig c = cfg(w, 4, 300);
    c.mode = RunMode::Threads;
    EXPECT_TRUE(run_workload(c).ok()) << w;
  }
}

TEST(Workloads, InvariantPairAndShuffle) {
  RunResult r = run_workload(cfg("invariant-pair", 4, 500));
  EXPECT_TRUE(r.ok());
  EXPECT_GT(r.phases[0].counts.at("snapshots"), 0);
  r = run_workload(cfg("list-shuffle", 3, 500));
  EXPECT_TRUE(r.ok());
  EXPECT_GT(r.phases[0].counts.at("reads_checked"), 0);
}

TEST(Workloads, ConsensusOnePrimitive) {
  const RunResult r = run_workload(cfg("consensus", 8, 50));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.phases[0].counts.at("primitives_per_propose_max"), 1);
  EXPECT_EQ(r.phases[0].controller_requests, 8U * 50U);
}

TEST(Workloads, SameSeedSameStats) {
  const RunConfig c = cfg("invariant-pair", 3, 200);
  EXPECT_EQ(run_workload(c).phases[0].to_json(), run_workload(c).phases[0].to_json());
}

TEST(Workloads, JsonShape) {
  const RunResult r = run_workload(cfg("counter", 2, 20));
  const auto j = nlohmann::json::parse(r.phases[0].to_json());
  for (const char* k : {"phase", "commits", "aborts", "controller_requests", "max_contention_level",
                        "live_locators_max", "seed"})
    EXPECT_TRUE(j.contains(k)) << k;
  for (const char* k : {"cm", "lsa", "enemy"}) EXPECT_TRUE(j["aborts"].contains(k)) << k;
  EXPECT_FALSE(j.contains("wall_seconds"));
}

TEST(Workloads, UsageErrors) {
  EXPECT_THROW(run_workload(cfg("nope", 2, 1)), UsageError);
  RunConfig c = cfg("counter", 2, 1);
  c.payload = 4;
  EXPECT_THROW(run_workload(c), UsageError);
  c = cfg("counter", 0, 1);
  EXPECT_THROW(run_workload(c), UsageError);
}

TEST(Contention, CombiningBeatsCas) {
  const ContentionReport rep = compare_contention(256, 8);
  EXPECT_LT(rep.nbfeb.controller_requests, 256U);
  EXPECT_EQ(rep.cas.controller_requests, 256U);
  EXPECT_LT(rep.nbfeb.max_contention_level, rep.cas.max_contention_level);
  EXPECT_GT(rep.ratio(), 1.0);
  EXPECT_EQ(rep.nbfeb.winners, 1U);
  EXPECT_EQ(rep.cas.winners, 1U);
}

TEST(Contention, SweepEmitsTwoPhasesPerDepth) {
  RunConfig c = cfg("contention-sweep", 1, 64);
  c.depth = 3;
  const RunResult r = run_workload(c);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.phases.size(), 8U);
}
