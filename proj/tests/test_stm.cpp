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

#include <cstdio>
#include <thread>

#include "nbfeb/sched/fiber.hpp"
#include "nbfeb/stm/stm.hpp"

namespace nbfeb::stm {
namespace {

bool increment(Session& s, ObjectId o) {
  s.begin();
  Data* d = s.open_write(o);
  if (d == nullptr) return false;
  d->set_u64(d->u64() + 1);
  return s.commit() == TxOutcome::Committed;
}

TEST(Stm, FreshObjectHoldsInitialValue) {
  Stm stm(StmConfig{.threads = 2});
  const ObjectId o = stm.create_object(7);
  EXPECT_EQ(stm.latest(o).u64(), 7U);
  EXPECT_EQ(stm.audit_live(o), 1U);
  Session& s = stm.session(0);
  s.begin();
  const Data* d = s.open_read(o);
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->u64(), 7U);
  EXPECT_EQ(s.commit(), TxOutcome::Committed);
}

TEST(Stm, SoloUpdatesCommit) {
  Stm stm(StmConfig{.threads = 2});
  const ObjectId o = stm.create_object(0);
  for (int i = 0; i < 50; ++i) ASSERT_TRUE(increment(stm.session(i % 2), o));
  EXPECT_EQ(stm.latest(o).u64(), 50U);
  EXPECT_LE(stm.audit(o).reachable, 8U);
  EXPECT_LE(stm.audit_live(o), 8U);
}

TEST(Stm, FiberCounterMatchesCommits) {
  for (CmPolicy cm : {CmPolicy::Aggressive, CmPolicy::Polite, CmPolicy::Timid}) {
    Stm stm(StmConfig{.threads = 4, .cm = cm});
    const ObjectId o = stm.create_object(0);
    sched::FiberScheduler fs;
    for (std::size_t t = 0; t < 4; ++t) {
      fs.spawn([&, t] {
        for (int k = 0; k < 200; ++k) increment(stm.session(t), o);
      });
    }
    sched::RandomPolicy policy(42);
    fs.run(policy);
    const auto total = stm.total_stats();
    EXPECT_EQ(stm.latest(o).u64(), total.commits) << to_string(cm);
    EXPECT_GT(total.commits, 0U);
    EXPECT_EQ(stm.status_violations(), 0U);
  }
}

}  // namespace
}  // namespace nbfeb::stm

namespace nbfeb::stm {
namespace {

TEST(Stm, ThreadCounterMatchesCommits) {
  Stm stm(StmConfig{.threads = 4, .inline_collect = false});
  const ObjectId o = stm.create_object(0);
  std::vector<std::thread> ts;
  for (std::size_t t = 0; t < 4; ++t) {
    ts.emplace_back([&, t] {
      for (int k = 0; k < 2000; ++k) increment(stm.session(t), o);
    });
  }
  for (auto& t : ts) t.join();
  const auto total = stm.total_stats();
  EXPECT_EQ(stm.latest(o).u64(), total.commits);
  stm.collect();
  stm.epochs().advance();
  EXPECT_LE(stm.audit_live(o), 16U);
  std::printf("commits=%lu cm=%lu lsa=%lu enemy=%lu live=%zu\n", (unsigned long)total.commits,
              (unsigned long)total.aborts_cm, (unsigned long)total.aborts_lsa, (unsigned long)total.aborts_enemy,
              stm.audit_live(o));
}

}  // namespace
}  // namespace nbfeb::stm
