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

#include <thread>

#include "nbfeb/harness/baseline.hpp"
#include "nbfeb/sched/fiber.hpp"

using namespace nbfeb;
using nbfeb::harness::CasDstm;

TEST(Baseline, SoloTransactions) {
  CasDstm d(1);
  const auto o = d.create_object(5);
  d.begin(0);
  EXPECT_EQ(d.open_read(0, o), 5U);
  std::uint64_t* v = d.open_write(0, o);
  ASSERT_NE(v, nullptr);
  *v = 9;
  EXPECT_EQ(d.open_read(0, o), 9U);
  EXPECT_TRUE(d.commit(0));
  EXPECT_EQ(d.latest(o), 9U);
  EXPECT_EQ(d.head_cas(), 1U);
}

TEST(Baseline, FiberCounterEveryPolicy) {
  for (const auto cm : {stm::CmPolicy::Aggressive, stm::CmPolicy::Polite, stm::CmPolicy::Timid}) {
    CasDstm d(4, cm);
    const auto o = d.create_object(0);
    sched::FiberScheduler fs;
    for (std::size_t t = 0; t < 4; ++t) {
      fs.spawn([&, t] {
        for (int i = 0; i < 100; ++i) {
          d.begin(t);
          if (std::uint64_t* v = d.open_write(t, o)) {
            ++*v;
            d.commit(t);
          }
        }
      });
    }
    sched::RandomPolicy p(7);
    fs.run(p);
    EXPECT_EQ(d.latest(o), d.total_stats().commits) << to_string(cm);
    EXPECT_GT(d.total_stats().commits, 0U);
  }
}

TEST(Baseline, ThreadCounter) {
  CasDstm d(4);
  const auto o = d.create_object(0);
  std::vector<std::thread> ts;
  for (std::size_t t = 0; t < 4; ++t) {
    ts.emplace_back([&, t] {
      for (int i = 0; i < 2000; ++i) {
        d.begin(t);
        if (std::uint64_t* v = d.open_write(t, o)) {
          ++*v;
          d.commit(t);
        }
      }
    });
  }
  for (auto& t : ts) t.join();
  EXPECT_EQ(d.latest(o), d.total_stats().commits);
}

TEST(Baseline, ReadersSeeConsistentPairs) {
  CasDstm d(3);
  const auto x = d.create_object(50);
  const auto y = d.create_object(50);
  int bad = 0;
  sched::FiberScheduler fs;
  for (std::size_t t = 0; t < 3; ++t) {
    fs.spawn([&, t] {
      for (int i = 0; i < 200; ++i) {
        d.begin(t);
        if (t == 0) {
          std::uint64_t* a = d.open_write(t, x);
          std::uint64_t* b = a ? d.open_write(t, y) : nullptr;
          if (b) {
            --*a;
            ++*b;
            d.commit(t);
          }
        } else {
          const auto a = d.open_read(t, x);
          const auto b = a ? d.open_read(t, y) : std::nullopt;
          if (b && *a + *b != 100) ++bad;
          if (d.active(t)) d.commit(t);
        }
      }
    });
  }
  sched::RandomPolicy p(3);
  fs.run(p);
  EXPECT_EQ(bad, 0);
  EXPECT_EQ(d.latest(x) + d.latest(y), 100U);
}
