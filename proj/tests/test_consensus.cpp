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

#include <set>

#include "nbfeb/consensus/consensus.hpp"
#include "nbfeb/sched/fiber.hpp"
#include "nbfeb/sched/hook.hpp"

namespace nbfeb::consensus {
namespace {

TEST(Consensus, SingleProposer) {
  FebStore store;
  ConsensusInstance c(store);
  EXPECT_EQ(c.propose(FebValue::of(42)), FebValue::of(42));
  EXPECT_EQ(c.propose(FebValue::of(7)), FebValue::of(42));
}

TEST(Consensus, RejectsBottom) {
  FebStore store;
  ConsensusInstance c(store);
  EXPECT_THROW(c.propose(FebValue::bottom()), std::invalid_argument);
  EXPECT_EQ(store.peek(c.decision()), (FebPair{FebValue::bottom(), false}));
}

TEST(Consensus, AgreementUnderRandomSchedules) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    FebStore store;
    ConsensusInstance c(store);
    sched::FiberScheduler fs(64 * 1024);
    std::vector<FebValue> got(8);
    std::vector<std::uint64_t> prims(8);
    for (std::size_t i = 0; i < 8; ++i) {
      fs.spawn([&, i] {
        const auto before = sched::primitive_counter();
        got[i] = c.propose(FebValue::of(100 + i));
        prims[i] = sched::primitive_counter() - before;
      });
    }
    sched::RandomPolicy p(seed);
    fs.run(p);
    std::set<std::uint64_t> decided;
    for (std::size_t i = 0; i < 8; ++i) {
      decided.insert(got[i].payload());
      EXPECT_EQ(prims[i], 1U);
    }
    ASSERT_EQ(decided.size(), 1U);
    EXPECT_GE(*decided.begin(), 100U);
    EXPECT_LT(*decided.begin(), 108U);
  }
}

}  // namespace
}  // namespace nbfeb::consensus
