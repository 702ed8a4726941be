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

#include "nbfeb/harness/explore.hpp"
#include "nbfeb/harness/history.hpp"
#include "nbfeb/harness/serial.hpp"

using namespace nbfeb;
using namespace nbfeb::harness;

namespace {
constexpr std::size_t kBound = 200000;
}

TEST(Script, ParsesTransactionalScript) {
  const Script s = parse_script(
      "* init 0 5\n"
      "* cm polite\n"
      "0 read 0\n0 commit\n0 incr 1\n"
      "1 write 1 7\n");
  EXPECT_EQ(s.kind, Script::Kind::Stm);
  EXPECT_EQ(s.threads.size(), 2U);
  EXPECT_EQ(s.targets(), 2U);
  EXPECT_EQ(s.cm, stm::CmPolicy::Polite);
}

TEST(Script, EnforcesLimitsAndShape) {
  EXPECT_THROW(parse_script("3 read 0\n"), FormatError);
  EXPECT_THROW(parse_script("0 read 0\n0 read 0\n0 read 0\n0 read 0\n"), FormatError);
  EXPECT_NO_THROW(parse_script("0 read 0\n0 commit\n0 read 0\n0 commit\n0 read 0\n"));
  EXPECT_THROW(parse_script("0 read 0\n1 tfas 0 1\n"), FormatError);
  EXPECT_THROW(parse_script("0 write 0\n"), FormatError);
  EXPECT_THROW(parse_script("0 frob 0\n"), FormatError);
  EXPECT_THROW(parse_script("# nothing\n"), FormatError);
}

TEST(Serial, AcceptsAndRejects) {
  using K = TxnOp::Kind;
  std::vector<TxnRecord> ok{{0, true, {{K::Read, 0, 0}, {K::Write, 0, 1}}, 0, 3},
                            {1, true, {{K::Read, 0, 1}, {K::Write, 0, 2}}, 1, 4}};
  EXPECT_TRUE(check_serializable({{0, 0}}, ok, std::map<std::uint32_t, std::uint64_t>{{0, 2}}).ok);
  // Lost update: both read 0.
  std::vector<TxnRecord> lost{{0, true, {{K::Read, 0, 0}, {K::Write, 0, 1}}, 0, 3},
                              {1, true, {{K::Read, 0, 0}, {K::Write, 0, 1}}, 1, 4}};
  EXPECT_FALSE(check_serializable({{0, 0}}, lost, std::nullopt).ok);
  // Real time: T1 started after T0 ended, yet read the old value.
  std::vector<TxnRecord> stale{{0, true, {{K::Write, 0, 1}}, 0, 1}, {1, true, {{K::Read, 0, 0}}, 2, 3}};
  EXPECT_FALSE(check_serializable({{0, 0}}, stale, std::nullopt).ok);
  // An aborted reader saw half of a two-object update.
  std::vector<TxnRecord> torn{{0, true, {{K::Write, 0, 1}, {K::Write, 1, 1}}, 0, 3},
                              {1, false, {{K::Read, 0, 1}, {K::Read, 1, 0}}, 1, 4}};
  EXPECT_FALSE(check_serializable({{0, 0}, {1, 0}}, torn, std::nullopt).ok);
}

TEST(Explore, SingleThreadHasOneSchedule) {
  const auto r = explore_script(parse_script("0 incr 0\n0 incr 1\n"), kBound);
  EXPECT_EQ(r.executions, 1U);
  EXPECT_TRUE(r.ok());
}

TEST(Explore, StatusRaceHasOneWinner) {
  // Commit and abort racing on an active status word.
  const auto r = explore_script(parse_script("* init 0 1 0\n0 tfas 0 2\n1 tfas 0 3\n2 load 0\n"), kBound);
  EXPECT_GE(r.executions, 2U);
  EXPECT_TRUE(r.ok()) << r.violations.front();
}

TEST(Explore, CounterIncrementsAreSerializable) {
  for (const char* cm : {"aggressive", "polite", "timid"}) {
    const auto r = explore_script(
        parse_script(std::string("* cm ") + cm + "\n0 incr 0\n0 incr 0\n1 incr 0\n1 incr 0\n"), kBound);
    EXPECT_GT(r.executions, 1U) << cm;
    EXPECT_TRUE(r.ok()) << cm << '\n' << r.violations.front();
  }
}

TEST(Explore, TwoObjectsBothOrders) {
  for (const char* body : {"0 incr 0\n0 incr 1\n1 incr 1\n1 incr 0\n", "0 write 0 1\n0 write 1 1\n1 read 0\n1 read 1\n",
                           "0 read 0\n0 write 1 3\n1 read 1\n1 write 0 4\n"}) {
    const auto r = explore_script(parse_script(body), kBound);
    EXPECT_TRUE(r.ok()) << body << '\n' << r.violations.front();
  }
}

TEST(Explore, BoundIsRefused) {
  EXPECT_THROW(explore_script(parse_script("0 incr 0\n1 incr 0\n"), 3), ExploreBoundExceeded);
}

TEST(Explore, LiteralModeExposesStaleHeadRace) {
  // Without the strict re-check a delayed writer can append behind a head
  // whose link was reset; the explorer must find such a schedule.
  const auto r = explore_script(parse_script("* strict 0\n0 incr 0\n1 incr 0\n"), kBound);
  EXPECT_FALSE(r.ok());
  EXPECT_NE(r.violations.front().find("schedule:"), std::string::npos);
  const auto s = explore_script(parse_script("0 incr 0\n1 incr 0\n"), kBound);
  EXPECT_TRUE(s.ok());
}
