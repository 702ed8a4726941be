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

#include <algorithm>
#include <set>
#include <thread>

#include "nbfeb/lsa/lsa.hpp"

namespace nbfeb::lsa {
namespace {

TEST(Clock, FirstTickIsOne) {
  GlobalClock c;
  EXPECT_EQ(c.now(), 0U);
  EXPECT_EQ(c.tick(), 1U);
  EXPECT_EQ(c.tick(), 2U);
  EXPECT_EQ(c.now(), 2U);
}

TEST(Clock, ConcurrentTicksAreUnique) {
  GlobalClock c;
  std::vector<std::vector<Timestamp>> got(8);
  std::vector<std::thread> ts;
  for (int t = 0; t < 8; ++t) {
    ts.emplace_back([&, t] {
      for (int i = 0; i < 5000; ++i) got[t].push_back(c.tick());
    });
  }
  for (auto& t : ts) t.join();
  std::set<Timestamp> all;
  for (const auto& g : got) {
    EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
    all.insert(g.begin(), g.end());
  }
  EXPECT_EQ(all.size(), 40000U);
  EXPECT_EQ(*all.begin(), 1U);
  EXPECT_EQ(*all.rbegin(), 40000U);
}

TEST(Clock, CombinedTicksMatchDirectTicks) {
  for (unsigned depth : {0U, 1U, 3U, 5U}) {
    GlobalClock routed;
    net::SimStats stats;
    const auto got = routed.tick_batch(32, net::Topology{2, depth}, net::SimOptions{depth}, &stats);
    std::set<Timestamp> s(got.begin(), got.end());
    GlobalClock direct;
    std::set<Timestamp> expect;
    for (int i = 0; i < 32; ++i) expect.insert(direct.tick());
    EXPECT_EQ(s, expect);
    EXPECT_EQ(routed.now(), 32U);
    if (depth >= 5) EXPECT_LT(stats.controller_requests, 32U);
  }
}

TEST(Lsa, SingleVersion) {
  LsaState t;
  t.start(0);
  const VersionView v1{1, 1, {1, kInfinity}};
  const auto got = t.open(std::span(&v1, 1), OpenMode::Read, nullptr);
  ASSERT_TRUE(got);
  EXPECT_EQ(got->version, 1U);
  EXPECT_EQ(t.range(), (ValidityRange{1, kInfinity}));
}

TEST(Lsa, ReadPicksIntersectingVersion) {
  LsaState t;
  t.set_range({5, 7});
  const VersionView vs[] = {{1, 1, {1, 6}}, {2, 6, {6, kInfinity}}};
  const auto got = t.open(vs, OpenMode::Read, nullptr);
  ASSERT_TRUE(got);
  EXPECT_EQ(got->version, 1U);
  EXPECT_EQ(t.range(), (ValidityRange{5, 6}));
}

TEST(Lsa, WriteNeedsLatest) {
  LsaState t;
  t.set_range({2, 4});
  const VersionView vs[] = {{1, 1, {1, 5}}, {2, 5, {5, kInfinity}}};
  EXPECT_FALSE(t.open(vs, OpenMode::Write, [] { return std::optional<Timestamp>{}; }));
  // Same situation, but the read set is still valid up to 10.
  LsaState u;
  u.set_range({2, 4});
  const auto got = u.open(vs, OpenMode::Write, [] { return std::optional<Timestamp>{10}; });
  ASSERT_TRUE(got);
  EXPECT_EQ(got->version, 2U);
  EXPECT_EQ(u.range(), (ValidityRange{5, 10}));
}

TEST(Lsa, RangeOnlyShrinksWithoutExtension) {
  LsaState t;
  t.start(3);
  const VersionView a{1, 0, {0, 8}};
  const VersionView b{2, 2, {2, 6}};
  ASSERT_TRUE(t.open(std::span(&a, 1), OpenMode::Read, nullptr));
  const auto r1 = t.range();
  ASSERT_TRUE(t.open(std::span(&b, 1), OpenMode::Read, nullptr));
  EXPECT_GE(t.range().lower, r1.lower);
  EXPECT_LE(t.range().upper, r1.upper);
  EXPECT_EQ(t.range(), (ValidityRange{3, 6}));
}

}  // namespace
}  // namespace nbfeb::lsa
