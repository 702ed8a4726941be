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
#include <vector>

#include "nbfeb/feb/store.hpp"

namespace nbfeb {
namespace {

const FebValue kBot = FebValue::bottom();
FebValue v(std::uint64_t x) { return FebValue::of(x); }

TEST(FebStore, AllocAndLoad) {
  FebStore s;
  const WordId a = s.alloc(kBot, false);
  const WordId b = s.alloc(v(7), true);
  EXPECT_NE(a, b);
  EXPECT_EQ(s.load(a), (FebPair{kBot, false}));
  EXPECT_EQ(s.load(b), (FebPair{v(7), true}));
}

TEST(FebStore, TfasSetsOnlyWhenClear) {
  FebStore s;
  const WordId w = s.alloc(kBot, false);
  EXPECT_EQ(s.tfas(w, v(5)), (FebPair{kBot, false}));
  EXPECT_EQ(s.load(w), (FebPair{v(5), true}));
  EXPECT_EQ(s.tfas(w, v(9)), (FebPair{v(5), true}));
  EXPECT_EQ(s.load(w), (FebPair{v(5), true}));

  const WordId z = s.alloc(v(0), false);
  EXPECT_EQ(s.tfas(z, v(0)), (FebPair{v(0), false}));
  EXPECT_EQ(s.load(z), (FebPair{v(0), true}));
}

TEST(FebStore, SacAndSas) {
  FebStore s;
  const WordId w = s.alloc(v(7), true);
  EXPECT_EQ(s.sac(w, v(2)), (FebPair{v(7), true}));
  EXPECT_EQ(s.load(w), (FebPair{v(2), false}));
  EXPECT_EQ(s.load(w), (FebPair{v(2), false}));
  EXPECT_FALSE(s.tfas(w, v(3)).flag);  // sac cleared the flag

  const WordId b = s.alloc(kBot, false);
  EXPECT_EQ(s.sac(b, kBot), (FebPair{kBot, false}));
  EXPECT_EQ(s.load(b), (FebPair{kBot, false}));
  EXPECT_EQ(s.sas(b, v(9)), (FebPair{kBot, false}));
  EXPECT_EQ(s.load(b), (FebPair{v(9), true}));
  EXPECT_EQ(s.sas(b, v(9)), (FebPair{v(9), true}));
  EXPECT_TRUE(s.tfas(b, v(1)).flag);  // sas left the flag set
}

TEST(FebStore, SacThenLoadSeesValue) {
  FebStore s;
  const WordId w = s.alloc(kBot, false);
  s.sac(w, v(3));
  EXPECT_EQ(s.load(w), (FebPair{v(3), false}));
}

TEST(FebStore, FaultsOnInvalidAndFreedIds) {
  FebStore s;
  EXPECT_THROW(s.load(WordId{}), FebFault);
  EXPECT_THROW(s.load(WordId{12345}), FebFault);
  const WordId w = s.alloc(v(1), true);
  s.free(w);
  EXPECT_THROW(s.tfas(w, v(2)), FebFault);
  EXPECT_FALSE(s.valid(w));
}

TEST(FebStore, FreedStorageIsZeroed) {
  FebStore s;
  const WordId w = s.alloc(v(99), true, WordKind::Data);
  s.free(w);
  const WordId d = s.alloc_zeroed(WordKind::Data);
  EXPECT_EQ(d, w);  // recycled
  EXPECT_EQ(s.load(d), (FebPair{v(0), false}));
  s.free(d);
  const WordId l = s.alloc_zeroed(WordKind::Link);
  EXPECT_EQ(s.load(l), (FebPair{kBot, false}));
}

TEST(FebValue, BottomIsNotAPayload) {
  EXPECT_THROW(FebValue::of(FebValue::kBottomBits), std::invalid_argument);
  EXPECT_TRUE(FebValue::parse("bot").is_bottom());
  EXPECT_TRUE(FebValue::parse("_").is_bottom());
  EXPECT_EQ(FebValue::parse("12"), v(12));
  EXPECT_NE(v(0), kBot);
}

TEST(FebStore, ConcurrentTfasHasOneWinner) {
  for (int round = 0; round < 50; ++round) {
    FebStore s;
    const WordId w = s.alloc(kBot, false);
    std::atomic<int> winners{0};
    std::vector<std::thread> ts;
    for (int t = 0; t < 8; ++t) {
      ts.emplace_back([&, t] {
        if (!s.tfas(w, v(static_cast<std::uint64_t>(t))).flag) ++winners;
      });
    }
    for (auto& t : ts) t.join();
    EXPECT_EQ(winners.load(), 1);
  }
}

// Loads never mutate: removing them leaves the final state unchanged.
TEST(FebStore, LoadsDoNotMutate) {
  const FebOp ops[] = {FebOp::Sac, FebOp::Load, FebOp::Tfas, FebOp::Load, FebOp::Sas, FebOp::Load, FebOp::Tfas};
  FebStore s;
  const WordId with = s.alloc(kBot, false);
  const WordId without = s.alloc(kBot, false);
  std::uint64_t x = 0;
  for (FebOp op : ops) {
    s.apply(op, with, v(++x));
    if (op != FebOp::Load) s.apply(op, without, v(x));
  }
  EXPECT_EQ(s.peek(with), s.peek(without));
}

}  // namespace
}  // namespace nbfeb
