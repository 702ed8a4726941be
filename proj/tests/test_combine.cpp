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

#include <vector>

#include "nbfeb/feb/store.hpp"
#include "nbfeb/net/combine.hpp"

namespace nbfeb::net {
namespace {

const FebValue kBot = FebValue::bottom();
FebValue v(std::uint64_t x) { return FebValue::of(x); }

// Serial oracle: apply both requests one after the other to a plain pair.
struct Serial {
  MemReply first, second;
  FebPair final_state;
};

Serial serial(FebPair word, FebOp a, FebValue va, FebOp b, FebValue vb) {
  Serial s;
  s.first = to_reply(apply(a, word, va));
  s.second = to_reply(apply(b, word, vb));
  s.final_state = word;
  return s;
}

TEST(Combine, ExhaustiveSerialEquivalence) {
  const FebOp ops[] = {FebOp::Load, FebOp::Sac, FebOp::Sas, FebOp::Tfas};
  const FebValue vals[] = {kBot, v(0), v(1), v(2)};
  const WordId x{0};
  std::size_t cases = 0;
  for (FebOp a : ops) {
    for (FebOp b : ops) {
      for (FebValue va : vals) {
        for (FebValue vb : vals) {
          for (FebValue init : vals) {
            for (bool flag : {false, true}) {
              const FebPair start{init, flag};
              const auto expect = serial(start, a, va, b, vb);
              const auto first = MemRequest::feb(a, x, va, 1);
              const auto second = MemRequest::feb(b, x, vb, 2);
              const auto plan = combine(first, second);
              ASSERT_TRUE(plan.has_value());
              FebPair word = start;
              ASSERT_TRUE(is_feb(plan->combined.kind));
              const MemReply r = to_reply(apply(to_feb_op(plan->combined.kind), word, plan->combined.operand));
              const auto [r1, r2] = resolve(*plan, r);
              ASSERT_EQ(r1, expect.first) << to_string(a) << ',' << to_string(b);
              ASSERT_EQ(r2, expect.second) << to_string(a) << ',' << to_string(b) << " v1=" << va << " v2=" << vb
                                           << " init=" << start;
              ASSERT_EQ(word, expect.final_state) << to_string(a) << ',' << to_string(b);
              ++cases;
            }
          }
        }
      }
    }
  }
  EXPECT_EQ(cases, 16U * 4 * 4 * 4 * 2);
}

TEST(Combine, TableCells) {
  const WordId x{0};
  auto plan = combine(MemRequest::feb(FebOp::Sas, x, v(1)), MemRequest::load(x));
  auto [a, b] = resolve(*plan, MemReply{v(5), false});
  EXPECT_EQ(a, (MemReply{v(5), false}));
  EXPECT_EQ(b, (MemReply{v(1), true}));

  plan = combine(MemRequest::load(x), MemRequest::load(x));
  EXPECT_EQ(plan->combined.kind, Kind::Load);
  std::tie(a, b) = resolve(*plan, MemReply{v(3), true});
  EXPECT_EQ(a, b);

  plan = combine(MemRequest::feb(FebOp::Tfas, x, v(1)), MemRequest::feb(FebOp::Tfas, x, v(2)));
  EXPECT_EQ(plan->combined.kind, Kind::Tfas);
  EXPECT_EQ(plan->combined.operand, v(1));
  std::tie(a, b) = resolve(*plan, MemReply{kBot, false});
  EXPECT_EQ(a, (MemReply{kBot, false}));
  EXPECT_EQ(b, (MemReply{v(1), true}));
  std::tie(a, b) = resolve(*plan, MemReply{v(7), true});
  EXPECT_EQ(a, (MemReply{v(7), true}));
  EXPECT_EQ(b, (MemReply{v(7), true}));

  plan = combine(MemRequest::feb(FebOp::Sac, x, v(1)), MemRequest::feb(FebOp::Sas, x, v(2)));
  EXPECT_EQ(plan->combined.kind, Kind::Sas);
  EXPECT_EQ(plan->combined.operand, v(2));
  std::tie(a, b) = resolve(*plan, MemReply{v(4), true});
  EXPECT_EQ(b, (MemReply{v(1), false}));

  plan = combine(MemRequest::feb(FebOp::Sac, x, v(1)), MemRequest::feb(FebOp::Sac, x, v(2)));
  std::tie(a, b) = resolve(*plan, MemReply{v(4), true});
  EXPECT_EQ(a, (MemReply{v(4), true}));
  EXPECT_EQ(b, (MemReply{v(1), false}));

  plan = combine(MemRequest::feb(FebOp::Sac, x, v(1)), MemRequest::feb(FebOp::Tfas, x, v(2)));
  EXPECT_EQ(plan->combined.kind, Kind::Sas);
  EXPECT_EQ(plan->combined.operand, v(2));

  plan = combine(MemRequest::feb(FebOp::Sas, x, v(1)), MemRequest::feb(FebOp::Tfas, x, v(2)));
  EXPECT_EQ(plan->combined.kind, Kind::Sas);
  EXPECT_EQ(plan->combined.operand, v(1));

  plan = combine(MemRequest::feb(FebOp::Tfas, x, v(1)), MemRequest::feb(FebOp::Sac, x, v(2)));
  EXPECT_EQ(plan->combined.kind, Kind::Sac);
  EXPECT_EQ(plan->combined.operand, v(2));
}

TEST(Combine, LoadThenSasCombinesIntoSas) {
  const WordId x{0};
  const auto plan = combine(MemRequest::load(x), MemRequest::feb(FebOp::Sas, x, v(2)));
  EXPECT_EQ(plan->combined.kind, Kind::Sas);
  EXPECT_EQ(plan->combined.operand, v(2));
}

TEST(Combine, RefusesDifferentLocations) {
  EXPECT_FALSE(combine(MemRequest::load(WordId{0}), MemRequest::load(WordId{1})).has_value());
  EXPECT_FALSE(try_combine(MemRequest::cas(WordId{0}, kBot, v(1)), MemRequest::cas(WordId{0}, kBot, v(2))).has_value());
}

TEST(CombineFai, SumsIncrements) {
  const WordId c{3};
  auto plan = combine_fai(MemRequest::fai(c, 1), MemRequest::fai(c, 1));
  ASSERT_TRUE(plan);
  auto [a, b] = resolve(*plan, MemReply{v(10), false});
  EXPECT_EQ(a.value, v(10));
  EXPECT_EQ(b.value, v(11));

  plan = combine_fai(MemRequest::fai(c, 0), MemRequest::fai(c, 0));
  std::tie(a, b) = resolve(*plan, MemReply{v(4), false});
  EXPECT_EQ(a.value, v(4));
  EXPECT_EQ(b.value, v(4));

  plan = combine_fai(MemRequest::fai(c, 2), MemRequest::fai(c, 3));
  EXPECT_EQ(plan->combined.increment, 5U);
  std::tie(a, b) = resolve(*plan, MemReply{v(20), false});
  EXPECT_EQ(a.value, v(20));
  EXPECT_EQ(b.value, v(22));
}

}  // namespace
}  // namespace nbfeb::net
