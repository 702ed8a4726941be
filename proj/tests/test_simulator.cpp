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
#include <map>
#include <numeric>
#include <random>

#include "nbfeb/feb/store.hpp"
#include "nbfeb/net/simulator.hpp"

namespace nbfeb::net {
namespace {

FebValue v(std::uint64_t x) { return FebValue::of(x); }

// Some serial order of `batch` applied to the initial words reproduces
// every reply. Brute force; batches are tiny.
bool has_serial_witness(const std::vector<MemRequest>& batch, const std::map<std::uint32_t, FebPair>& init,
                        const SimResult& result) {
  std::vector<std::size_t> order(batch.size());
  std::iota(order.begin(), order.end(), 0);
  do {
    auto words = init;
    bool ok = true;
    for (std::size_t i : order) {
      const auto& r = batch[i];
      const auto got = to_reply(apply(to_feb_op(r.kind), words[r.location.index], r.operand));
      if (!(got == result.replies.at(r.tag))) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(order.begin(), order.end()));
  return false;
}

TEST(Simulator, DirectTopologyIsSerial) {
  FebStore store;
  const WordId w = store.alloc(FebValue::bottom(), false);
  std::vector<MemRequest> batch = {MemRequest::feb(FebOp::Tfas, w, v(1), 0), MemRequest::load(w, 1),
                                   MemRequest::feb(FebOp::Sac, w, v(2), 2), MemRequest::feb(FebOp::Tfas, w, v(3), 3)};
  StoreController ctl(store);
  const auto res = simulate(Topology{2, 0}, batch, ctl);
  EXPECT_EQ(res.stats.combines, 0U);
  EXPECT_EQ(res.stats.controller_requests, 4U);
  EXPECT_EQ(res.replies.at(0), (MemReply{FebValue::bottom(), false}));
  EXPECT_EQ(res.replies.at(1), (MemReply{v(1), true}));
  EXPECT_EQ(res.replies.at(2), (MemReply{v(1), true}));
  EXPECT_EQ(res.replies.at(3), (MemReply{v(2), false}));
  EXPECT_EQ(store.peek(w), (FebPair{v(3), true}));
}

TEST(Simulator, EightTfasCombineToOne) {
  FebStore store;
  const WordId w = store.alloc(FebValue::bottom(), false);
  std::vector<MemRequest> batch;
  for (std::uint64_t i = 0; i < 8; ++i) batch.push_back(MemRequest::feb(FebOp::Tfas, w, v(i + 10), i));
  StoreController ctl(store);
  const auto res = simulate(Topology{2, 3}, batch, ctl);
  EXPECT_EQ(res.stats.controller_requests, 1U);
  EXPECT_EQ(res.stats.combines, 7U);
  int clear = 0;
  for (const auto& [tag, r] : res.replies) clear += r.flag ? 0 : 1;
  EXPECT_EQ(clear, 1);
}

TEST(Simulator, RandomBatchesHaveSerialWitness) {
  std::mt19937_64 rng(7);
  const FebOp ops[] = {FebOp::Load, FebOp::Sac, FebOp::Sas, FebOp::Tfas};
  const FebValue vals[] = {FebValue::bottom(), v(0), v(1), v(2)};
  for (int trial = 0; trial < 300; ++trial) {
    FebStore store;
    const WordId words[2] = {store.alloc(FebValue::bottom(), false), store.alloc(v(1), true)};
    std::map<std::uint32_t, FebPair> init{{words[0].index, store.peek(words[0])}, {words[1].index, store.peek(words[1])}};
    const std::size_t n = 2 + rng() % 5;
    std::vector<MemRequest> batch;
    for (std::size_t i = 0; i < n; ++i) {
      batch.push_back(MemRequest::feb(ops[rng() % 4], words[rng() % 2], vals[rng() % 4], i));
    }
    StoreController ctl(store);
    const unsigned depth = static_cast<unsigned>(rng() % 4);
    const auto res = simulate(Topology{2, depth}, batch, ctl, SimOptions{rng(), static_cast<unsigned>(rng() % 3)});
    ASSERT_EQ(res.replies.size(), n);
    ASSERT_TRUE(has_serial_witness(batch, init, res)) << "trial " << trial;
  }
}

TEST(Simulator, CombiningReducesControllerLoad) {
  for (std::size_t m = 2; m <= 64; m *= 2) {
    FebStore store;
    const WordId w = store.alloc(FebValue::bottom(), false);
    std::vector<MemRequest> batch;
    for (std::uint64_t i = 0; i < m; ++i) batch.push_back(MemRequest::feb(FebOp::Tfas, w, v(i), i));
    StoreController ctl(store);
    const auto res = simulate(Topology{2, 6}, batch, ctl);
    EXPECT_LT(res.stats.controller_requests, m);
  }
}

TEST(Simulator, RejectsBadBatches) {
  FebStore store;
  StoreController ctl(store);
  const WordId w = store.alloc(FebValue::bottom(), false);
  EXPECT_THROW(simulate(Topology{2, 1}, std::vector<MemRequest>{}, ctl), std::invalid_argument);
  std::vector<MemRequest> dup = {MemRequest::load(w, 1), MemRequest::load(w, 1)};
  EXPECT_THROW(simulate(Topology{2, 1}, dup, ctl), std::invalid_argument);
}

TEST(Simulator, StatsJsonHasKeys) {
  FebStore store;
  StoreController ctl(store);
  const WordId w = store.alloc(FebValue::bottom(), false);
  std::vector<MemRequest> batch = {MemRequest::load(w, 1), MemRequest::load(w, 2)};
  const auto res = simulate(Topology{2, 1}, batch, ctl, SimOptions{99});
  const std::string j = res.stats.to_json();
  for (const char* key : {"requests_in", "controller_requests", "combines", "depth", "seed"}) {
    EXPECT_NE(j.find(key), std::string::npos) << key;
  }
}

}  // namespace
}  // namespace nbfeb::net
