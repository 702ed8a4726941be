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

#include "nbfeb/reclaim/epoch.hpp"
#include "nbfeb/reclaim/pool.hpp"

namespace nbfeb::reclaim {
namespace {

TEST(Epoch, PinDefersFree) {
  EpochDomain d(2);
  int freed = 0;
  d.pin(0);
  d.protect(0, [] { return 0; });
  d.retire(1, d.epoch(), [&] { ++freed; });
  d.advance();
  d.advance();
  EXPECT_EQ(freed, 0);
  d.unpin(0);
  d.advance();
  EXPECT_EQ(freed, 1);
}

TEST(Epoch, NoPinsFreesAtNextAdvance) {
  EpochDomain d(2);
  int freed = 0;
  d.retire(1, d.epoch(), [&] { ++freed; });
  d.advance();
  EXPECT_EQ(freed, 1);
  EXPECT_EQ(d.pending(), 0U);
}

TEST(Epoch, ContractFaults) {
  EpochDomain d(1);
  EXPECT_THROW(d.unpin(0), ReclaimFault);
  d.pin(0);
  EXPECT_THROW(d.pin(0), ReclaimFault);
  d.unpin(0);
  d.retire(5, 0, [] {});
  EXPECT_THROW(d.retire(5, 0, [] {}), ReclaimFault);
}

TEST(Epoch, HaltedReaderOnlyHoldsWhatItCouldSee) {
  EpochDomain d(2);
  d.pin(0);  // thread 0 stops here forever
  d.advance();
  d.advance();
  int freed = 0;
  const auto birth = d.epoch();
  d.retire(9, birth, [&] { ++freed; });
  d.advance();
  EXPECT_EQ(freed, 1);
  int old_freed = 0;
  d.retire(10, 0, [&] { ++old_freed; });
  d.advance();
  EXPECT_EQ(old_freed, 0);
}

TEST(Pool, ZeroFillAndTombstone) {
  struct Rec {
    std::uint64_t a = 0;
    std::uint32_t b = 0;
  };
  SlabPool<Rec> pool("rec");
  const auto i = pool.alloc();
  pool.get(i).a = 77;
  pool.get(i).b = 3;
  pool.free(i);
  EXPECT_THROW(pool.get(i), ReclaimFault);
  EXPECT_FALSE(pool.alive(i));
  const auto j = pool.alloc();
  EXPECT_EQ(j, i);
  EXPECT_EQ(pool.get(j).a, 0U);
  EXPECT_EQ(pool.get(j).b, 0U);
  EXPECT_EQ(pool.live(), 1U);
}

}  // namespace
}  // namespace nbfeb::reclaim
