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

#include "nbfeb/harness/history.hpp"

using namespace nbfeb;
using namespace nbfeb::harness;

TEST(History, ParsesAndRoundTrips) {
  const std::string text =
      "* init 0 bot 0\n"
      "0 call tfas 0 1\n"
      "1 call load 0\n"
      "0 ret bot 0\n"
      "1 ret 1 1\n";
  const History h = parse_history(text);
  ASSERT_EQ(h.ops.size(), 2U);
  EXPECT_EQ(h.ops[0].op, FebOp::Tfas);
  EXPECT_EQ(h.ops[1].response->value, FebValue::of(1));
  EXPECT_EQ(format_history(h), text);
}

TEST(History, RejectsMalformedInput) {
  EXPECT_THROW(parse_history("0 ret 1 1\n"), FormatError);
  EXPECT_THROW(parse_history("0 call load 0\n0 call load 0\n"), FormatError);
  EXPECT_THROW(parse_history("0 call frob 0\n"), FormatError);
  EXPECT_THROW(parse_history("0 call sas 0\n"), FormatError);
  EXPECT_THROW(parse_history("0 call load 0\n0 ret 1 2\n"), FormatError);
  EXPECT_THROW(parse_history("0 call load 0\n* init 0 1\n"), FormatError);
}

TEST(History, SerialHistoryIsAccepted) {
  const History h = parse_history(
      "0 call sac 3 5\n0 ret bot 0\n"
      "0 call tfas 3 6\n0 ret 5 0\n"
      "0 call load 3\n0 ret 6 1\n");
  EXPECT_TRUE(check_linearizable(h).linearizable);
  EXPECT_TRUE(brute_force_linearizable(h).linearizable);
}

TEST(History, UnexplainableTfasIsRejected) {
  // Two overlapping TFAS on an empty word cannot both find the flag clear.
  const History h = parse_history(
      "* init 0 bot 0\n"
      "0 call tfas 0 1\n1 call tfas 0 2\n"
      "0 ret bot 0\n1 ret bot 0\n");
  EXPECT_FALSE(check_linearizable(h).linearizable);
  EXPECT_FALSE(brute_force_linearizable(h).linearizable);
}

TEST(History, RealTimeOrderIsRespected) {
  // The load returned before the sas was called, so it cannot see it.
  const History h = parse_history(
      "0 call load 0\n0 ret 4 1\n"
      "1 call sas 0 4\n1 ret bot 0\n");
  EXPECT_FALSE(check_linearizable(h).linearizable);
  EXPECT_FALSE(brute_force_linearizable(h).linearizable);
}

TEST(History, PendingCallMayTakeEffect) {
  const History h = parse_history(
      "0 call sas 0 9\n"
      "1 call load 0\n1 ret 9 1\n");
  const auto v = check_linearizable(h);
  EXPECT_TRUE(v.linearizable);
  EXPECT_EQ(v.witness.size(), 2U);
  EXPECT_TRUE(brute_force_linearizable(h).linearizable);
}

TEST(History, GeneratedHistoriesAreLinearizable) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const History h = generate_history(seed);
    ASSERT_EQ(h.ops.size(), 6U);
    EXPECT_TRUE(check_linearizable(h).linearizable) << format_history(h);
  }
}

TEST(History, CheckerAgreesWithBruteForce) {
  int rejected = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    History h = generate_history(seed);
    if (seed % 2 == 1) corrupt_history(h, seed);
    const bool fast = check_linearizable(h).linearizable;
    EXPECT_EQ(fast, brute_force_linearizable(h).linearizable) << format_history(h);
    rejected += fast ? 0 : 1;
  }
  EXPECT_GT(rejected, 0);
}
