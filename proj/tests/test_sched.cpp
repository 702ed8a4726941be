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

#include <string>

#include "nbfeb/sched/fiber.hpp"
#include "nbfeb/sched/hook.hpp"

namespace nbfeb::sched {
namespace {

TEST(Fibers, ScriptedInterleaving) {
  std::string trace;
  FiberScheduler fs;
  for (char c : {'a', 'b'}) {
    fs.spawn([&, c] {
      for (int i = 0; i < 3; ++i) {
        point(Space::Word, 0, AccessKind::Write);
        trace.push_back(c);
      }
    });
  }
  SequentialPolicy rest;
  ScriptedPolicy p({1, 0, 1, 0, 1, 0}, rest);
  fs.run(p);
  EXPECT_EQ(trace, "bababa");
  EXPECT_TRUE(fs.finished(0));
  EXPECT_TRUE(fs.finished(1));
}

TEST(Fibers, HaltedFiberNeverResumes) {
  int steps = 0;
  FiberScheduler fs;
  fs.spawn([&] {
    for (;;) {
      point(Space::Word, 1, AccessKind::Read);
      ++steps;
    }
  });
  fs.spawn([&] { point(Space::Word, 2, AccessKind::Read); });
  fs.halt(0);
  SequentialPolicy p;
  fs.run(p);
  EXPECT_EQ(steps, 0);
  EXPECT_TRUE(fs.halted(0));
  EXPECT_TRUE(fs.finished(1));
}

TEST(Fibers, ExceptionsPropagate) {
  FiberScheduler fs;
  fs.spawn([] {
    point(Space::Word, 0, AccessKind::Read);
    throw std::runtime_error("boom");
  });
  SequentialPolicy p;
  EXPECT_THROW(fs.run(p), std::runtime_error);
}

TEST(Fibers, PointOutsideSchedulerIsNoop) {
  EXPECT_FALSE(in_fiber());
  point(Space::Word, 0, AccessKind::Rmw);
  const auto before = primitive_counter();
  ++primitive_counter();
  EXPECT_EQ(primitive_counter(), before + 1);
}

}  // namespace
}  // namespace nbfeb::sched
