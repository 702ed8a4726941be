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
#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "nbfeb/feb/value.hpp"
#include "nbfeb/stm/types.hpp"

namespace nbfeb::harness {

/// A bounded multi-thread program for exhaustive exploration.
///
/// Lines are `<thread> <op> <args>`; `#` starts a comment. Either all ops
/// are transactional
///   read <obj> | write <obj> <value> | incr <obj> | commit
/// or all are raw word primitives
///   load <word> | sac <word> <value> | sas <word> <value> | tfas <word> <value>
/// Directives: `* init <obj|word> <value> [<flag>]`, and for transactional
/// scripts `* cm <aggressive|polite|timid>` and `* strict <0|1>`.
///
/// In a transactional script `commit` closes the thread's current
/// transaction; ops after the last `commit` form one more transaction.
/// Aborted transactions are not retried.
struct Script {
  enum class Kind : std::uint8_t { Stm, Feb } kind = Kind::Stm;

  struct Op {
    std::string name;  // read, write, incr, commit, load, sac, sas, tfas
    std::uint32_t target = 0;
    FebValue value;
    std::size_t line = 0;
  };

  std::vector<std::vector<Op>> threads;
  std::map<std::uint32_t, FebPair> init;
  stm::CmPolicy cm = stm::CmPolicy::Aggressive;
  bool strict = true;

  static constexpr std::size_t kMaxThreads = 3;
  static constexpr std::size_t kMaxOps = 3;  // shared ops per thread
  static constexpr std::uint32_t kMaxTargets = 16;

  [[nodiscard]] std::uint32_t targets() const;  // highest id used + 1
};

/// Throws FormatError on malformed input or when the limits are exceeded.
Script parse_script(std::istream& in);
Script parse_script(const std::string& text);

}  // namespace nbfeb::harness
