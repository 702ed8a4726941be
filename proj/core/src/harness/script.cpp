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
#include "nbfeb/harness/script.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "nbfeb/harness/history.hpp"

namespace nbfeb::harness {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw FormatError("script line " + std::to_string(line) + ": " + what);
}

std::uint32_t number(const std::string& s, std::size_t line, std::uint32_t limit) {
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(s, &used);
  } catch (const std::logic_error&) {
    fail(line, "bad number '" + s + "'");
  }
  if (used != s.size() || v >= limit) fail(line, "'" + s + "' out of range (limit " + std::to_string(limit) + ")");
  return static_cast<std::uint32_t>(v);
}

FebValue value(const std::string& s, std::size_t line) {
  try {
    return FebValue::parse(s);
  } catch (const std::exception&) {
    fail(line, "bad value '" + s + "'");
  }
}

const std::set<std::string> kStmOps{"read", "write", "incr", "commit"};
const std::set<std::string> kFebOps{"load", "sac", "sas", "tfas"};

}  // namespace

std::uint32_t Script::targets() const {
  std::uint32_t n = 0;
  for (const auto& [id, v] : init) n = std::max(n, id + 1);
  for (const auto& ops : threads) {
    for (const Op& op : ops) {
      if (op.name != "commit") n = std::max(n, op.target + 1);
    }
  }
  return n;
}

Script parse_script(std::istream& in) {
  Script s;
  bool saw_stm = false;
  bool saw_feb = false;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (tok[0] == "*") {
      if (tok.size() >= 2 && tok[1] == "init") {
        if (tok.size() < 4 || tok.size() > 5) fail(line, "expected '* init <id> <value> [<flag>]'");
        const std::uint32_t id = number(tok[2], line, Script::kMaxTargets);
        bool flag = false;
        if (tok.size() == 5) {
          if (tok[4] != "0" && tok[4] != "1") fail(line, "flag must be 0 or 1");
          flag = tok[4] == "1";
        }
        s.init[id] = FebPair{value(tok[3], line), flag};
      } else if (tok.size() == 3 && tok[1] == "cm") {
        try {
          s.cm = stm::parse_cm_policy(tok[2]);
        } catch (const std::exception&) {
          fail(line, "unknown contention policy '" + tok[2] + "'");
        }
      } else if (tok.size() == 3 && tok[1] == "strict") {
        if (tok[2] != "0" && tok[2] != "1") fail(line, "strict must be 0 or 1");
        s.strict = tok[2] == "1";
      } else {
        fail(line, "unknown directive");
      }
      continue;
    }

    const std::uint32_t thread = number(tok[0], line, Script::kMaxThreads);
    if (tok.size() < 2) fail(line, "missing op");
    Script::Op op;
    op.name = tok[1];
    op.line = line;
    const bool is_stm = kStmOps.count(op.name) != 0;
    const bool is_feb = kFebOps.count(op.name) != 0;
    if (!is_stm && !is_feb) fail(line, "unknown op '" + op.name + "'");
    saw_stm = saw_stm || is_stm;
    saw_feb = saw_feb || is_feb;
    if (saw_stm && saw_feb) fail(line, "transactional and raw word ops cannot be mixed");

    const bool takes_value = op.name == "write" || op.name == "sac" || op.name == "sas" || op.name == "tfas";
    const std::size_t want = op.name == "commit" ? 2 : (takes_value ? 4 : 3);
    if (tok.size() != want) fail(line, "'" + op.name + "' takes " + std::to_string(want - 2) + " argument(s)");
    if (op.name != "commit") op.target = number(tok[2], line, Script::kMaxTargets);
    if (takes_value) op.value = value(tok[3], line);
    if (op.name == "write" && op.value.is_bottom()) fail(line, "transactional values cannot be bottom");

    if (s.threads.size() <= thread) s.threads.resize(thread + 1);
    s.threads[thread].push_back(op);
    const auto shared = std::count_if(s.threads[thread].begin(), s.threads[thread].end(),
                                      [](const Script::Op& o) { return o.name != "commit"; });
    if (static_cast<std::size_t>(shared) > Script::kMaxOps) {
      fail(line, "thread " + tok[0] + " has more than " + std::to_string(Script::kMaxOps) + " shared ops");
    }
  }
  if (s.threads.empty()) throw FormatError("script has no ops");
  s.kind = saw_feb ? Script::Kind::Feb : Script::Kind::Stm;
  if (s.kind == Script::Kind::Stm) {
    for (const auto& [id, v] : s.init) {
      if (v.value.is_bottom() || v.flag) throw FormatError("object initial values must be plain numbers");
    }
  }
  return s;
}

Script parse_script(const std::string& text) {
  std::istringstream in(text);
  return parse_script(in);
}

}  // namespace nbfeb::harness
