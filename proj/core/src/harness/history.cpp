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
#include "nbfeb/harness/history.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include "nbfeb/feb/store.hpp"
#include "nbfeb/sched/fiber.hpp"

namespace nbfeb::harness {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw FormatError("history line " + std::to_string(line) + ": " + what);
}

std::uint32_t parse_u32(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(s, &used);
    if (used != s.size() || v > 0xffffffffUL) fail(line, "bad number '" + s + "'");
    return static_cast<std::uint32_t>(v);
  } catch (const std::logic_error&) {
    fail(line, "bad number '" + s + "'");
  }
}

FebValue parse_value(const std::string& s, std::size_t line) {
  try {
    return FebValue::parse(s);
  } catch (const std::exception&) {
    fail(line, "bad value '" + s + "'");
  }
}

bool parse_flag(const std::string& s, std::size_t line) {
  if (s == "0") return false;
  if (s == "1") return true;
  fail(line, "flag must be 0 or 1");
}

using Words = std::map<std::uint32_t, FebPair>;

FebPair& word_of(Words& w, std::uint32_t id) { return w.try_emplace(id, FebPair{}).first->second; }

// Sorted (word, state) pairs as a memo key.
std::string key_of(std::uint64_t mask, const Words& w) {
  std::string k(reinterpret_cast<const char*>(&mask), sizeof mask);
  for (const auto& [id, p] : w) {
    const std::uint64_t raw = p.value.raw();
    k.append(reinterpret_cast<const char*>(&id), sizeof id);
    k.append(reinterpret_cast<const char*>(&raw), sizeof raw);
    k.push_back(p.flag ? '1' : '0');
  }
  return k;
}

struct Wgl {
  const History& h;
  std::unordered_set<std::string> failed;
  std::vector<std::size_t> order;
  std::size_t states = 0;
  std::uint64_t complete_mask = 0;

  bool dfs(std::uint64_t done, Words& words) {
    ++states;
    if ((done & complete_mask) == complete_mask) return true;
    const std::string key = key_of(done, words);
    if (failed.count(key) != 0) return false;
    // An op may go next only if it was called before every unlinearized
    // completed op returned.
    std::size_t horizon = ~std::size_t{0};
    for (std::size_t i = 0; i < h.ops.size(); ++i) {
      if ((done >> i & 1U) == 0 && h.ops[i].response) horizon = std::min(horizon, h.ops[i].ret);
    }
    for (std::size_t i = 0; i < h.ops.size(); ++i) {
      if ((done >> i & 1U) != 0 || h.ops[i].call > horizon) continue;
      const HistoryEvent& e = h.ops[i];
      FebPair& w = word_of(words, e.word);
      const FebPair saved = w;
      const FebPair got = apply(e.op, w, e.operand);
      if (!e.response || *e.response == got) {
        order.push_back(i);
        if (dfs(done | (std::uint64_t{1} << i), words)) return true;
        order.pop_back();
      }
      word_of(words, e.word) = saved;
    }
    failed.insert(key);
    return false;
  }
};

}  // namespace

History parse_history(std::istream& in) {
  History h;
  std::map<std::uint32_t, std::size_t> open;  // thread -> op index
  std::string raw;
  std::size_t line = 0;
  std::size_t seq = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok[0] == "*") {
      if (tok.size() < 4 || tok.size() > 5 || tok[1] != "init") fail(line, "expected '* init <word> <value> [<flag>]'");
      if (seq != 0) fail(line, "init lines must precede events");
      const std::uint32_t w = parse_u32(tok[2], line);
      h.init[w] = FebPair{parse_value(tok[3], line), tok.size() == 5 && parse_flag(tok[4], line)};
      continue;
    }
    const std::uint32_t thread = parse_u32(tok[0], line);
    if (tok.size() < 2) fail(line, "missing event kind");
    if (tok[1] == "call") {
      if (tok.size() < 4) fail(line, "expected '<thread> call <op> <word> [<value>]'");
      if (open.count(thread) != 0) fail(line, "thread " + tok[0] + " already has a pending call");
      HistoryEvent e;
      e.thread = thread;
      try {
        e.op = parse_feb_op(tok[2]);
      } catch (const std::exception&) {
        fail(line, "unknown primitive '" + tok[2] + "'");
      }
      e.word = parse_u32(tok[3], line);
      if (has_operand(e.op)) {
        if (tok.size() != 5) fail(line, tok[2] + " takes one value");
        e.operand = parse_value(tok[4], line);
      } else if (tok.size() != 4) {
        fail(line, "load takes no value");
      }
      e.call = seq++;
      open[thread] = h.ops.size();
      h.ops.push_back(e);
    } else if (tok[1] == "ret") {
      if (tok.size() != 4) fail(line, "expected '<thread> ret <value> <flag>'");
      const auto it = open.find(thread);
      if (it == open.end()) fail(line, "return without a pending call");
      HistoryEvent& e = h.ops[it->second];
      e.response = FebPair{parse_value(tok[2], line), parse_flag(tok[3], line)};
      e.ret = seq++;
      open.erase(it);
    } else {
      fail(line, "unknown event '" + tok[1] + "'");
    }
  }
  if (h.ops.size() > 64) throw FormatError("history has more than 64 calls");
  return h;
}

History parse_history(const std::string& text) {
  std::istringstream in(text);
  return parse_history(in);
}

std::string format_history(const History& h) {
  std::ostringstream out;
  for (const auto& [w, p] : h.init) out << "* init " << w << ' ' << p.value << ' ' << (p.flag ? 1 : 0) << '\n';
  struct Line {
    std::size_t at;
    std::string text;
  };
  std::vector<Line> lines;
  for (const HistoryEvent& e : h.ops) {
    std::ostringstream c;
    c << e.thread << " call " << to_string(e.op) << ' ' << e.word;
    if (has_operand(e.op)) c << ' ' << e.operand;
    lines.push_back({e.call, c.str()});
    if (e.response) {
      std::ostringstream r;
      r << e.thread << " ret " << e.response->value << ' ' << (e.response->flag ? 1 : 0);
      lines.push_back({e.ret, r.str()});
    }
  }
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.at < b.at; });
  for (const Line& l : lines) out << l.text << '\n';
  return out.str();
}

LinVerdict check_linearizable(const History& h) {
  if (h.ops.size() > 64) throw FormatError("history has more than 64 calls");
  Wgl w{h, {}, {}, 0, 0};
  for (std::size_t i = 0; i < h.ops.size(); ++i) {
    if (h.ops[i].response) w.complete_mask |= std::uint64_t{1} << i;
  }
  Words words = h.init;
  LinVerdict v;
  v.linearizable = w.dfs(0, words);
  if (v.linearizable) v.witness = w.order;
  v.states_explored = w.states;
  return v;
}

LinVerdict brute_force_linearizable(const History& h) {
  std::vector<std::size_t> pending;
  std::vector<std::size_t> complete;
  for (std::size_t i = 0; i < h.ops.size(); ++i) (h.ops[i].response ? complete : pending).push_back(i);
  if (pending.size() > 16) throw FormatError("too many pending calls for brute force");
  LinVerdict v;
  for (std::uint32_t subset = 0; subset < (1U << pending.size()); ++subset) {
    std::vector<std::size_t> chosen = complete;
    for (std::size_t b = 0; b < pending.size(); ++b) {
      if (subset >> b & 1U) chosen.push_back(pending[b]);
    }
    std::sort(chosen.begin(), chosen.end());
    do {
      ++v.states_explored;
      bool ok = true;
      // Real time: a completed op that returned before another was called
      // must come first.
      for (std::size_t a = 0; a < chosen.size() && ok; ++a) {
        for (std::size_t b = a + 1; b < chosen.size() && ok; ++b) {
          const HistoryEvent& later = h.ops[chosen[a]];
          const HistoryEvent& earlier = h.ops[chosen[b]];
          if (earlier.response && earlier.ret < later.call) ok = false;
        }
      }
      Words words = h.init;
      for (std::size_t k = 0; k < chosen.size() && ok; ++k) {
        const HistoryEvent& e = h.ops[chosen[k]];
        const FebPair got = apply(e.op, word_of(words, e.word), e.operand);
        if (e.response && *e.response != got) ok = false;
      }
      if (ok) {
        v.linearizable = true;
        v.witness = chosen;
        return v;
      }
    } while (std::next_permutation(chosen.begin(), chosen.end()));
  }
  return v;
}

History generate_history(std::uint64_t seed, const HistoryGenOptions& options) {
  if (options.threads == 0 || options.words == 0) throw std::invalid_argument("need at least one thread and word");
  std::mt19937_64 rng(seed);
  const std::vector<FebValue> values{FebValue::bottom(), FebValue::of(0), FebValue::of(1), FebValue::of(2)};
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

  FebStore store;
  History h;
  std::vector<WordId> ids;
  for (std::uint32_t w = 0; w < options.words; ++w) {
    const FebPair init{values[pick(values.size())], pick(2) == 1};
    h.init[w] = init;
    ids.push_back(store.alloc(init.value, init.flag));
  }
  // Deal the calls out round-robin, then randomise their contents.
  std::vector<std::vector<HistoryEvent>> plan(options.threads);
  for (std::size_t i = 0; i < options.ops; ++i) {
    HistoryEvent e;
    e.thread = static_cast<std::uint32_t>(i % options.threads);
    e.op = static_cast<FebOp>(pick(4));
    e.word = static_cast<std::uint32_t>(pick(options.words));
    if (has_operand(e.op)) e.operand = values[pick(values.size())];
    plan[e.thread].push_back(e);
  }

  std::size_t seq = 0;
  sched::FiberScheduler fs(64 * 1024);
  for (std::size_t t = 0; t < options.threads; ++t) {
    fs.spawn([&, t] {
      for (HistoryEvent e : plan[t]) {
        e.call = seq++;
        const std::size_t slot = h.ops.size();
        h.ops.push_back(e);
        const FebPair r = store.apply(e.op, ids[e.word], e.operand);
        h.ops[slot].response = r;
        h.ops[slot].ret = seq++;
      }
    });
  }
  sched::RandomPolicy policy(rng());
  fs.run(policy);
  return h;
}

bool corrupt_history(History& h, std::uint64_t seed) {
  std::vector<std::size_t> done;
  for (std::size_t i = 0; i < h.ops.size(); ++i) {
    if (h.ops[i].response) done.push_back(i);
  }
  if (done.empty()) return false;
  std::mt19937_64 rng(seed);
  FebPair& r = *h.ops[done[rng() % done.size()]].response;
  if (rng() % 2 == 0) {
    r.flag = !r.flag;
  } else {
    r.value = r.value.is_bottom() ? FebValue::of(rng() % 3) : (r.value.raw() < 3 && rng() % 2 == 0)
                                                                  ? FebValue::bottom()
                                                                  : FebValue::of((r.value.raw() + 1 + rng() % 2) % 3);
  }
  return true;
}

}  // namespace nbfeb::harness
