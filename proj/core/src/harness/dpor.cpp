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
#include "nbfeb/harness/dpor.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>

namespace nbfeb::harness {

namespace {

using Mask = std::uint64_t;

constexpr Mask bit(std::size_t f) noexcept { return Mask{1} << f; }

struct State {
  Mask enabled = 0;
  Mask backtrack = 0;
  Mask done = 0;
  Mask sleep = 0;
  std::size_t chosen = 0;
  sched::Access access;
  std::vector<sched::Access> next;  // pending access per fiber (enabled ones)
};

// Replays `prefix`, then keeps running the fiber that ran last for as long
// as it can (fewest context switches), recording every decision. Fibers in
// the sleep set are skipped; when only sleeping fibers remain the rest of
// the run is equivalent to one already explored and is not recorded.
class DporPolicy : public sched::Policy {
 public:
  DporPolicy(std::vector<State>& stack, std::size_t prefix) : stack_(stack), prefix_(prefix) {}

  std::optional<std::size_t> pick(sched::FiberScheduler& s) override {
    const Mask ready = s.runnable_mask();
    if (ready == 0) return std::nullopt;
    if (blocked_) return static_cast<std::size_t>(std::countr_zero(ready));
    std::size_t choice;
    if (depth_ < prefix_) {
      choice = stack_[depth_].chosen;
      if ((ready & bit(choice)) == 0) {
        throw std::logic_error("exploration replay diverged; program is not deterministic");
      }
      stack_[depth_].done |= bit(choice);
    } else {
      if (depth_ == stack_.size()) stack_.emplace_back();
      State& st = stack_[depth_];
      st.enabled = ready;
      st.next.resize(s.size());
      for (Mask m = ready; m != 0; m &= m - 1) {
        const auto f = static_cast<std::size_t>(std::countr_zero(m));
        st.next[f] = s.pending(f);
      }
      st.sleep = sleep_;
      const Mask awake = ready & ~st.sleep;
      if (awake == 0) {
        blocked_ = true;
        return static_cast<std::size_t>(std::countr_zero(ready));
      }
      choice = last_ && (awake & bit(*last_)) != 0 ? *last_ : static_cast<std::size_t>(std::countr_zero(awake));
      st.chosen = choice;
      st.backtrack = bit(choice);
      st.done = bit(choice);
    }
    State& st = stack_[depth_];
    st.access = s.pending(choice);
    // Fibers already explored here, or asleep, stay asleep while they commute
    // with the step taken.
    sleep_ = 0;
    for (Mask m = (st.sleep | st.done) & ~bit(choice); m != 0; m &= m - 1) {
      const auto f = static_cast<std::size_t>(std::countr_zero(m));
      if (!st.next[f].conflicts(st.access)) sleep_ |= bit(f);
    }
    last_ = choice;
    ++depth_;
    return choice;
  }

  [[nodiscard]] std::size_t depth() const noexcept { return depth_; }
  [[nodiscard]] bool blocked() const noexcept { return blocked_; }

 private:
  std::vector<State>& stack_;
  std::size_t prefix_;
  std::size_t depth_ = 0;
  std::optional<std::size_t> last_;
  Mask sleep_ = 0;
  bool blocked_ = false;
};

// Adds backtrack points for the races of steps at or after `fresh` (earlier
// steps were analysed by the run that shared this prefix).
void analyse(std::vector<State>& stack, std::size_t fibers, std::size_t fresh) {
  const std::size_t n = stack.size();
  // clock[j*fibers + q]: number of steps of fiber q that happen before or at
  // step j (steps of q are counted by their 1-based position in the trace).
  std::vector<std::size_t> clock(n * fibers, 0);
  std::vector<std::size_t> last_step(fibers, ~std::size_t{0});
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_location;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t p = stack[j].chosen;
    const sched::Access& aj = stack[j].access;
    std::size_t* c = &clock[j * fibers];
    const bool ran_before = last_step[p] != ~std::size_t{0};
    if (ran_before) std::copy_n(&clock[last_step[p] * fibers], fibers, c);
    auto& same = by_location[aj.location];
    if (j >= fresh) {
      // Races: earlier dependent steps of other fibers not already ordered
      // before p. Each is checked at every state where p's step was pending.
      const std::size_t from = ran_before ? last_step[p] + 1 : 0;
      for (auto it = same.rbegin(); it != same.rend(); ++it) {
        const std::size_t i = *it;
        const std::size_t q = stack[i].chosen;
        if (q == p || !stack[i].access.conflicts(aj)) continue;
        if (c[q] >= i + 1) continue;  // i happens before p already
        State& s = stack[i];
        s.backtrack |= (s.enabled & bit(p)) != 0 ? bit(p) : s.enabled;
        // Below `from` only the latest race matters.
        if (i < from) break;
      }
    }
    for (const std::size_t i : same) {
      if (stack[i].chosen != p && stack[i].access.conflicts(aj)) {
        const std::size_t* ci = &clock[i * fibers];
        for (std::size_t q = 0; q < fibers; ++q) c[q] = std::max(c[q], ci[q]);
      }
    }
    same.push_back(j);
    c[p] = j + 1;
    last_step[p] = j;
  }
}

}  // namespace

DporStats explore_all(const std::function<void(sched::FiberScheduler&)>& setup,
                      const std::function<std::optional<std::string>()>& check, std::size_t bound) {
  DporStats stats;
  std::vector<State> stack;
  std::size_t prefix = 0;
  for (;;) {
    if (stats.executions + stats.pruned >= bound) {
      throw ExploreBoundExceeded("exploration needs more than " + std::to_string(bound) +
                                 " executions (deepest so far: " + std::to_string(stats.max_depth) + " steps)");
    }
    std::size_t fibers = 0;
    bool blocked = false;
    {
      sched::FiberScheduler fs(128 * 1024);
      setup(fs);
      fibers = fs.size();
      if (fibers > 64) throw std::invalid_argument("exploration supports at most 64 fibers");
      DporPolicy policy(stack, prefix);
      fs.run(policy);
      stack.resize(policy.depth());
      blocked = policy.blocked();
    }
    if (blocked) {
      ++stats.pruned;
    } else {
      ++stats.executions;
      stats.max_depth = std::max(stats.max_depth, stack.size());
      if (auto v = check()) {
        std::string sched = "schedule:";
        for (const State& st : stack) sched += ' ' + std::to_string(st.chosen);
        stats.violations.push_back(*v + sched + '\n');
      }
    }
    analyse(stack, fibers, prefix == 0 ? 0 : prefix - 1);

    // Deepest state with an unexplored alternative.
    std::optional<std::size_t> k;
    for (std::size_t i = stack.size(); i-- > 0;) {
      const Mask todo = stack[i].backtrack & ~stack[i].done & ~stack[i].sleep;
      if (todo != 0) {
        stack[i].chosen = static_cast<std::size_t>(std::countr_zero(todo));
        k = i;
        break;
      }
    }
    if (!k) break;
    stack.resize(*k + 1);
    prefix = *k + 1;
  }
  return stats;
}

}  // namespace nbfeb::harness
