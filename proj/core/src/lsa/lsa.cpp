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
#include "nbfeb/lsa/lsa.hpp"

#include <algorithm>

#include "nbfeb/sched/hook.hpp"

namespace nbfeb::lsa {

Timestamp GlobalClock::tick() {
  sched::point(sched::Space::Clock, 0, sched::AccessKind::Rmw);
  ++sched::primitive_counter();
  return value_.fetch_add(1, std::memory_order_seq_cst) + 1;
}

Timestamp GlobalClock::now() {
  sched::point(sched::Space::Clock, 0, sched::AccessKind::Read);
  ++sched::primitive_counter();
  return value_.load(std::memory_order_seq_cst);
}

namespace {

class ClockController : public net::Controller {
 public:
  explicit ClockController(std::atomic<Timestamp>& value) : value_(value) {}
  net::MemReply execute(const net::MemRequest& r) override {
    const Timestamp old = value_.fetch_add(r.increment, std::memory_order_seq_cst);
    return net::MemReply{FebValue::of(old), false};
  }

 private:
  std::atomic<Timestamp>& value_;
};

}  // namespace

std::vector<Timestamp> GlobalClock::tick_batch(std::size_t count, const net::Topology& topology,
                                               const net::SimOptions& options, net::SimStats* stats) {
  if (count == 0) return {};
  std::vector<net::MemRequest> batch;
  batch.reserve(count);
  for (std::size_t i = 0; i < count; ++i) batch.push_back(net::MemRequest::fai(WordId{0}, 1, i));
  ClockController controller(value_);
  const auto result = net::simulate(topology, batch, controller, options);
  std::vector<Timestamp> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = result.replies.at(i).value.payload() + 1;
  if (stats != nullptr) *stats = result.stats;
  return out;
}

std::optional<VersionView> LsaState::choose(std::span<const VersionView> versions, OpenMode mode) const {
  if (versions.empty()) return std::nullopt;
  if (mode == OpenMode::Write) {
    const auto latest = std::max_element(versions.begin(), versions.end(), [](const auto& a, const auto& b) {
      return a.commit_ts < b.commit_ts;
    });
    if (latest->range.intersects(range_)) return *latest;
    return std::nullopt;
  }
  std::optional<VersionView> best;
  for (const auto& v : versions) {
    if (!v.range.intersects(range_)) continue;
    if (!best || v.commit_ts < best->commit_ts) best = v;
  }
  return best;
}

std::optional<VersionView> LsaState::open(std::span<const VersionView> versions, OpenMode mode,
                                          const Extender& extend) {
  auto picked = choose(versions, mode);
  if (!picked && extend) {
    if (auto upper = extend(); upper && *upper > range_.upper) {
      range_.upper = *upper;
      picked = choose(versions, mode);
    }
  }
  if (!picked) return std::nullopt;
  range_ = range_.intersect(picked->range);
  return picked;
}

}  // namespace nbfeb::lsa
