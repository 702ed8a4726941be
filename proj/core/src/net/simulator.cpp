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
#include "nbfeb/net/simulator.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace nbfeb::net {

std::size_t Topology::ports() const noexcept {
  std::size_t p = 1;
  for (unsigned i = 0; i < depth; ++i) p *= arity;
  return p;
}

std::size_t Topology::switches() const noexcept {
  std::size_t total = 0;
  std::size_t level = 1;
  for (unsigned i = 0; i < depth; ++i) {
    total += level;
    level *= arity;
  }
  return total;
}

std::string SimStats::to_json() const {
  std::ostringstream out;
  out << "{\"requests_in\":" << requests_in << ",\"controller_requests\":" << controller_requests
      << ",\"combines\":" << combines << ",\"depth\":" << depth << ",\"seed\":" << seed
      << ",\"rounds\":" << rounds << ",\"max_contention_level\":" << max_contention_level << '}';
  return out.str();
}

MemReply StoreController::execute(const MemRequest& request) {
  switch (request.kind) {
    case Kind::Fai: {
      std::uint64_t& c = counters_[request.location.index];
      const std::uint64_t old = c;
      c += request.increment;
      return MemReply{FebValue::of(old), false};
    }
    case Kind::Cas: {
      // Emulated with a load and a conditional store; the simulator serializes
      // controller work, so the pair is atomic here.
      const FebPair cur = store_.peek(request.location);
      if (cur.value == request.expected) {
        store_.sas(request.location, request.operand);
        return MemReply{cur.value, true};
      }
      return MemReply{cur.value, false};
    }
    default:
      return to_reply(store_.apply(to_feb_op(request.kind), request.location, request.operand));
  }
}

namespace {

struct Packet {
  MemRequest req;
  int plan = -1;
  int first = -1;
  int second = -1;
};

class Network {
 public:
  Network(const Topology& topo, Controller& controller, const SimOptions& opt)
      : topo_(topo), controller_(controller), opt_(opt) {
    if (topo.depth > 0 && topo.arity < 1) throw std::invalid_argument("arity must be >= 1");
    level_offset_.push_back(0);
    std::size_t width = 1;
    for (unsigned l = 0; l < topo.depth; ++l) {
      level_offset_.push_back(level_offset_.back() + width);
      width *= topo.arity;
    }
    queues_.resize(topo.switches());
    peaks_.assign(topo.switches(), 0);
  }

  SimResult run(std::span<const MemRequest> batch) {
    SimResult result;
    result.stats.requests_in = batch.size();
    result.stats.depth = topo_.depth;
    result.stats.seed = opt_.seed;

    std::map<std::size_t, std::vector<std::pair<std::size_t, int>>> injections;  // round -> (port, packet)
    std::mt19937_64 rng(opt_.seed);
    const std::size_t ports = std::max<std::size_t>(topo_.ports(), 1);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (!batch[i].well_formed()) throw std::invalid_argument("malformed request in batch");
      const int p = add_packet(Packet{batch[i]});
      std::size_t round = 0;
      if (opt_.spread > 0) round = std::uniform_int_distribution<std::size_t>(0, opt_.spread)(rng);
      injections[round].emplace_back(i % ports, p);
    }

    std::deque<int> controller_queue;
    std::size_t in_flight = batch.size();
    std::size_t round = 0;
    while (in_flight > 0 || !controller_queue.empty()) {
      std::vector<int> to_controller;
      if (auto it = injections.find(round); it != injections.end()) {
        for (auto [port, pkt] : it->second) {
          if (topo_.depth == 0) {
            to_controller.push_back(pkt);
          } else {
            queues_[leaf_switch(port)].push_back(pkt);
          }
        }
      }

      // Every switch drains its queue one hop up; arrivals join next round.
      std::vector<std::vector<int>> incoming(queues_.size());
      for (unsigned level = 0; level < topo_.depth; ++level) {
        const std::size_t width = level_offset_[level + 1] - level_offset_[level];
        for (std::size_t pos = 0; pos < width; ++pos) {
          const std::size_t s = level_offset_[level] + pos;
          auto& q = queues_[s];
          if (q.empty()) continue;
          peaks_[s] = std::max(peaks_[s], q.size());
          std::vector<int> out = opt_.combining ? combine_queue(q) : q;
          q.clear();
          if (level == 0) {
            to_controller.insert(to_controller.end(), out.begin(), out.end());
          } else {
            auto& dst = incoming[level_offset_[level - 1] + pos / topo_.arity];
            dst.insert(dst.end(), out.begin(), out.end());
          }
        }
      }
      for (std::size_t s = 0; s < queues_.size(); ++s) {
        queues_[s].insert(queues_[s].end(), incoming[s].begin(), incoming[s].end());
      }

      for (int p : to_controller) controller_queue.push_back(p);
      result.stats.controller_requests += to_controller.size();
      if (!controller_queue.empty()) {
        std::unordered_map<std::uint32_t, std::size_t> per_location;
        for (int p : controller_queue) {
          result.stats.max_contention_level =
              std::max(result.stats.max_contention_level, ++per_location[packets_[p].req.location.index]);
        }
        const int head = controller_queue.front();
        controller_queue.pop_front();
        deliver(head, controller_.execute(packets_[head].req), result, in_flight);
      }
      ++round;
      if (round > 1'000'000) throw std::runtime_error("network simulation did not drain");
    }
    result.stats.rounds = round;
    result.stats.combines = combines_;
    result.stats.switch_queue_peaks = peaks_;
    return result;
  }

 private:
  std::size_t leaf_switch(std::size_t port) const {
    return level_offset_[topo_.depth - 1] + port / topo_.arity;
  }

  int add_packet(Packet p) {
    packets_.push_back(std::move(p));
    return static_cast<int>(packets_.size() - 1);
  }

  std::vector<int> combine_queue(const std::vector<int>& q) {
    std::vector<int> out;
    std::vector<bool> used(q.size(), false);
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      int cur = q[i];
      for (std::size_t j = i + 1; j < q.size(); ++j) {
        if (used[j]) continue;
        auto plan = try_combine(packets_[cur].req, packets_[q[j]].req);
        if (!plan) continue;
        used[j] = true;
        plans_.push_back(*plan);
        Packet merged{plan->combined, static_cast<int>(plans_.size() - 1), cur, q[j]};
        merged.req.tag = ~std::uint64_t{0} - plans_.size();
        cur = add_packet(merged);
        ++combines_;
        break;
      }
      out.push_back(cur);
    }
    return out;
  }

  void deliver(int p, const MemReply& reply, SimResult& result, std::size_t& in_flight) {
    const Packet& pkt = packets_[p];
    if (pkt.plan < 0) {
      if (!result.replies.emplace(pkt.req.tag, reply).second) {
        throw std::invalid_argument("duplicate request tag in batch");
      }
      result.serial_order.push_back(pkt.req.tag);
      --in_flight;
      return;
    }
    const auto [a, b] = resolve(plans_[pkt.plan], reply);
    const int first = pkt.first;
    const int second = pkt.second;
    deliver(first, a, result, in_flight);
    deliver(second, b, result, in_flight);
  }

  Topology topo_;
  Controller& controller_;
  SimOptions opt_;
  std::vector<std::size_t> level_offset_;
  std::vector<std::vector<int>> queues_;
  std::vector<std::size_t> peaks_;
  std::vector<Packet> packets_;
  std::vector<CombinePlan> plans_;
  std::size_t combines_ = 0;
};

}  // namespace

SimResult simulate(const Topology& topology, std::span<const MemRequest> batch, Controller& controller,
                   const SimOptions& options) {
  if (batch.empty()) throw std::invalid_argument("simulate() needs a nonempty batch");
  Network net(topology, controller, options);
  return net.run(batch);
}

}  // namespace nbfeb::net
