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
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nbfeb/net/combine.hpp"

namespace nbfeb::net {

/// A k-ary tree of switches `depth` levels deep. Level 0 is the switch next
/// to the memory controller; each switch on level depth-1 has `arity`
/// requester ports. Depth 0 connects requesters straight to the controller.
struct Topology {
  unsigned arity = 2;
  unsigned depth = 0;

  [[nodiscard]] std::size_t ports() const noexcept;
  [[nodiscard]] std::size_t switches() const noexcept;
};

struct SimOptions {
  std::uint64_t seed = 0;
  /// Requests are injected over rounds [0, spread]; 0 means all at once.
  unsigned spread = 0;
  /// Switches combine requests only when set.
  bool combining = true;
};

struct SimStats {
  std::size_t requests_in = 0;
  std::size_t controller_requests = 0;
  std::size_t combines = 0;
  unsigned depth = 0;
  std::uint64_t seed = 0;
  std::size_t rounds = 0;
  /// Largest number of requests for a single location buffered at the
  /// controller in any round.
  std::size_t max_contention_level = 0;
  std::vector<std::size_t> switch_queue_peaks;

  /// JSON object {requests_in, controller_requests, combines, depth, seed, ...}.
  [[nodiscard]] std::string to_json() const;
};

/// Executes requests that reach the memory module.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual MemReply execute(const MemRequest& request) = 0;
};

/// Backs NB-FEB and CAS requests by a FebStore; FAI locations are counters
/// kept beside it, keyed by WordId.
class StoreController : public Controller {
 public:
  explicit StoreController(FebStore& store) : store_(store) {}
  MemReply execute(const MemRequest& request) override;
  std::uint64_t& counter(WordId w) { return counters_[w.index]; }

 private:
  FebStore& store_;
  std::unordered_map<std::uint32_t, std::uint64_t> counters_;
};

struct SimResult {
  std::unordered_map<std::uint64_t, MemReply> replies;  // by request tag
  /// Tags in the serial order the replies correspond to.
  std::vector<std::uint64_t> serial_order;
  SimStats stats;
};

/// Runs one batch through the network in discrete rounds. Every request gets
/// exactly one reply; tags must be unique. Deterministic for a given seed.
SimResult simulate(const Topology& topology, std::span<const MemRequest> batch, Controller& controller,
                   const SimOptions& options = {});

}  // namespace nbfeb::net
