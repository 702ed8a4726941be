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

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "nbfeb/sched/hook.hpp"

namespace nbfeb::sched {

class FiberScheduler;

/// Chooses which fiber takes the next shared step.
class Policy {
 public:
  virtual ~Policy() = default;
  /// Returns the fiber to resume, or nullopt to end the run early.
  virtual std::optional<std::size_t> pick(FiberScheduler& sched) = 0;
  /// Called after fiber `fiber` executed `access` and ran to its next point.
  virtual void after_step(FiberScheduler& /*sched*/, std::size_t /*fiber*/,
                          const Access& /*access*/) {}
};

/// Cooperative user-level threads on one OS thread. Every sched::point()
/// inside a fiber hands control back to the scheduler, which lets a Policy
/// pick the next fiber. Fibers that are halted are never resumed; their
/// stacks are released without unwinding when the scheduler is destroyed.
class FiberScheduler {
 public:
  explicit FiberScheduler(std::size_t stack_bytes = 256 * 1024);
  ~FiberScheduler();
  FiberScheduler(const FiberScheduler&) = delete;
  FiberScheduler& operator=(const FiberScheduler&) = delete;

  std::size_t spawn(std::function<void()> body);

  /// Runs until every fiber finished or was halted, or the policy stops.
  /// Rethrows the first exception escaping a fiber body.
  void run(Policy& policy);

  void halt(std::size_t fiber);

  [[nodiscard]] std::size_t size() const noexcept { return fibers_.size(); }
  [[nodiscard]] bool finished(std::size_t fiber) const;
  [[nodiscard]] bool halted(std::size_t fiber) const;
  [[nodiscard]] bool runnable(std::size_t fiber) const;
  [[nodiscard]] const Access& pending(std::size_t fiber) const;
  [[nodiscard]] std::vector<std::size_t> runnable_set() const;
  /// Bit i set when fiber i is runnable; only the first 64 fibers appear.
  [[nodiscard]] std::uint64_t runnable_mask() const noexcept;
  [[nodiscard]] std::uint64_t steps() const noexcept { return steps_; }
  /// Index of the fiber currently executing, if any.
  [[nodiscard]] std::optional<std::size_t> current() const noexcept;

 private:
  struct Fiber;
  friend void point(Access);
  friend std::uint64_t& primitive_counter() noexcept;

  void resume(std::size_t fiber);
  static void trampoline();
  void yield_from_fiber(Access access);

  std::size_t stack_bytes_;
  std::vector<std::unique_ptr<Fiber>> fibers_;
  std::unique_ptr<struct SchedContext> main_;
  std::optional<std::size_t> running_;
  std::exception_ptr failure_;
  std::uint64_t steps_ = 0;
};

/// Uniformly random choice among runnable fibers, seeded.
class RandomPolicy : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}
  std::optional<std::size_t> pick(FiberScheduler& sched) override;

 private:
  std::mt19937_64 rng_;
};

/// Runs fibers in index order, each until it finishes.
class SequentialPolicy : public Policy {
 public:
  std::optional<std::size_t> pick(FiberScheduler& sched) override;
};

/// Follows an explicit list of fiber indices, then falls back to `rest`.
class ScriptedPolicy : public Policy {
 public:
  ScriptedPolicy(std::vector<std::size_t> script, Policy& rest)
      : script_(std::move(script)), rest_(rest) {}
  std::optional<std::size_t> pick(FiberScheduler& sched) override;

 private:
  std::vector<std::size_t> script_;
  std::size_t next_ = 0;
  Policy& rest_;
};

}  // namespace nbfeb::sched
