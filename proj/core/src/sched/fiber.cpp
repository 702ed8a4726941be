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
#include "nbfeb/sched/fiber.hpp"

#include <ucontext.h>

#include <stdexcept>

namespace nbfeb::sched {

struct SchedContext {
  ucontext_t ctx{};
};

struct FiberScheduler::Fiber {
  ucontext_t ctx{};
  std::unique_ptr<char[]> stack;
  std::function<void()> body;
  Access pending{};
  bool started = false;
  bool finished = false;
  bool halted = false;
  std::uint64_t primitives = 0;
};

namespace {
thread_local FiberScheduler* tl_sched = nullptr;
thread_local std::uint64_t tl_counter = 0;
}  // namespace

FiberScheduler::FiberScheduler(std::size_t stack_bytes)
    : stack_bytes_(stack_bytes), main_(std::make_unique<SchedContext>()) {}

FiberScheduler::~FiberScheduler() = default;

std::size_t FiberScheduler::spawn(std::function<void()> body) {
  auto f = std::make_unique<Fiber>();
  f->body = std::move(body);
  f->stack = std::make_unique_for_overwrite<char[]>(stack_bytes_);
  fibers_.push_back(std::move(f));
  return fibers_.size() - 1;
}

bool FiberScheduler::finished(std::size_t fiber) const { return fibers_.at(fiber)->finished; }
bool FiberScheduler::halted(std::size_t fiber) const { return fibers_.at(fiber)->halted; }

bool FiberScheduler::runnable(std::size_t fiber) const {
  const auto& f = *fibers_.at(fiber);
  return f.started && !f.finished && !f.halted;
}

const Access& FiberScheduler::pending(std::size_t fiber) const { return fibers_.at(fiber)->pending; }

std::vector<std::size_t> FiberScheduler::runnable_set() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fibers_.size(); ++i) {
    if (runnable(i)) out.push_back(i);
  }
  return out;
}

std::uint64_t FiberScheduler::runnable_mask() const noexcept {
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < fibers_.size() && i < 64; ++i) {
    const Fiber& f = *fibers_[i];
    if (f.started && !f.finished && !f.halted) m |= std::uint64_t{1} << i;
  }
  return m;
}

std::optional<std::size_t> FiberScheduler::current() const noexcept { return running_; }

void FiberScheduler::halt(std::size_t fiber) { fibers_.at(fiber)->halted = true; }

void FiberScheduler::trampoline() {
  FiberScheduler* self = tl_sched;
  Fiber& f = *self->fibers_[*self->running_];
  try {
    f.body();
  } catch (...) {
    if (!self->failure_) self->failure_ = std::current_exception();
  }
  f.finished = true;
  // uc_link returns control to the scheduler context.
}

void FiberScheduler::resume(std::size_t fiber) {
  Fiber& f = *fibers_[fiber];
  if (!f.started) {
    getcontext(&f.ctx);
    f.ctx.uc_stack.ss_sp = f.stack.get();
    f.ctx.uc_stack.ss_size = stack_bytes_;
    f.ctx.uc_link = &main_->ctx;
    makecontext(&f.ctx, &FiberScheduler::trampoline, 0);
    f.started = true;
  }
  running_ = fiber;
  swapcontext(&main_->ctx, &f.ctx);
  running_.reset();
}

void FiberScheduler::yield_from_fiber(Access access) {
  Fiber& f = *fibers_[*running_];
  f.pending = access;
  swapcontext(&f.ctx, &main_->ctx);
}

void FiberScheduler::run(Policy& policy) {
  FiberScheduler* saved = tl_sched;
  tl_sched = this;
  struct Restore {
    FiberScheduler* saved;
    ~Restore() { tl_sched = saved; }
  } restore{saved};

  for (std::size_t i = 0; i < fibers_.size(); ++i) {
    if (!fibers_[i]->started && !fibers_[i]->halted) resume(i);
    if (failure_) std::rethrow_exception(failure_);
  }
  for (;;) {
    bool any = false;
    for (std::size_t i = 0; i < fibers_.size() && !any; ++i) any = runnable(i);
    if (!any) break;
    auto choice = policy.pick(*this);
    if (!choice) break;
    if (!runnable(*choice)) throw std::logic_error("policy picked a fiber that cannot run");
    const Access access = fibers_[*choice]->pending;
    resume(*choice);
    ++steps_;
    if (failure_) std::rethrow_exception(failure_);
    policy.after_step(*this, *choice, access);
  }
}

void point(Access access) {
  FiberScheduler* s = tl_sched;
  if (s == nullptr || !s->running_) return;
  s->yield_from_fiber(access);
}

std::uint64_t& primitive_counter() noexcept {
  FiberScheduler* s = tl_sched;
  if (s != nullptr && s->running_) return s->fibers_[*s->running_]->primitives;
  return tl_counter;
}

bool in_fiber() noexcept { return tl_sched != nullptr && tl_sched->current().has_value(); }

std::optional<std::size_t> RandomPolicy::pick(FiberScheduler& sched) {
  auto ready = sched.runnable_set();
  if (ready.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> dist(0, ready.size() - 1);
  return ready[dist(rng_)];
}

std::optional<std::size_t> SequentialPolicy::pick(FiberScheduler& sched) {
  for (std::size_t i = 0; i < sched.size(); ++i) {
    if (sched.runnable(i)) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> ScriptedPolicy::pick(FiberScheduler& sched) {
  while (next_ < script_.size()) {
    std::size_t want = script_[next_++];
    if (sched.runnable(want)) return want;
  }
  return rest_.pick(sched);
}

}  // namespace nbfeb::sched
