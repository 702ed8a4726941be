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
#include "nbfeb/feb/store.hpp"

#include <sstream>
#include <thread>

#include "nbfeb/sched/hook.hpp"

namespace nbfeb {

struct FebStore::Cell {
  std::atomic<bool> locked{false};
  std::atomic<bool> alive{false};
  WordKind kind = WordKind::Data;
  bool flag = false;
  std::uint64_t raw = 0;

  void lock() noexcept {
    while (locked.exchange(true, std::memory_order_acquire)) {
      while (locked.load(std::memory_order_relaxed)) std::this_thread::yield();
    }
  }
  void unlock() noexcept { locked.store(false, std::memory_order_release); }

  [[nodiscard]] FebPair read() const noexcept {
    if (kind == WordKind::Link && raw == 0) return FebPair{FebValue::bottom(), flag};
    return FebPair{FebValue::from_raw(raw), flag};
  }
};

const char* to_string(FebOp op) noexcept {
  switch (op) {
    case FebOp::Load: return "load";
    case FebOp::Sac: return "sac";
    case FebOp::Sas: return "sas";
    case FebOp::Tfas: return "tfas";
  }
  return "?";
}

FebOp parse_feb_op(const std::string& text) {
  if (text == "load") return FebOp::Load;
  if (text == "sac") return FebOp::Sac;
  if (text == "sas") return FebOp::Sas;
  if (text == "tfas") return FebOp::Tfas;
  throw std::invalid_argument("unknown FEB primitive: " + text);
}

FebValue FebValue::parse(const std::string& text) {
  if (text == "bot" || text == "_" || text == "⊥") return bottom();
  std::size_t used = 0;
  const auto v = std::stoull(text, &used);
  if (used != text.size()) throw std::invalid_argument("bad FEB value: " + text);
  return of(v);
}

FebStore::FebStore() {
  for (auto& c : chunks_) c.store(nullptr, std::memory_order_relaxed);
}

FebStore::~FebStore() {
  for (auto& c : chunks_) delete[] c.load(std::memory_order_relaxed);
}

FebStore::Cell* FebStore::cell_if_exists(std::uint32_t index) const noexcept {
  const auto [chunk, offset] = util::chunk_pos(index, kBaseBits);
  Cell* base = chunks_[chunk].load(std::memory_order_acquire);
  if (base == nullptr) return nullptr;
  return &base[offset];
}

FebStore::Cell& FebStore::cell(WordId w) const {
  Cell* c = w.valid() ? cell_if_exists(w.index) : nullptr;
  if (c == nullptr || !c->alive.load(std::memory_order_acquire)) {
    throw FebFault("invalid FEB word id " + (w.valid() ? std::to_string(w.index) : std::string("<none>")));
  }
  return *c;
}

bool FebStore::valid(WordId w) const noexcept {
  const Cell* c = w.valid() ? cell_if_exists(w.index) : nullptr;
  return c != nullptr && c->alive.load(std::memory_order_acquire);
}

WordId FebStore::take_index() {
  std::lock_guard lock(alloc_mu_);
  std::uint32_t index;
  if (!free_list_.empty()) {
    index = free_list_.back();
    free_list_.pop_back();
  } else {
    if (next_index_ == WordId::kInvalid) throw std::bad_alloc();
    index = next_index_++;
    const std::size_t chunk = util::chunk_pos(index, kBaseBits).chunk;
    if (chunks_[chunk].load(std::memory_order_relaxed) == nullptr) {
      chunks_[chunk].store(new Cell[util::chunk_size(chunk, kBaseBits)], std::memory_order_release);
    }
  }
  return WordId{index};
}

WordId FebStore::alloc_zeroed(WordKind kind) {
  const WordId w = take_index();
  Cell& c = *cell_if_exists(w.index);
  c.kind = kind;
  c.alive.store(true, std::memory_order_release);
  live_.fetch_add(1, std::memory_order_relaxed);
  return w;
}

WordId FebStore::alloc(FebValue initial, bool flag, WordKind kind) {
  const WordId w = alloc_zeroed(kind);
  Cell& c = *cell_if_exists(w.index);
  c.lock();
  c.raw = initial.raw();
  c.flag = flag;
  c.unlock();
  return w;
}

void FebStore::free(WordId w) {
  Cell& c = cell(w);
  c.lock();
  c.raw = 0;
  c.flag = false;
  c.alive.store(false, std::memory_order_release);
  c.unlock();
  live_.fetch_sub(1, std::memory_order_relaxed);
  std::lock_guard lock(alloc_mu_);
  free_list_.push_back(w.index);
}

FebPair FebStore::apply(FebOp op, WordId w, FebValue operand) {
  sched::point(sched::Space::Word, w.index,
               op == FebOp::Load ? sched::AccessKind::Read : sched::AccessKind::Rmw);
  Cell& c = cell(w);
  ++sched::primitive_counter();
  c.lock();
  FebPair word = c.read();
  const FebPair old = nbfeb::apply(op, word, operand);
  if (op != FebOp::Load) {
    c.raw = word.value.raw();
    c.flag = word.flag;
  }
  c.unlock();
  return old;
}

FebPair FebStore::peek(WordId w) const {
  Cell& c = cell(w);
  c.lock();
  const FebPair p = c.read();
  c.unlock();
  return p;
}

void FebStore::poke(WordId w, FebPair p) {
  Cell& c = cell(w);
  c.lock();
  c.raw = p.value.raw();
  c.flag = p.flag;
  c.unlock();
}

std::string FebStore::dump() const {
  std::ostringstream out;
  for (std::uint32_t i = 0;; ++i) {
    Cell* c = cell_if_exists(i);
    if (c == nullptr) break;
    if (!c->alive.load(std::memory_order_acquire)) continue;
    const FebPair p = peek(WordId{i});
    out << 'w' << i << ' ' << (c->kind == WordKind::Link ? "link" : "data") << ' ' << p.value << ' '
        << (p.flag ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace nbfeb
