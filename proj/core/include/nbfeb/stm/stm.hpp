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

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nbfeb/feb/store.hpp"
#include "nbfeb/lsa/lsa.hpp"
#include "nbfeb/reclaim/epoch.hpp"
#include "nbfeb/reclaim/pool.hpp"
#include "nbfeb/stm/types.hpp"

namespace nbfeb::stm {

namespace detail {

struct Version {
  Data data;
  std::atomic<std::uint32_t> refs{0};
};

struct TxRecord {
  WordId status;
  std::atomic<Timestamp> cts{0};
  std::atomic<std::uint32_t> refs{0};
  std::atomic<std::uint32_t> transitions{0};
  std::uint32_t owner = 0;
};

// Locator fields other than `next` are written before publication and
// never change afterwards.
struct Locator {
  std::uint32_t object = 0;
  std::uint32_t tx = 0;
  std::uint32_t old_version = 0;
  std::uint32_t new_version = 0;
  Timestamp cts = 0;
  WordId next;
  std::atomic<bool> displaced{false};
  std::atomic<bool> retired{false};
};

struct Slot {
  std::atomic<std::uint64_t> seq{0};
  std::atomic<std::uint32_t> loc{0};  // locator index + 1; 0 = empty
  std::atomic<Timestamp> ts{0};
};

struct Object {
  std::uint32_t index = 0;
  std::unique_ptr<Slot[]> slots;
  std::atomic<std::size_t> live_locators{0};
};

}  // namespace detail

/// One consistent view of an object's N slots.
struct SlotView {
  std::uint32_t locator = 0;  // locator index + 1; 0 = empty
  Timestamp ts = 0;
  std::uint64_t seq = 0;
};

class Stm;

/// Per-thread transaction context. Session i owns slot i of every object and
/// must only be used by one thread (or fiber) at a time.
class Session {
 public:
  Session(Stm& stm, std::uint32_t index);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  void begin();
  /// Returns the version chosen for this transaction, or nullptr when the
  /// transaction had to abort.
  const Data* open_read(ObjectId o);
  /// Returns this transaction's private copy, or nullptr when it aborted.
  Data* open_write(ObjectId o);
  TxOutcome commit();
  /// Gives up the running transaction.
  void abort();

  [[nodiscard]] bool active() const noexcept { return in_tx_; }
  [[nodiscard]] std::uint32_t index() const noexcept { return index_; }
  /// Index of the current (or last) transaction record.
  [[nodiscard]] std::uint32_t tx() const noexcept { return tx_; }
  [[nodiscard]] AbortCause last_cause() const noexcept { return last_cause_; }
  [[nodiscard]] const SessionStats& stats() const noexcept { return stats_; }
  [[nodiscard]] std::uint32_t last_find_head_iterations() const noexcept { return last_find_iterations_; }
  [[nodiscard]] const lsa::ValidityRange& range() const noexcept { return lsa_.range(); }

  /// Locators this session holds privately right now (audit roots).
  [[nodiscard]] std::vector<std::uint32_t> held_locators() const;

  /// Exposed for scripted tests of the head-finding step.
  std::uint32_t find_head(ObjectId o);

 private:
  friend class Stm;
  struct ReadEntry {
    std::uint32_t object;
    std::uint32_t version;
    Timestamp cts;
  };
  struct WriteEntry {
    std::uint32_t object;
    std::uint32_t locator;
  };

  std::uint32_t find_head_strict(detail::Object& obj);
  std::uint32_t find_head_literal(detail::Object& obj);
  std::vector<SlotView> protected_snapshot(ObjectId o);
  std::vector<lsa::VersionView> protected_versions(ObjectId o);
  std::optional<Timestamp> extend();
  bool self_abort(AbortCause cause);
  void finish(TxOutcome outcome);
  void drop_unpublished(std::uint32_t loc);
  void reset_link(std::uint32_t loc);
  void backoff(std::uint32_t steps);

  Stm& stm_;
  std::uint32_t index_;
  bool in_tx_ = false;
  std::uint32_t tx_ = 0;
  AbortCause last_cause_ = AbortCause::None;
  lsa::LsaState lsa_;
  std::vector<ReadEntry> reads_;
  std::vector<WriteEntry> writes_;
  SessionStats stats_;
  std::uint32_t last_find_iterations_ = 0;
  std::uint32_t ends_ = 0;
  // Audit roots; written only by the owner.
  std::atomic<std::uint32_t> held_new_{0};
  std::atomic<std::uint32_t> held_head_{0};
  std::atomic<std::uint32_t> held_old_{0};
};

/// Result of walking every locator reachable from an object's slots (and
/// optionally from sessions' private references).
struct ChainAudit {
  std::size_t reachable = 0;
  std::size_t unreclaimed = 0;
  std::size_t monotonicity_violations = 0;
  std::size_t publication_violations = 0;
};

/// Obstruction-free multi-version STM over FEB words.
class Stm {
 public:
  explicit Stm(StmConfig config);
  ~Stm();
  Stm(const Stm&) = delete;
  Stm& operator=(const Stm&) = delete;

  /// Not thread-safe; create objects before starting transactions.
  ObjectId create_object(std::uint64_t initial = 0);
  [[nodiscard]] std::size_t object_count() const noexcept { return objects_.size(); }

  Session& session(std::size_t i) { return *sessions_.at(i); }
  [[nodiscard]] const StmConfig& config() const noexcept { return config_; }
  [[nodiscard]] std::size_t threads() const noexcept { return config_.threads; }

  /// Consistent read of all slots (double collect).
  std::vector<SlotView> snapshot_slots(ObjectId o);

  /// Version views of `o` as currently known, for LSA.
  std::vector<lsa::VersionView> object_versions(ObjectId o);

  /// Tries to abort transaction `tx`; leaves a committed one alone.
  void abort_enemy(std::uint32_t tx);
  [[nodiscard]] TxStatus peek_status(std::uint32_t tx) const;

  /// Latest committed value of `o`, read without scheduling points. Only
  /// meaningful at quiescent points.
  [[nodiscard]] Data latest(ObjectId o) const;

  /// Retires displaced locators that no slot can reach any more and frees
  /// whatever the epoch domain allows.
  std::size_t collect();

  /// Audits `o`. When `include_sessions` is set, locators privately held by
  /// sessions (and their chains) count as reachable.
  [[nodiscard]] ChainAudit audit(ObjectId o, bool include_sessions = true) const;
  [[nodiscard]] std::size_t audit_live(ObjectId o) const;
  [[nodiscard]] std::size_t live_locators_max() const noexcept { return live_max_.load(); }
  [[nodiscard]] std::uint64_t status_violations() const noexcept { return status_violations_.load(); }

  [[nodiscard]] std::string dump(ObjectId o) const;
  [[nodiscard]] std::string dump_json(ObjectId o) const;

  [[nodiscard]] SessionStats total_stats() const;
  [[nodiscard]] lsa::GlobalClock& clock() noexcept { return clock_; }
  [[nodiscard]] FebStore& store() noexcept { return store_; }
  [[nodiscard]] reclaim::EpochDomain& epochs() noexcept { return epochs_; }
  [[nodiscard]] std::size_t live_versions() const noexcept { return versions_.live(); }
  [[nodiscard]] std::size_t live_transactions() const noexcept { return txs_.live(); }
  [[nodiscard]] std::size_t live_locators() const noexcept { return locators_.live(); }

 private:
  friend class Session;

  detail::Object& object(ObjectId o) const;
  detail::Object& object(std::uint32_t index) const { return object(ObjectId{index}); }

  SlotView read_slot(detail::Object& obj, std::uint32_t i);
  void write_slot(detail::Object& obj, std::uint32_t i, std::uint32_t loc, Timestamp ts);
  Timestamp load_cts(std::uint32_t tx);
  void store_cts(std::uint32_t tx, Timestamp ts);
  FebPair tfas_status(std::uint32_t tx, TxStatus s);
  TxStatus load_status(std::uint32_t tx);
  std::vector<lsa::VersionView> versions_from(const std::vector<SlotView>& snap, Timestamp c);

  std::uint32_t new_tx(std::uint32_t owner);
  std::uint32_t new_version(const Data* copy_of);
  std::uint32_t new_locator(std::uint32_t object);
  void ref_tx(std::uint32_t tx);
  void unref_tx(std::uint32_t tx);
  void ref_version(std::uint32_t v);
  void unref_version(std::uint32_t v);
  void free_locator(std::uint32_t loc);
  std::vector<std::uint32_t> reachable(const detail::Object& obj, bool include_sessions) const;

  StmConfig config_;
  FebStore store_;
  lsa::GlobalClock clock_;
  reclaim::EpochDomain epochs_;
  mutable reclaim::SlabPool<detail::Version> versions_{"version"};
  mutable reclaim::SlabPool<detail::TxRecord> txs_{"transaction"};
  mutable reclaim::SlabPool<detail::Locator> locators_{"locator"};
  std::vector<std::unique_ptr<detail::Object>> objects_;
  std::vector<std::unique_ptr<Session>> sessions_;
  std::atomic<std::size_t> live_max_{0};
  std::atomic<std::uint64_t> status_violations_{0};
};

}  // namespace nbfeb::stm
