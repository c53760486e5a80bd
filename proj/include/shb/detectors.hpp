/*
   Copyright 2026 The shbrace Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
 */

#ifndef SHB_DETECTORS_HPP
#define SHB_DETECTORS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "shb/trace.hpp"
#include "shb/vclock.hpp"

namespace shb {

enum class Engine { HB, SHB, FHB, SHBEpoch };

std::string_view engine_name(Engine engine);
std::optional<Engine> engine_from_name(std::string_view name);

enum class RaceKind { WithRead, WithWrite };

std::string_view race_kind_name(RaceKind kind);

struct RaceWarning {
  std::size_t event_idx = 0;
  RaceKind kind = RaceKind::WithWrite;

  bool operator==(const RaceWarning&) const = default;
  auto operator<=>(const RaceWarning&) const = default;
};

struct EventStats {
  std::size_t reads = 0, writes = 0, acquires = 0, releases = 0, forks = 0, joins = 0;

  void count(OpKind kind);
  bool operator==(const EventStats&) const = default;
};

// Timestamps assigned to events: for read, acquire and join events the
// thread clock after the handler, otherwise the thread clock before the
// local increment.
using TimestampLog = std::vector<VectorTime>;

struct DetectorOutput {
  Engine engine = Engine::SHB;
  std::vector<RaceWarning> warnings;  // sorted by event index
  std::optional<TimestampLog> timestamps;
  // FHB only: the clock each access was checked against, before any
  // force-ordering join. Empty entries for non-access events.
  std::optional<TimestampLog> check_clocks;
  EventStats stats;
};

// Streaming vector-clock state shared by the HB, SHB and FHB engines.
//
//  - SHB: the schedulable happens-before algorithm. Reads additionally join
//    the clock of the last write to the variable, and writes bump the local
//    component.
//  - HB: the same handlers without the last-write clock.
//  - FHB: Djit+-style detection that force-orders each detected race into
//    the thread clock; no last-write clock. The forced join takes the full
//    clocks of the racing accesses, not just the access-history entries, and
//    every access ends with a local increment, so forced orders stay exact.
class DetectorState {
 public:
  DetectorState(Engine engine, std::size_t threads, std::size_t locks, std::size_t vars);
  DetectorState(Engine engine, const Trace& trace)
      : DetectorState(engine, trace.thread_count(), trace.lock_count(), trace.var_count()) {}

  Engine engine() const { return engine_; }

  // Processes one event; appends warnings for it to `out`. When `stamp` is
  // non-null it receives the event's timestamp, and `check` (FHB) the clock
  // used by the race checks.
  void step(const Event& e, std::vector<RaceWarning>& out, VectorTime* stamp = nullptr,
            VectorTime* check = nullptr);

  const VectorTime& thread_clock(ThreadId t) const { return clocks_[t.value]; }
  const VectorTime& lock_clock(LockId l) const { return locks_[l.value]; }
  const VectorTime& last_write_clock(VarId x) const { return last_write_[x.value]; }
  const VectorTime& read_history(VarId x) const { return reads_[x.value]; }
  const VectorTime& write_history(VarId x) const { return writes_[x.value]; }

 private:
  void acquire(std::size_t t, std::size_t l);
  void release(std::size_t t, std::size_t l, VectorTime* stamp);
  void fork(std::size_t t, std::size_t u, VectorTime* stamp);
  void join(std::size_t t, std::size_t u);
  void read(const Event& e, std::vector<RaceWarning>& out, VectorTime* check);
  void write(const Event& e, std::vector<RaceWarning>& out, VectorTime* stamp, VectorTime* check);

  // FHB: full clock of each thread's latest access to a variable.
  using AccessClocks = std::vector<std::pair<std::uint32_t, VectorTime>>;
  static void force_order(VectorTime& c, const VectorTime& history, const AccessClocks& clocks);
  static void remember(AccessClocks& clocks, std::uint32_t t, const VectorTime& c);

  Engine engine_;
  std::vector<VectorTime> clocks_;
  std::vector<VectorTime> locks_;
  std::vector<VectorTime> last_write_;
  std::vector<VectorTime> reads_;
  std::vector<VectorTime> writes_;
  std::vector<AccessClocks> read_clocks_;
  std::vector<AccessClocks> write_clocks_;
};

std::vector<RaceWarning> shb_step(DetectorState& state, const Event& e);
std::vector<RaceWarning> hb_step(DetectorState& state, const Event& e);
std::vector<RaceWarning> fhb_step(DetectorState& state, const Event& e);

// One pass over `trace` with the given engine. Engine::SHBEpoch is routed
// to the epoch-optimized detector.
DetectorOutput run_detector(const Trace& trace, Engine engine, bool record_timestamps = false);

}  // namespace shb

#endif  // SHB_DETECTORS_HPP
