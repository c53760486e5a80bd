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

#ifndef SHB_TRACE_HPP
#define SHB_TRACE_HPP

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace shb {

// Dense index into one identifier namespace. The tag keeps thread, lock
// and variable indices from being mixed up.
template <class Tag>
struct Id {
  std::uint32_t value = 0;

  constexpr auto operator<=>(const Id&) const = default;
};

struct ThreadTag {};
struct LockTag {};
struct VarTag {};

using ThreadId = Id<ThreadTag>;
using LockId = Id<LockTag>;
using VarId = Id<VarTag>;

enum class OpKind : std::uint8_t { Read, Write, Acquire, Release, Fork, Join };

std::string_view op_mnemonic(OpKind kind);
std::optional<OpKind> op_from_mnemonic(std::string_view text);

inline bool is_access(OpKind k) { return k == OpKind::Read || k == OpKind::Write; }
inline bool is_lock_op(OpKind k) { return k == OpKind::Acquire || k == OpKind::Release; }
inline bool is_thread_op(OpKind k) { return k == OpKind::Fork || k == OpKind::Join; }

struct Event {
  std::size_t idx = 0;
  ThreadId thread;
  OpKind kind = OpKind::Read;
  // Raw index into the namespace selected by `kind`; use the typed accessors.
  std::uint32_t target = 0;
  // Index into the trace's location table, or kNoLocation.
  std::uint32_t location = kNoLocation;

  static constexpr std::uint32_t kNoLocation = UINT32_MAX;
  bool has_location() const { return location != kNoLocation; }

  VarId var() const;
  LockId lock() const;
  ThreadId target_thread() const;

  // Threads whose projection contains this event. Fork and join events
  // belong to both the performing and the target thread.
  std::span<const ThreadId> participants(std::array<ThreadId, 2>& buf) const;
  bool belongs_to(ThreadId t) const {
    return thread == t || (is_thread_op(kind) && target_thread() == t);
  }

  bool operator==(const Event&) const = default;
};

// Interns identifiers in first-appearance order.
class SymbolTable {
 public:
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t index) const { return names_.at(index); }
  std::size_t size() const { return names_.size(); }

  bool operator==(const SymbolTable& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

class Trace;

// Incrementally assembles a Trace. Names are interned on first use.
class TraceBuilder {
 public:
  TraceBuilder() = default;
  // Starts from existing registries so that indices are preserved.
  TraceBuilder(SymbolTable threads, SymbolTable locks, SymbolTable vars);

  TraceBuilder& add(std::string_view thread, OpKind kind, std::string_view target,
                    std::optional<std::string> location = std::nullopt);
  TraceBuilder& add(ThreadId thread, OpKind kind, std::uint32_t target,
                    std::optional<std::string> location = std::nullopt);

  TraceBuilder& read(std::string_view t, std::string_view x) { return add(t, OpKind::Read, x); }
  TraceBuilder& write(std::string_view t, std::string_view x) { return add(t, OpKind::Write, x); }
  TraceBuilder& acquire(std::string_view t, std::string_view l) { return add(t, OpKind::Acquire, l); }
  TraceBuilder& release(std::string_view t, std::string_view l) { return add(t, OpKind::Release, l); }
  TraceBuilder& fork(std::string_view t, std::string_view u) { return add(t, OpKind::Fork, u); }
  TraceBuilder& join(std::string_view t, std::string_view u) { return add(t, OpKind::Join, u); }

  std::size_t size() const { return events_.size(); }
  Trace build() &&;
  // Copies; lets chained calls end in build().
  Trace build() const&;

 private:
  std::vector<Event> events_;
  SymbolTable threads_;
  SymbolTable locks_;
  SymbolTable vars_;
  SymbolTable locations_;
};

// An immutable event sequence with its identifier registries and the
// last-write / last-thread-event tables.
class Trace {
 public:
  Trace() = default;

  std::span<const Event> events() const { return events_; }
  const Event& operator[](std::size_t i) const { return events_[i]; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  const SymbolTable& threads() const { return threads_; }
  const SymbolTable& locks() const { return locks_; }
  const SymbolTable& vars() const { return vars_; }
  std::size_t thread_count() const { return threads_.size(); }
  std::size_t lock_count() const { return locks_.size(); }
  std::size_t var_count() const { return vars_.size(); }

  // Index of the latest write to the same variable strictly before read `i`.
  std::optional<std::size_t> lw(std::size_t i) const { return lw_[i]; }
  // Index of the latest earlier event sharing a thread with event `i`.
  std::optional<std::size_t> ltho(std::size_t i) const { return ltho_[i]; }

  // Events of thread t (fork/join targeting t included), in trace order.
  std::vector<std::size_t> projection(ThreadId t) const;

  std::string describe(const Event& e) const;

  // Recorded source location of an event, if any.
  std::optional<std::string> location(const Event& e) const;
  // Source location, or the decimal event index when none was recorded.
  std::string location_or_index(std::size_t i) const;

  bool operator==(const Trace& other) const {
    return events_ == other.events_ && threads_ == other.threads_ && locks_ == other.locks_ &&
           vars_ == other.vars_ && locations_ == other.locations_;
  }

 private:
  friend class TraceBuilder;
  Trace(std::vector<Event> events, SymbolTable threads, SymbolTable locks, SymbolTable vars,
        SymbolTable locations);

  std::vector<Event> events_;
  SymbolTable threads_;
  SymbolTable locks_;
  SymbolTable vars_;
  SymbolTable locations_;
  std::vector<std::optional<std::size_t>> lw_;
  std::vector<std::optional<std::size_t>> ltho_;
};

struct Violation {
  std::size_t event_idx = 0;
  std::string rule;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Streaming well-formedness check. Rejected events do not change the
// checker state, so the accepted events always form a well-formed trace.
class WellFormednessChecker {
 public:
  explicit WellFormednessChecker(const Trace& trace);

  std::optional<Violation> admit(const Event& e);

 private:
  enum class ThreadState : std::uint8_t { Unseen, Running, Joined };
  static constexpr std::uint32_t kFree = UINT32_MAX;

  const Trace* trace_;
  std::vector<ThreadState> thread_state_;
  std::vector<std::uint32_t> lock_holder_;
};

ValidationReport validate_well_formed(const Trace& trace);

// Drops every event the checker rejects; `dropped` receives the reasons.
Trace drop_ill_formed(const Trace& trace, ValidationReport* dropped = nullptr);

std::optional<std::size_t> last_write(const Trace& trace, const Event& e);
std::optional<std::size_t> last_thread_event(const Trace& trace, const Event& e);

bool conflicting(const Event& a, const Event& b);

// Two event indices, first < second.
struct RacePair {
  std::size_t first = 0;
  std::size_t second = 0;

  auto operator<=>(const RacePair&) const = default;
};

}  // namespace shb

#endif  // SHB_TRACE_HPP
