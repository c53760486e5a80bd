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

#include "shb/trace.hpp"

#include <utility>

namespace shb {

namespace {

constexpr std::array<std::string_view, 6> kMnemonics = {"r", "w", "acq", "rel", "fork", "join"};

}  // namespace

std::string_view op_mnemonic(OpKind kind) { return kMnemonics[static_cast<std::size_t>(kind)]; }

std::optional<OpKind> op_from_mnemonic(std::string_view text) {
  for (std::size_t i = 0; i < kMnemonics.size(); ++i) {
    if (kMnemonics[i] == text) return static_cast<OpKind>(i);
  }
  return std::nullopt;
}

VarId Event::var() const {
  if (!is_access(kind)) throw std::logic_error("event is not a memory access");
  return VarId{target};
}

LockId Event::lock() const {
  if (!is_lock_op(kind)) throw std::logic_error("event is not a lock operation");
  return LockId{target};
}

ThreadId Event::target_thread() const {
  if (!is_thread_op(kind)) throw std::logic_error("event is not a fork or join");
  return ThreadId{target};
}

std::span<const ThreadId> Event::participants(std::array<ThreadId, 2>& buf) const {
  buf[0] = thread;
  if (is_thread_op(kind) && ThreadId{target} != thread) {
    buf[1] = ThreadId{target};
    return {buf.data(), 2};
  }
  return {buf.data(), 1};
}

std::uint32_t SymbolTable::intern(std::string_view name) {
  if (auto it = index_.find(std::string(name)); it != index_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), id);
  return id;
}

std::optional<std::uint32_t> SymbolTable::find(std::string_view name) const {
  if (auto it = index_.find(std::string(name)); it != index_.end()) return it->second;
  return std::nullopt;
}

TraceBuilder::TraceBuilder(SymbolTable threads, SymbolTable locks, SymbolTable vars)
    : threads_(std::move(threads)), locks_(std::move(locks)), vars_(std::move(vars)) {}

TraceBuilder& TraceBuilder::add(std::string_view thread, OpKind kind, std::string_view target,
                                std::optional<std::string> location) {
  ThreadId t{threads_.intern(thread)};
  std::uint32_t target_index = 0;
  if (is_access(kind)) {
    target_index = vars_.intern(target);
  } else if (is_lock_op(kind)) {
    target_index = locks_.intern(target);
  } else {
    target_index = threads_.intern(target);
  }
  return add(t, kind, target_index, std::move(location));
}

TraceBuilder& TraceBuilder::add(ThreadId thread, OpKind kind, std::uint32_t target,
                                std::optional<std::string> location) {
  const SymbolTable& ns = is_access(kind) ? vars_ : is_lock_op(kind) ? locks_ : threads_;
  if (thread.value >= threads_.size() || target >= ns.size()) {
    throw std::out_of_range("identifier index not registered");
  }
  std::uint32_t loc = location ? locations_.intern(*location) : Event::kNoLocation;
  events_.push_back(Event{events_.size(), thread, kind, target, loc});
  return *this;
}

Trace TraceBuilder::build() && {
  return Trace(std::move(events_), std::move(threads_), std::move(locks_), std::move(vars_),
               std::move(locations_));
}

Trace TraceBuilder::build() const& { return Trace(events_, threads_, locks_, vars_, locations_); }

Trace::Trace(std::vector<Event> events, SymbolTable threads, SymbolTable locks, SymbolTable vars,
             SymbolTable locations)
    : events_(std::move(events)),
      threads_(std::move(threads)),
      locks_(std::move(locks)),
      vars_(std::move(vars)),
      locations_(std::move(locations)),
      lw_(events_.size()),
      ltho_(events_.size()) {
  std::vector<std::optional<std::size_t>> last_write_to(vars_.size());
  std::vector<std::optional<std::size_t>> last_of_thread(threads_.size());
  std::array<ThreadId, 2> buf;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const Event& e = events_[i];
    if (e.kind == OpKind::Read) lw_[i] = last_write_to[e.target];
    if (e.kind == OpKind::Write) last_write_to[e.target] = i;

    for (ThreadId t : e.participants(buf)) {
      auto prev = last_of_thread[t.value];
      if (prev && (!ltho_[i] || *prev > *ltho_[i])) ltho_[i] = prev;
      last_of_thread[t.value] = i;
    }
  }
}

std::vector<std::size_t> Trace::projection(ThreadId t) const {
  std::vector<std::size_t> out;
  for (const Event& e : events_) {
    if (e.belongs_to(t)) out.push_back(e.idx);
  }
  return out;
}

std::string Trace::describe(const Event& e) const {
  const SymbolTable& ns = is_access(e.kind) ? vars_ : is_lock_op(e.kind) ? locks_ : threads_;
  std::string out = "e" + std::to_string(e.idx) + " <" + threads_.name(e.thread.value) + ", ";
  out += op_mnemonic(e.kind);
  out += "(" + ns.name(e.target) + ")>";
  return out;
}

WellFormednessChecker::WellFormednessChecker(const Trace& trace)
    : trace_(&trace),
      thread_state_(trace.thread_count(), ThreadState::Unseen),
      lock_holder_(trace.lock_count(), kFree) {}

std::optional<Violation> WellFormednessChecker::admit(const Event& e) {
  auto reject = [&](std::string rule, std::string detail) {
    return Violation{e.idx, rule, rule + " at event " + std::to_string(e.idx) + ": " + detail};
  };
  const std::string& who = trace_->threads().name(e.thread.value);

  if (thread_state_[e.thread.value] == ThreadState::Joined) {
    return reject("event after join", "thread " + who + " was already joined");
  }

  switch (e.kind) {
    case OpKind::Acquire: {
      std::uint32_t holder = lock_holder_[e.target];
      const std::string& lock = trace_->locks().name(e.target);
      if (holder == e.thread.value) return reject("reentrant acquire", who + " already holds " + lock);
      if (holder != kFree) {
        return reject("acquire of held lock",
                      lock + " is held by " + trace_->threads().name(holder));
      }
      lock_holder_[e.target] = e.thread.value;
      break;
    }
    case OpKind::Release: {
      std::uint32_t holder = lock_holder_[e.target];
      const std::string& lock = trace_->locks().name(e.target);
      if (holder == kFree) return reject("release without acquire", lock + " is not held");
      if (holder != e.thread.value) {
        return reject("release by non-owner", lock + " is held by " + trace_->threads().name(holder));
      }
      lock_holder_[e.target] = kFree;
      break;
    }
    case OpKind::Fork: {
      if (e.target == e.thread.value) return reject("self fork", who + " forks itself");
      if (thread_state_[e.target] != ThreadState::Unseen) {
        return reject("fork of started thread",
                      trace_->threads().name(e.target) + " already has events or was forked");
      }
      thread_state_[e.target] = ThreadState::Running;
      break;
    }
    case OpKind::Join: {
      if (e.target == e.thread.value) return reject("self join", who + " joins itself");
      const std::string& child = trace_->threads().name(e.target);
      if (thread_state_[e.target] == ThreadState::Joined) {
        return reject("event after join", child + " was already joined");
      }
      if (thread_state_[e.target] == ThreadState::Unseen) {
        return reject("join of unknown thread", child + " has no events and was never forked");
      }
      thread_state_[e.target] = ThreadState::Joined;
      break;
    }
    case OpKind::Read:
    case OpKind::Write:
      break;
  }
  thread_state_[e.thread.value] = ThreadState::Running;
  return std::nullopt;
}

ValidationReport validate_well_formed(const Trace& trace) {
  ValidationReport report;
  WellFormednessChecker checker(trace);
  for (const Event& e : trace.events()) {
    if (auto v = checker.admit(e)) report.violations.push_back(std::move(*v));
  }
  return report;
}

Trace drop_ill_formed(const Trace& trace, ValidationReport* dropped) {
  TraceBuilder builder(trace.threads(), trace.locks(), trace.vars());
  WellFormednessChecker checker(trace);
  for (const Event& e : trace.events()) {
    if (auto v = checker.admit(e)) {
      if (dropped) dropped->violations.push_back(std::move(*v));
      continue;
    }
    builder.add(e.thread, e.kind, e.target, trace.location(e));
  }
  return std::move(builder).build();
}

std::optional<std::string> Trace::location(const Event& e) const {
  if (!e.has_location()) return std::nullopt;
  return locations_.name(e.location);
}

std::string Trace::location_or_index(std::size_t i) const {
  const Event& e = events_[i];
  return e.has_location() ? locations_.name(e.location) : std::to_string(i);
}

std::optional<std::size_t> last_write(const Trace& trace, const Event& e) {
  if (e.kind != OpKind::Read) throw std::invalid_argument("last_write expects a read event");
  return trace.lw(e.idx);
}

std::optional<std::size_t> last_thread_event(const Trace& trace, const Event& e) {
  return trace.ltho(e.idx);
}

bool conflicting(const Event& a, const Event& b) {
  return is_access(a.kind) && is_access(b.kind) && a.target == b.target && a.thread != b.thread &&
         (a.kind == OpKind::Write || b.kind == OpKind::Write);
}

}  // namespace shb
