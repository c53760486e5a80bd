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

#include "shb/detectors.hpp"

#include <stdexcept>

#include "shb/epoch_shb.hpp"

namespace shb {

std::string_view engine_name(Engine engine) {
  switch (engine) {
    case Engine::HB: return "hb";
    case Engine::SHB: return "shb";
    case Engine::FHB: return "fhb";
    case Engine::SHBEpoch: return "shb-epoch";
  }
  return "?";
}

std::optional<Engine> engine_from_name(std::string_view name) {
  for (Engine e : {Engine::HB, Engine::SHB, Engine::FHB, Engine::SHBEpoch}) {
    if (engine_name(e) == name) return e;
  }
  return std::nullopt;
}

std::string_view race_kind_name(RaceKind kind) {
  return kind == RaceKind::WithRead ? "with_read" : "with_write";
}

void EventStats::count(OpKind kind) {
  switch (kind) {
    case OpKind::Read: ++reads; break;
    case OpKind::Write: ++writes; break;
    case OpKind::Acquire: ++acquires; break;
    case OpKind::Release: ++releases; break;
    case OpKind::Fork: ++forks; break;
    case OpKind::Join: ++joins; break;
  }
}

DetectorState::DetectorState(Engine engine, std::size_t threads, std::size_t locks, std::size_t vars)
    : engine_(engine),
      clocks_(threads, VectorTime(threads)),
      locks_(locks, VectorTime(threads)),
      last_write_(engine == Engine::SHB ? vars : 0, VectorTime(threads)),
      reads_(vars, VectorTime(threads)),
      writes_(vars, VectorTime(threads)),
      read_clocks_(engine == Engine::FHB ? vars : 0),
      write_clocks_(engine == Engine::FHB ? vars : 0) {
  if (engine == Engine::SHBEpoch) throw std::invalid_argument("use EpochDetectorState for shb-epoch");
  for (std::size_t t = 0; t < threads; ++t) clocks_[t].set(t, 1);
}

void DetectorState::step(const Event& e, std::vector<RaceWarning>& out, VectorTime* stamp,
                         VectorTime* check) {
  const std::size_t t = e.thread.value;
  switch (e.kind) {
    case OpKind::Acquire: acquire(t, e.target); break;
    case OpKind::Release: release(t, e.target, stamp); break;
    case OpKind::Fork: fork(t, e.target, stamp); break;
    case OpKind::Join: join(t, e.target); break;
    case OpKind::Read: read(e, out, check); break;
    case OpKind::Write: write(e, out, stamp, check); break;
  }
  if (stamp && (e.kind == OpKind::Acquire || e.kind == OpKind::Join || e.kind == OpKind::Read)) {
    *stamp = clocks_[t];
  }
  // FHB closes an epoch after every access so that a forced join of an
  // access clock never claims events the access had not seen.
  if (engine_ == Engine::FHB && e.kind == OpKind::Read) clocks_[t].increment(t);
}

void DetectorState::acquire(std::size_t t, std::size_t l) { clocks_[t].join_with(locks_[l]); }

void DetectorState::release(std::size_t t, std::size_t l, VectorTime* stamp) {
  locks_[l] = clocks_[t];
  if (stamp) *stamp = clocks_[t];
  clocks_[t].increment(t);
}

void DetectorState::fork(std::size_t t, std::size_t u, VectorTime* stamp) {
  clocks_[u] = clocks_[t];
  clocks_[u].set(u, 1);
  if (stamp) *stamp = clocks_[t];
  clocks_[t].increment(t);
}

void DetectorState::join(std::size_t t, std::size_t u) { clocks_[t].join_with(clocks_[u]); }

void DetectorState::read(const Event& e, std::vector<RaceWarning>& out, VectorTime* check) {
  const std::size_t t = e.thread.value;
  const std::size_t x = e.target;
  VectorTime& c = clocks_[t];
  if (check) *check = c;
  if (!writes_[x].leq(c)) {
    out.push_back({e.idx, RaceKind::WithWrite});
    if (engine_ == Engine::FHB) force_order(c, writes_[x], write_clocks_[x]);
  }
  if (engine_ == Engine::SHB) c.join_with(last_write_[x]);
  reads_[x].set(t, c[t]);
  if (engine_ == Engine::FHB) remember(read_clocks_[x], e.thread.value, c);
}

void DetectorState::write(const Event& e, std::vector<RaceWarning>& out, VectorTime* stamp,
                          VectorTime* check) {
  const std::size_t t = e.thread.value;
  const std::size_t x = e.target;
  VectorTime& c = clocks_[t];
  if (check) *check = c;
  if (!reads_[x].leq(c)) {
    out.push_back({e.idx, RaceKind::WithRead});
    if (engine_ == Engine::FHB) force_order(c, reads_[x], read_clocks_[x]);
  }
  if (!writes_[x].leq(c)) {
    out.push_back({e.idx, RaceKind::WithWrite});
    if (engine_ == Engine::FHB) force_order(c, writes_[x], write_clocks_[x]);
  }
  if (engine_ == Engine::SHB) last_write_[x] = c;
  writes_[x].set(t, c[t]);
  if (engine_ == Engine::FHB) remember(write_clocks_[x], e.thread.value, c);
  if (stamp) *stamp = c;
  c.increment(t);
}

// Joins the clock of every access the history shows as unordered with c.
// Racing entries are picked against c before any join.
void DetectorState::force_order(VectorTime& c, const VectorTime& history, const AccessClocks& clocks) {
  VectorTime before = c;
  for (const auto& [u, clock] : clocks) {
    if (history[u] > before[u]) c.join_with(clock);
  }
}

void DetectorState::remember(AccessClocks& clocks, std::uint32_t t, const VectorTime& c) {
  for (auto& [u, clock] : clocks) {
    if (u == t) {
      clock = c;
      return;
    }
  }
  clocks.emplace_back(t, c);
}

namespace {

std::vector<RaceWarning> checked_step(DetectorState& state, Engine expected, const Event& e) {
  if (state.engine() != expected) throw std::invalid_argument("detector state runs a different engine");
  std::vector<RaceWarning> out;
  state.step(e, out);
  return out;
}

}  // namespace

std::vector<RaceWarning> shb_step(DetectorState& state, const Event& e) {
  return checked_step(state, Engine::SHB, e);
}

std::vector<RaceWarning> hb_step(DetectorState& state, const Event& e) {
  return checked_step(state, Engine::HB, e);
}

std::vector<RaceWarning> fhb_step(DetectorState& state, const Event& e) {
  return checked_step(state, Engine::FHB, e);
}

DetectorOutput run_detector(const Trace& trace, Engine engine, bool record_timestamps) {
  if (engine == Engine::SHBEpoch) return run_epoch_detector(trace, record_timestamps);

  DetectorOutput result;
  result.engine = engine;
  DetectorState state(engine, trace);
  if (record_timestamps) {
    result.timestamps.emplace(trace.size());
    if (engine == Engine::FHB) result.check_clocks.emplace(trace.size());
  }
  for (const Event& e : trace.events()) {
    result.stats.count(e.kind);
    VectorTime* stamp = record_timestamps ? &(*result.timestamps)[e.idx] : nullptr;
    VectorTime* check = result.check_clocks ? &(*result.check_clocks)[e.idx] : nullptr;
    state.step(e, result.warnings, stamp, check);
  }
  return result;
}

}  // namespace shb
