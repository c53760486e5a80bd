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

#include "shb/epoch_shb.hpp"

#include <stdexcept>

namespace shb {

namespace {

// bottom[mine/t][theirs/u], updates applied left to right.
VectorTime inflate(std::size_t t, Counter mine, const Epoch& theirs) {
  VectorTime v;
  v.set(t, mine);
  v.set(theirs.thread, theirs.clock);
  return v;
}

}  // namespace

EpochDetectorState::EpochDetectorState(std::size_t threads, std::size_t locks, std::size_t vars)
    : clocks_(threads, VectorTime(threads)),
      locks_(locks, VectorTime(threads)),
      last_write_(vars, VectorTime(threads)),
      last_write_epoch_(vars, Epoch{0, 0}),
      reads_(vars, AdaptiveTime(Epoch{0, 0})),
      writes_(vars, AdaptiveTime(Epoch{0, 0})) {
  for (std::size_t t = 0; t < threads; ++t) clocks_[t].set(t, 1);
}

void EpochDetectorState::step(const Event& e, std::vector<RaceWarning>& out, VectorTime* stamp) {
  const std::size_t t = e.thread.value;
  VectorTime& c = clocks_[t];
  switch (e.kind) {
    case OpKind::Acquire:
      c.join_with(locks_[e.target]);
      break;
    case OpKind::Release:
      locks_[e.target] = c;
      if (stamp) *stamp = c;
      c.increment(t);
      break;
    case OpKind::Fork:
      clocks_[e.target] = c;
      clocks_[e.target].set(e.target, 1);
      if (stamp) *stamp = c;
      c.increment(t);
      break;
    case OpKind::Join:
      c.join_with(clocks_[e.target]);
      break;
    case OpKind::Read:
      read(e, out);
      break;
    case OpKind::Write:
      write(e, out, stamp);
      break;
  }
  if (stamp && (e.kind == OpKind::Acquire || e.kind == OpKind::Join || e.kind == OpKind::Read)) {
    *stamp = c;
  }
}

void EpochDetectorState::read(const Event& e, std::vector<RaceWarning>& out) {
  const std::size_t t = e.thread.value;
  const std::size_t x = e.target;
  VectorTime& c = clocks_[t];
  if (!adaptive_leq(writes_[x], c)) out.push_back({e.idx, RaceKind::WithWrite});
  // Clocks leave a thread only at the event ending its local epoch, so
  // knowing the last write's epoch means already holding its whole clock.
  if (!epoch_leq(last_write_epoch_[x], c)) c.join_with(last_write_[x]);

  AdaptiveTime& r = reads_[x];
  if (r.is_epoch()) {
    const Epoch prev = r.epoch();
    if (prev.clock <= c[prev.thread]) {
      r = Epoch{c[t], t};
    } else {
      r = inflate(t, c[t], prev);
    }
  } else {
    r.vector().set(t, c[t]);
  }
}

void EpochDetectorState::write(const Event& e, std::vector<RaceWarning>& out, VectorTime* stamp) {
  const std::size_t t = e.thread.value;
  const std::size_t x = e.target;
  VectorTime& c = clocks_[t];
  if (!adaptive_leq(reads_[x], c)) out.push_back({e.idx, RaceKind::WithRead});

  AdaptiveTime& w = writes_[x];
  if (adaptive_leq(w, c)) {
    w = Epoch{c[t], t};
  } else {
    out.push_back({e.idx, RaceKind::WithWrite});
    if (w.is_epoch()) {
      w = inflate(t, c[t], w.epoch());
    } else {
      w.vector().set(t, c[t]);
    }
  }
  last_write_[x] = c;
  last_write_epoch_[x] = Epoch{c[t], t};
  // No-op after either branch: an epoch here is already C_t(t)@t.
  w.set_component(t, c[t]);
  if (stamp) *stamp = c;
  c.increment(t);
}

std::vector<RaceWarning> epoch_read(EpochDetectorState& state, const Event& e) {
  if (e.kind != OpKind::Read) throw std::invalid_argument("epoch_read expects a read event");
  std::vector<RaceWarning> out;
  state.read(e, out);
  return out;
}

std::vector<RaceWarning> epoch_write(EpochDetectorState& state, const Event& e) {
  if (e.kind != OpKind::Write) throw std::invalid_argument("epoch_write expects a write event");
  std::vector<RaceWarning> out;
  state.write(e, out);
  return out;
}

DetectorOutput run_epoch_detector(const Trace& trace, bool record_timestamps) {
  DetectorOutput result;
  result.engine = Engine::SHBEpoch;
  EpochDetectorState state(trace);
  if (record_timestamps) result.timestamps.emplace(trace.size());
  for (const Event& e : trace.events()) {
    result.stats.count(e.kind);
    VectorTime* stamp = record_timestamps ? &(*result.timestamps)[e.idx] : nullptr;
    state.step(e, result.warnings, stamp);
  }
  return result;
}

}  // namespace shb
