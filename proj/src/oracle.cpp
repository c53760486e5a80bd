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

#include "shb/oracle.hpp"

#include <algorithm>
#include <bit>
#include <unordered_set>

namespace shb {

void check_oracle_limits(const Trace& trace, const OracleLimits& limits) {
  const std::size_t max_events = std::min(limits.max_events, OracleLimits::kAbsoluteMaxEvents);
  if (trace.size() > max_events) {
    throw OracleCapExceeded("trace has " + std::to_string(trace.size()) +
                            " events; oracle cap is " + std::to_string(max_events));
  }
  if (trace.thread_count() > std::min<std::size_t>(limits.max_threads, 64)) {
    throw OracleCapExceeded("trace has " + std::to_string(trace.thread_count()) +
                            " threads; oracle cap is " + std::to_string(limits.max_threads));
  }
}

namespace {

constexpr std::uint64_t bit(std::size_t i) { return std::uint64_t{1} << i; }

// Immediate predecessors of each event under HB's generating edges.
std::vector<std::vector<std::size_t>> hb_edges(const Trace& trace) {
  const std::size_t n = trace.size();
  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<std::optional<std::size_t>> last_of_thread(trace.thread_count());
  std::vector<std::vector<std::size_t>> releases(trace.lock_count());
  std::array<ThreadId, 2> buf;
  for (std::size_t i = 0; i < n; ++i) {
    const Event& e = trace[i];
    for (ThreadId t : e.participants(buf)) {
      if (last_of_thread[t.value]) preds[i].push_back(*last_of_thread[t.value]);
      last_of_thread[t.value] = i;
    }
    if (e.kind == OpKind::Acquire) {
      for (std::size_t r : releases[e.target]) preds[i].push_back(r);
    }
    if (e.kind == OpKind::Release) releases[e.target].push_back(i);
  }
  return preds;
}

}  // namespace

PartialOrderMatrix hb_closure(const Trace& trace, const OracleLimits& limits) {
  check_oracle_limits(trace, limits);
  PartialOrderMatrix m(PartialOrderMatrix::Flavor::HB, trace.size());
  auto preds = hb_edges(trace);
  // Edges only point forward in the trace, so one pass closes the relation.
  for (std::size_t i = 0; i < trace.size(); ++i) {
    m.below_[i] = bit(i);
    for (std::size_t p : preds[i]) m.below_[i] |= m.below_[p];
  }
  return m;
}

PartialOrderMatrix shb_closure(const Trace& trace, const OracleLimits& limits) {
  check_oracle_limits(trace, limits);
  PartialOrderMatrix m(PartialOrderMatrix::Flavor::SHB, trace.size());
  auto preds = hb_edges(trace);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (auto w = trace.lw(i)) preds[i].push_back(*w);
    m.below_[i] = bit(i);
    for (std::size_t p : preds[i]) m.below_[i] |= m.below_[p];
  }
  return m;
}

namespace {

// Shared machinery for exploring HB-respecting correct-reordering prefixes.
// A state is the set of events placed so far, the last write placed for each
// variable, and the threads that may take no further events because one of
// their reads observed a different last write than in the original trace.
class ReorderSpace {
 public:
  struct State {
    std::uint64_t placed = 0;
    std::uint64_t blocked = 0;  // bit per thread
    std::vector<std::uint8_t> last_write;  // event index + 1, 0 for none

    std::string key() const {
      std::string k(reinterpret_cast<const char*>(&placed), sizeof placed);
      k.append(reinterpret_cast<const char*>(&blocked), sizeof blocked);
      k.append(last_write.begin(), last_write.end());
      return k;
    }
  };

  explicit ReorderSpace(const Trace& trace) : trace_(trace), hb_(hb_closure(trace, unlimited())) {
    const std::size_t n = trace.size();
    strict_preds_.resize(n);
    thread_bits_.resize(n);
    matching_release_.assign(n, std::nullopt);
    std::array<ThreadId, 2> buf;
    for (std::size_t i = 0; i < n; ++i) {
      strict_preds_[i] = hb_.down_set(i) & ~bit(i);
      for (ThreadId t : trace[i].participants(buf)) thread_bits_[i] |= bit(t.value);
      if (trace[i].kind == OpKind::Acquire) {
        for (std::size_t j = i + 1; j < n; ++j) {
          if (trace[j].kind == OpKind::Release && trace[j].target == trace[i].target) {
            matching_release_[i] = j;
            break;
          }
        }
        acquires_.push_back(i);
      }
    }
  }

  State initial() const { return State{0, 0, std::vector<std::uint8_t>(trace_.var_count(), 0)}; }

  // Whether e may be placed next in a prefix (not necessarily as the pair).
  bool can_place(const State& s, std::size_t e) const {
    if (s.placed & bit(e)) return false;
    if ((strict_preds_[e] & ~s.placed) != 0) return false;
    if (s.blocked & thread_bits_[e]) return false;
    if (trace_[e].kind == OpKind::Acquire && lock_held(s, trace_[e].target)) return false;
    return true;
  }

  // Whether e may be one of the final two events appended after s.
  bool can_finish_with(const State& s, std::size_t e) const {
    return !(s.placed & bit(e)) && (strict_preds_[e] & ~s.placed) == 0 &&
           !(s.blocked & thread_bits_[e]);
  }

  State place(const State& s, std::size_t e) const {
    State next = s;
    next.placed |= bit(e);
    const Event& ev = trace_[e];
    if (ev.kind == OpKind::Read) {
      auto original = trace_.lw(e);
      std::uint8_t expected = original ? static_cast<std::uint8_t>(*original + 1) : 0;
      if (s.last_write[ev.target] != expected) next.blocked |= bit(ev.thread.value);
    } else if (ev.kind == OpKind::Write) {
      next.last_write[ev.target] = static_cast<std::uint8_t>(e + 1);
    }
    return next;
  }

  const PartialOrderMatrix& hb() const { return hb_; }
  std::uint64_t strict_preds(std::size_t e) const { return strict_preds_[e]; }
  std::uint64_t thread_bits(std::size_t e) const { return thread_bits_[e]; }

 private:
  static OracleLimits unlimited() {
    return OracleLimits{OracleLimits::kAbsoluteMaxEvents, SIZE_MAX};
  }

  bool lock_held(const State& s, std::size_t lock) const {
    for (std::size_t a : acquires_) {
      if (trace_[a].target != lock || !(s.placed & bit(a))) continue;
      if (!matching_release_[a] || !(s.placed & bit(*matching_release_[a]))) return true;
    }
    return false;
  }

  const Trace& trace_;
  PartialOrderMatrix hb_;
  std::vector<std::uint64_t> strict_preds_;
  std::vector<std::uint64_t> thread_bits_;
  std::vector<std::optional<std::size_t>> matching_release_;
  std::vector<std::size_t> acquires_;
};

void require_conflicting(const Trace& trace, std::size_t e1, std::size_t e2) {
  if (e1 >= trace.size() || e2 >= trace.size() || e1 >= e2) {
    throw std::invalid_argument("pair must satisfy e1 < e2 < trace size");
  }
  if (!conflicting(trace[e1], trace[e2])) throw std::invalid_argument("events do not conflict");
}

}  // namespace

ScheduleResult find_schedule(const Trace& trace, std::size_t e1, std::size_t e2,
                             const OracleLimits& limits, SearchOptions options) {
  check_oracle_limits(trace, limits);
  require_conflicting(trace, e1, e2);

  ReorderSpace space(trace);
  const std::size_t n = trace.size();
  // Anything HB-after e1 or e2 would have to follow them.
  std::uint64_t forbidden = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (space.hb().leq(e1, i) || space.hb().leq(e2, i)) forbidden |= bit(i);
  }
  const std::uint64_t needed = space.strict_preds(e1) | space.strict_preds(e2) | bit(e1) | bit(e2);

  ScheduleResult result;
  std::unordered_set<std::string> visited;
  std::vector<std::size_t> path;

  auto dead_end = [&](const ReorderSpace::State& s) {
    std::uint64_t missing = needed & ~s.placed;
    while (missing) {
      std::size_t e = static_cast<std::size_t>(std::countr_zero(missing));
      missing &= missing - 1;
      if (s.blocked & space.thread_bits(e)) return true;
    }
    return false;
  };

  auto dfs = [&](auto&& self, const ReorderSpace::State& s) -> bool {
    if (!visited.insert(s.key()).second) return false;
    ++result.states_explored;
    if (space.can_finish_with(s, e1) && space.can_finish_with(s, e2)) {
      result.witness = path;
      result.witness.push_back(e1);
      result.witness.push_back(e2);
      return true;
    }
    if (options.prune && dead_end(s)) return false;
    for (std::size_t e = 0; e < n; ++e) {
      if ((forbidden & bit(e)) || !space.can_place(s, e)) continue;
      path.push_back(e);
      if (self(self, space.place(s, e))) return true;
      path.pop_back();
    }
    return false;
  };

  result.schedulable = dfs(dfs, space.initial());
  return result;
}

bool is_schedulable_pair(const Trace& trace, std::size_t e1, std::size_t e2, const OracleLimits& limits) {
  return find_schedule(trace, e1, e2, limits).schedulable;
}

std::set<RacePair> all_schedulable_pairs(const Trace& trace, const OracleLimits& limits) {
  check_oracle_limits(trace, limits);
  const std::size_t n = trace.size();

  std::vector<RacePair> candidates;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (conflicting(trace[i], trace[j])) candidates.push_back({i, j});
    }
  }
  std::set<RacePair> found;
  if (candidates.empty()) return found;

  ReorderSpace space(trace);
  std::unordered_set<std::string> visited;
  std::vector<ReorderSpace::State> stack{space.initial()};
  visited.insert(stack.back().key());
  while (!stack.empty() && found.size() < candidates.size()) {
    ReorderSpace::State s = std::move(stack.back());
    stack.pop_back();

    std::uint64_t ready = 0;
    for (std::size_t e = 0; e < n; ++e) {
      if (is_access(trace[e].kind) && space.can_finish_with(s, e)) ready |= bit(e);
    }
    for (const RacePair& p : candidates) {
      if ((ready & bit(p.first)) && (ready & bit(p.second))) found.insert(p);
    }
    for (std::size_t e = 0; e < n; ++e) {
      if (!space.can_place(s, e)) continue;
      ReorderSpace::State next = space.place(s, e);
      if (visited.insert(next.key()).second) stack.push_back(std::move(next));
    }
  }
  return found;
}

std::optional<RacePair> first_hb_race(const Trace& trace, const OracleLimits& limits) {
  PartialOrderMatrix hb = hb_closure(trace, limits);
  for (std::size_t j = 0; j < trace.size(); ++j) {
    for (std::size_t i = j; i-- > 0;) {
      if (conflicting(trace[i], trace[j]) && !hb.leq(i, j)) return RacePair{i, j};
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_reordering(const Trace& trace, const PartialOrderMatrix& hb,
                                            const std::vector<std::size_t>& sequence) {
  const std::size_t n = trace.size();
  std::vector<std::optional<std::size_t>> position(n);
  for (std::size_t k = 0; k < sequence.size(); ++k) {
    std::size_t e = sequence[k];
    if (e >= n) return "event index out of range";
    if (position[e]) return "event " + std::to_string(e) + " appears twice";
    position[e] = k;
  }

  // Each thread projection is a prefix of the original projection.
  for (std::size_t t = 0; t < trace.thread_count(); ++t) {
    auto original = trace.projection(ThreadId{static_cast<std::uint32_t>(t)});
    std::vector<std::size_t> reordered;
    for (std::size_t e : sequence) {
      if (trace[e].belongs_to(ThreadId{static_cast<std::uint32_t>(t)})) reordered.push_back(e);
    }
    if (reordered.size() > original.size() ||
        !std::equal(reordered.begin(), reordered.end(), original.begin())) {
      return "projection to thread " + trace.threads().name(t) + " is not a prefix";
    }
  }

  // Lock semantics.
  std::vector<std::optional<std::uint32_t>> holder(trace.lock_count());
  for (std::size_t e : sequence) {
    const Event& ev = trace[e];
    if (ev.kind == OpKind::Acquire) {
      if (holder[ev.target]) return "lock acquired while held at event " + std::to_string(e);
      holder[ev.target] = ev.thread.value;
    } else if (ev.kind == OpKind::Release) {
      if (holder[ev.target] != ev.thread.value) return "bad release at event " + std::to_string(e);
      holder[ev.target].reset();
    }
  }

  // Reads that are not last in their thread see the same last write.
  std::vector<std::optional<std::size_t>> last_write(trace.var_count());
  for (std::size_t k = 0; k < sequence.size(); ++k) {
    const Event& ev = trace[sequence[k]];
    if (ev.kind == OpKind::Write) last_write[ev.target] = ev.idx;
    if (ev.kind != OpKind::Read) continue;
    bool last_in_thread = true;
    for (std::size_t m = k + 1; m < sequence.size(); ++m) {
      if (trace[sequence[m]].belongs_to(ev.thread)) {
        last_in_thread = false;
        break;
      }
    }
    if (!last_in_thread && last_write[ev.target] != trace.lw(ev.idx)) {
      return "read " + std::to_string(ev.idx) + " observes a different last write";
    }
  }

  // HB-respecting: downward closed, order preserved.
  for (std::size_t e2 = 0; e2 < n; ++e2) {
    if (!position[e2]) continue;
    for (std::size_t e1 = 0; e1 < n; ++e1) {
      if (e1 == e2 || !hb.leq(e1, e2)) continue;
      if (!position[e1] || *position[e1] > *position[e2]) {
        return "HB edge " + std::to_string(e1) + " -> " + std::to_string(e2) + " not respected";
      }
    }
  }
  return std::nullopt;
}

}  // namespace shb
