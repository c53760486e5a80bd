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

#include "support.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <random>

namespace testing {

using namespace shb;

std::string fixture_path(const std::string& name) { return std::string(SHB_FIXTURE_DIR) + "/" + name; }

Trace fixture(const std::string& name) { return parse_file(fixture_path(name)); }

std::set<RacePair> figure_pairs(std::initializer_list<std::pair<std::size_t, std::size_t>> pairs) {
  std::set<RacePair> out;
  for (auto [a, b] : pairs) out.insert({e(a), e(b)});
  return out;
}

std::set<std::size_t> warned_events(const DetectorOutput& out) {
  std::set<std::size_t> s;
  for (const RaceWarning& w : out.warnings) s.insert(w.event_idx);
  return s;
}

Trace random_trace(std::uint64_t seed, const Shape& shape) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 17);
  auto in = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  GenParams p;
  p.threads = in(1, shape.max_threads);
  p.events = in(0, shape.max_events);
  p.vars = in(1, shape.max_vars);
  p.locks = in(0, shape.max_locks);
  p.fork_join = shape.allow_fork_join && in(0, 2) == 0;
  p.seed = seed;
  return generate_random(p);
}

namespace {

bool shares_thread(const Event& a, const Event& b) {
  std::array<ThreadId, 2> ba, bb;
  for (ThreadId t : a.participants(ba)) {
    for (ThreadId u : b.participants(bb)) {
      if (t == u) return true;
    }
  }
  return false;
}

void close(Relation& r) {
  const std::size_t n = r.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = true;
}

Relation hb_edges(const Trace& trace) {
  const std::size_t n = trace.size();
  Relation r(n, std::vector<bool>(n, false));
  for (std::size_t j = 0; j < n; ++j) {
    r[j][j] = true;
    for (std::size_t i = 0; i < j; ++i) {
      if (shares_thread(trace[i], trace[j])) r[i][j] = true;
      if (trace[i].kind == OpKind::Release && trace[j].kind == OpKind::Acquire &&
          trace[i].target == trace[j].target) {
        r[i][j] = true;
      }
    }
  }
  return r;
}

}  // namespace

std::optional<std::size_t> ref_lw(const Trace& trace, std::size_t i) {
  for (std::size_t j = i; j-- > 0;) {
    if (trace[j].kind == OpKind::Write && trace[j].target == trace[i].target) return j;
  }
  return std::nullopt;
}

std::optional<std::size_t> ref_ltho(const Trace& trace, std::size_t i) {
  for (std::size_t j = i; j-- > 0;) {
    if (shares_thread(trace[j], trace[i])) return j;
  }
  return std::nullopt;
}

Relation ref_hb(const Trace& trace) {
  Relation r = hb_edges(trace);
  close(r);
  return r;
}

Relation ref_shb(const Trace& trace) {
  Relation r = hb_edges(trace);
  for (std::size_t j = 0; j < trace.size(); ++j) {
    if (trace[j].kind != OpKind::Read) continue;
    if (auto w = ref_lw(trace, j)) r[*w][j] = true;
  }
  close(r);
  return r;
}

bool ref_is_hb_respecting_correct_reordering(const Trace& trace, const Relation& hb,
                                             const std::vector<std::size_t>& seq) {
  const std::size_t n = trace.size();
  std::vector<long> pos(n, -1);
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (seq[k] >= n || pos[seq[k]] != -1) return false;
    pos[seq[k]] = static_cast<long>(k);
  }

  // Thread projections are prefixes of the original ones.
  for (std::size_t t = 0; t < trace.thread_count(); ++t) {
    ThreadId tid{static_cast<std::uint32_t>(t)};
    std::vector<std::size_t> orig, mine;
    for (std::size_t i = 0; i < n; ++i)
      if (trace[i].belongs_to(tid)) orig.push_back(i);
    for (std::size_t i : seq)
      if (trace[i].belongs_to(tid)) mine.push_back(i);
    if (mine.size() > orig.size() || !std::equal(mine.begin(), mine.end(), orig.begin())) return false;
  }

  // Lock semantics.
  std::vector<std::optional<std::uint32_t>> holder(trace.lock_count());
  for (std::size_t i : seq) {
    const Event& ev = trace[i];
    if (ev.kind == OpKind::Acquire) {
      if (holder[ev.target]) return false;
      holder[ev.target] = ev.thread.value;
    } else if (ev.kind == OpKind::Release) {
      if (holder[ev.target] != ev.thread.value) return false;
      holder[ev.target].reset();
    }
  }

  // Reads that are not last in their thread keep their last write.
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const Event& ev = trace[seq[k]];
    if (ev.kind != OpKind::Read) continue;
    bool last = true;
    for (std::size_t m = k + 1; m < seq.size(); ++m)
      if (trace[seq[m]].belongs_to(ev.thread)) last = false;
    if (last) continue;
    std::optional<std::size_t> here;
    for (std::size_t m = k; m-- > 0;) {
      if (trace[seq[m]].kind == OpKind::Write && trace[seq[m]].target == ev.target) {
        here = seq[m];
        break;
      }
    }
    if (here != ref_lw(trace, seq[k])) return false;
  }

  // HB-respecting: downward closed, no flipped pair.
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b || !hb[a][b] || pos[b] == -1) continue;
      if (pos[a] == -1 || pos[a] > pos[b]) return false;
    }
  }
  return true;
}

std::set<RacePair> ref_schedulable_pairs(const Trace& trace) {
  const std::size_t n = trace.size();
  const Relation hb = ref_hb(trace);
  std::set<RacePair> found;
  std::vector<std::size_t> seq;
  std::vector<bool> used(n, false);

  std::function<void()> explore = [&]() {
    if (seq.size() >= 2) {
      std::size_t a = seq[seq.size() - 2], b = seq.back();
      if (conflicting(trace[a], trace[b]) && ref_is_hb_respecting_correct_reordering(trace, hb, seq)) {
        found.insert({std::min(a, b), std::max(a, b)});
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      bool ok = true;
      for (std::size_t j = 0; j < n && ok; ++j) {
        if (j != i && hb[j][i] && !used[j]) ok = false;
      }
      if (!ok) continue;
      seq.push_back(i);
      used[i] = true;
      // Only extend sequences that are still valid as a whole; a broken
      // prefix cannot be repaired by appending.
      if (ref_is_hb_respecting_correct_reordering(trace, hb, seq)) explore();
      used[i] = false;
      seq.pop_back();
    }
  };
  explore();
  return found;
}

}  // namespace testing
