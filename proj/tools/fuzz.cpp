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

#include "fuzz.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "shb/detectors.hpp"
#include "shb/race_report.hpp"

namespace shbrace {

using namespace shb;

namespace {

std::set<std::size_t> warned_events(const DetectorOutput& out) {
  std::set<std::size_t> s;
  for (const RaceWarning& w : out.warnings) s.insert(w.event_idx);
  return s;
}

std::string format_pairs(const std::set<RacePair>& pairs) {
  std::ostringstream out;
  out << '{';
  bool first = true;
  for (const RacePair& p : pairs) {
    out << (first ? "" : ", ") << '(' << p.first << ',' << p.second << ')';
    first = false;
  }
  out << '}';
  return out.str();
}

// Rebuilds `trace` without the events in `drop`, re-interning names so that
// unused identifiers disappear.
Trace without(const Trace& trace, const std::vector<std::size_t>& drop) {
  TraceBuilder builder;
  for (const Event& e : trace.events()) {
    if (std::find(drop.begin(), drop.end(), e.idx) != drop.end()) continue;
    const SymbolTable& ns =
        is_access(e.kind) ? trace.vars() : is_lock_op(e.kind) ? trace.locks() : trace.threads();
    builder.add(trace.threads().name(e.thread.value), e.kind, ns.name(e.target), trace.location(e));
  }
  return std::move(builder).build();
}

}  // namespace

std::optional<std::string> differential_check(const Trace& trace, const OracleLimits& limits) {
  DetectorOutput shb = run_detector(trace, Engine::SHB, true);
  DetectorOutput hb = run_detector(trace, Engine::HB, true);
  DetectorOutput fhb = run_detector(trace, Engine::FHB, true);
  DetectorOutput epoch = run_detector(trace, Engine::SHBEpoch);

  if (epoch.warnings != shb.warnings) return "shb-epoch warnings differ from shb";

  auto shb_events = warned_events(shb);
  auto hb_events = warned_events(hb);
  auto fhb_events = warned_events(fhb);
  if (!std::includes(shb_events.begin(), shb_events.end(), fhb_events.begin(), fhb_events.end())) {
    return "fhb warns at an event shb does not";
  }
  if (!std::includes(hb_events.begin(), hb_events.end(), shb_events.begin(), shb_events.end())) {
    return "shb warns at an event hb does not";
  }

  auto shb_list = enumerate_pairs(trace, *shb.timestamps);
  auto hb_list = enumerate_pairs_hb(trace, *hb.timestamps);
  std::set<RacePair> shb_pairs(shb_list.begin(), shb_list.end());
  std::set<RacePair> hb_pairs(hb_list.begin(), hb_list.end());
  if (!std::includes(hb_pairs.begin(), hb_pairs.end(), shb_pairs.begin(), shb_pairs.end())) {
    return "shb pairs not contained in hb pairs";
  }
  std::set<std::size_t> pair_seconds;
  for (const RacePair& p : shb_pairs) pair_seconds.insert(p.second);
  if (pair_seconds != shb_events) return "shb warning events differ from pair second events";

  auto oracle_pairs = all_schedulable_pairs(trace, limits);
  if (oracle_pairs != shb_pairs) {
    return "pair mismatch: engine " + format_pairs(shb_pairs) + " oracle " + format_pairs(oracle_pairs);
  }
  for (const RacePair& p : enumerate_pairs_fhb(trace, *fhb.timestamps, *fhb.check_clocks)) {
    if (!oracle_pairs.contains(p)) {
      return "fhb pair (" + std::to_string(p.first) + "," + std::to_string(p.second) + ") is not schedulable";
    }
  }
  if (auto first = first_hb_race(trace, limits); first && !oracle_pairs.contains(*first)) {
    return "first HB-race (" + std::to_string(first->first) + "," + std::to_string(first->second) +
           ") is not schedulable";
  }
  return std::nullopt;
}

Trace shrink(const Trace& trace, const std::function<bool(const Trace&)>& still_fails) {
  Trace current = trace;
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t i = current.size(); i-- > 0;) {
      std::vector<std::vector<std::size_t>> attempts{{i}};
      if (current[i].kind == OpKind::Acquire) {
        for (std::size_t j = i + 1; j < current.size(); ++j) {
          if (current[j].kind == OpKind::Release && current[j].target == current[i].target) {
            attempts.push_back({i, j});
            break;
          }
        }
      }
      for (const auto& drop : attempts) {
        Trace candidate = without(current, drop);
        if (!validate_well_formed(candidate).ok() || !still_fails(candidate)) continue;
        current = std::move(candidate);
        progress = true;
        break;
      }
      if (progress) break;
    }
  }
  return current;
}

GenParams fuzz_case_params(std::uint64_t seed, std::size_t max_events) {
  std::mt19937_64 rng(seed);
  auto in = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  GenParams p;
  p.threads = in(1, 4);
  p.events = in(0, max_events);
  p.vars = in(1, 3);
  p.locks = in(0, 2);
  p.fork_join = in(0, 1) == 1;
  p.seed = seed;
  return p;
}

FuzzResult fuzz(std::size_t iterations, std::size_t max_events, std::uint64_t seed,
                const OracleLimits& limits) {
  FuzzResult result;
  for (std::size_t i = 0; i < iterations; ++i) {
    Trace trace = generate_random(fuzz_case_params(seed + i, max_events));
    ++result.runs;
    auto failure = differential_check(trace, limits);
    if (!failure) {
      ++result.passed;
      continue;
    }
    result.failure = "seed " + std::to_string(seed + i) + ": " + *failure;
    result.counterexample = shrink(trace, [&](const Trace& t) {
      return differential_check(t, limits).has_value();
    });
    break;
  }
  return result;
}

}  // namespace shbrace
