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

#ifndef SHB_ORACLE_HPP
#define SHB_ORACLE_HPP

// Reference semantics for small traces. Everything here is brute force:
// explicit partial-order closures and an exhaustive search over
// reorderings. It exists to certify the streaming engines, not to scale.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "shb/trace.hpp"

namespace shb {

class OracleCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleLimits {
  std::size_t max_events = 24;
  std::size_t max_threads = 5;

  // Hard ceiling imposed by the 64-bit event sets used in the search.
  static constexpr std::size_t kAbsoluteMaxEvents = 64;
};

void check_oracle_limits(const Trace& trace, const OracleLimits& limits);

class PartialOrderMatrix {
 public:
  enum class Flavor { HB, SHB };

  PartialOrderMatrix(Flavor flavor, std::size_t n) : flavor_(flavor), n_(n), below_(n, 0) {}

  Flavor flavor() const { return flavor_; }
  std::size_t size() const { return n_; }

  // a <= b in the order (reflexive).
  bool leq(std::size_t a, std::size_t b) const { return (below_[b] >> a) & 1u; }
  bool unordered(std::size_t a, std::size_t b) const { return !leq(a, b) && !leq(b, a); }
  // All a with a <= b, as a bit set (includes b).
  std::uint64_t down_set(std::size_t b) const { return below_[b]; }

 private:
  friend PartialOrderMatrix hb_closure(const Trace&, const OracleLimits&);
  friend PartialOrderMatrix shb_closure(const Trace&, const OracleLimits&);

  Flavor flavor_;
  std::size_t n_;
  std::vector<std::uint64_t> below_;
};

// Smallest partial order containing thread order (fork/join events belong
// to both threads) and every release -> later acquire edge on the same lock.
PartialOrderMatrix hb_closure(const Trace& trace, const OracleLimits& limits = {});

// hb_closure plus last-write -> read edges, transitively closed.
PartialOrderMatrix shb_closure(const Trace& trace, const OracleLimits& limits = {});

struct SearchOptions {
  // Cut branches in which some event the pair still needs belongs to a
  // thread that can no longer take events.
  bool prune = true;
};

struct ScheduleResult {
  bool schedulable = false;
  // A complete reordering ending with the two events, when schedulable.
  std::vector<std::size_t> witness;
  std::size_t states_explored = 0;
};

// Exhaustive search for a correct reordering that respects HB and ends
// with e1 and e2 adjacent. Requires conflicting(e1, e2).
ScheduleResult find_schedule(const Trace& trace, std::size_t e1, std::size_t e2,
                             const OracleLimits& limits = {}, SearchOptions options = {});

bool is_schedulable_pair(const Trace& trace, std::size_t e1, std::size_t e2,
                         const OracleLimits& limits = {});

// Every conflicting pair that is schedulable. Explores the reachable
// reordering prefixes once and checks all pairs against that frontier.
std::set<RacePair> all_schedulable_pairs(const Trace& trace, const OracleLimits& limits = {});

// The HB-race whose second event comes first, ties broken by the latest
// first event.
std::optional<RacePair> first_hb_race(const Trace& trace, const OracleLimits& limits = {});

// Independent re-check that `sequence` is a correct reordering of `trace`
// that respects HB. Returns a description of the first problem found.
std::optional<std::string> check_reordering(const Trace& trace, const PartialOrderMatrix& hb,
                                            const std::vector<std::size_t>& sequence);

}  // namespace shb

#endif  // SHB_ORACLE_HPP
