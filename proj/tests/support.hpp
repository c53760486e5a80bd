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

// Shared helpers for the test binaries. The ref_* functions are deliberately
// naive re-derivations from the definitions; they share no code with the
// library beyond the Trace container.

#ifndef SHBRACE_TESTS_SUPPORT_HPP
#define SHBRACE_TESTS_SUPPORT_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "shb/detectors.hpp"
#include "shb/trace.hpp"
#include "shb/trace_io.hpp"

namespace testing {

std::string fixture_path(const std::string& name);
shb::Trace fixture(const std::string& name);

// Event e_k in 1-based figure numbering.
constexpr std::size_t e(std::size_t k) { return k - 1; }

// Pairs written with 1-based figure numbering.
std::set<shb::RacePair> figure_pairs(std::initializer_list<std::pair<std::size_t, std::size_t>> pairs);

std::set<std::size_t> warned_events(const shb::DetectorOutput& out);

// Random well-formed trace for seed `seed`, with shape parameters drawn in
// the given ranges.
struct Shape {
  std::size_t max_events = 14;
  std::size_t max_threads = 4;
  std::size_t max_vars = 3;
  std::size_t max_locks = 2;
  bool allow_fork_join = true;
};
shb::Trace random_trace(std::uint64_t seed, const Shape& shape = {});

// Reference last write / last thread event by backwards scan.
std::optional<std::size_t> ref_lw(const shb::Trace& trace, std::size_t i);
std::optional<std::size_t> ref_ltho(const shb::Trace& trace, std::size_t i);

// Reflexive relation as a dense boolean matrix: rel[a][b] means a <= b.
using Relation = std::vector<std::vector<bool>>;

// Orders built from explicit generating edges and closed by Floyd-Warshall.
Relation ref_hb(const shb::Trace& trace);
Relation ref_shb(const shb::Trace& trace);

// Whether `seq` is a correct reordering of `trace` that respects `hb`.
bool ref_is_hb_respecting_correct_reordering(const shb::Trace& trace, const Relation& hb,
                                             const std::vector<std::size_t>& seq);

// Schedulable pairs by enumerating every event sequence that can be a
// prefix of a correct reordering. Exponential; keep traces at ~9 events.
std::set<shb::RacePair> ref_schedulable_pairs(const shb::Trace& trace);

}  // namespace testing

#endif  // SHBRACE_TESTS_SUPPORT_HPP
