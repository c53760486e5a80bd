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

#ifndef SHB_RACE_REPORT_HPP
#define SHB_RACE_REPORT_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shb/detectors.hpp"
#include "shb/trace.hpp"

namespace shb {

// Whether (e1, e2) is a schedulable race given SHB timestamps: true iff
// e2 has no previous thread event f, or e1 is not SHB-before f. Throws if
// the events do not conflict or are out of order.
bool schedulable_pair_test(const Trace& trace, const TimestampLog& timestamps, std::size_t e1,
                           std::size_t e2);

// All schedulable pairs, sorted by second then first event.
std::vector<RacePair> enumerate_pairs(const Trace& trace, const TimestampLog& shb_timestamps);

// All conflicting pairs whose HB timestamps are unordered.
std::vector<RacePair> enumerate_pairs_hb(const Trace& trace, const TimestampLog& hb_timestamps);

// Pairs behind FHB warnings: an earlier conflicting access whose local
// clock value is not covered by the clock the later access was checked with.
std::vector<RacePair> enumerate_pairs_fhb(const Trace& trace, const TimestampLog& fhb_timestamps,
                                          const TimestampLog& fhb_check_clocks);

using LocationPair = std::pair<std::string, std::string>;

// Distinct unordered location pairs; (a, b) and (b, a) count once.
std::vector<LocationPair> location_pairs(const Trace& trace, const std::vector<RacePair>& pairs);

struct ReportOptions {
  bool compute_pairs = true;
  // Upper bound on memory accesses kept for pair enumeration. Larger traces
  // fall back to warnings only.
  std::size_t max_accesses = 100'000;
};

struct RaceReport {
  Engine engine = Engine::SHB;
  std::size_t event_count = 0;
  std::vector<RaceWarning> warnings;
  bool pairs_computed = false;
  std::vector<RacePair> pairs;
  std::vector<LocationPair> pair_locations;  // parallel to `pairs`
  std::vector<LocationPair> location_pairs;
  // Some paired event had no recorded location and is named by its index.
  bool index_locations = false;
  EventStats stats;
  std::optional<std::string> notice;
};

RaceReport build_report(const Trace& trace, Engine engine, const ReportOptions& options = {});

enum class ReportFormat { Text, Json, Csv };
enum class ReportView { Warnings, Pairs, Locations };

std::optional<ReportFormat> report_format_from_name(std::string_view name);
std::optional<ReportView> report_view_from_name(std::string_view name);

void render(const RaceReport& report, ReportFormat format, ReportView view, std::ostream& out);
std::string render(const RaceReport& report, ReportFormat format, ReportView view);

}  // namespace shb

#endif  // SHB_RACE_REPORT_HPP
