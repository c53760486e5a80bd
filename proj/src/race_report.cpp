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

#include "shb/race_report.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace shb {

namespace {

// Visits every conflicting (earlier, later) pair once, walking per-variable
// read and write lists so read-read pairs are never touched.
template <class Fn>
void for_each_conflicting_pair(const Trace& trace, Fn&& fn) {
  std::vector<std::vector<std::size_t>> reads(trace.var_count()), writes(trace.var_count());
  for (const Event& e : trace.events()) {
    if (!is_access(e.kind)) continue;
    const std::size_t x = e.target;
    for (std::size_t w : writes[x]) {
      if (trace[w].thread != e.thread) fn(w, e.idx);
    }
    if (e.kind == OpKind::Write) {
      for (std::size_t r : reads[x]) {
        if (trace[r].thread != e.thread) fn(r, e.idx);
      }
      writes[x].push_back(e.idx);
    } else {
      reads[x].push_back(e.idx);
    }
  }
}

void sort_pairs(std::vector<RacePair>& pairs) {
  std::sort(pairs.begin(), pairs.end(), [](const RacePair& a, const RacePair& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
}

void require_timestamps(const Trace& trace, const TimestampLog& log) {
  if (log.size() != trace.size()) throw std::invalid_argument("timestamp log does not match trace");
}

}  // namespace

bool schedulable_pair_test(const Trace& trace, const TimestampLog& timestamps, std::size_t e1,
                           std::size_t e2) {
  require_timestamps(trace, timestamps);
  if (e1 >= e2 || e2 >= trace.size()) throw std::invalid_argument("pair must satisfy e1 < e2");
  if (!conflicting(trace[e1], trace[e2])) throw std::invalid_argument("events do not conflict");
  auto f = trace.ltho(e2);
  if (!f) return true;
  return !(e1 <= *f && vt_leq(timestamps[e1], timestamps[*f]));
}

std::vector<RacePair> enumerate_pairs(const Trace& trace, const TimestampLog& shb_timestamps) {
  require_timestamps(trace, shb_timestamps);
  std::vector<RacePair> out;
  for_each_conflicting_pair(trace, [&](std::size_t e1, std::size_t e2) {
    auto f = trace.ltho(e2);
    if (!f || !(e1 <= *f && vt_leq(shb_timestamps[e1], shb_timestamps[*f]))) out.push_back({e1, e2});
  });
  sort_pairs(out);
  return out;
}

std::vector<RacePair> enumerate_pairs_hb(const Trace& trace, const TimestampLog& hb_timestamps) {
  require_timestamps(trace, hb_timestamps);
  std::vector<RacePair> out;
  for_each_conflicting_pair(trace, [&](std::size_t e1, std::size_t e2) {
    if (!vt_leq(hb_timestamps[e1], hb_timestamps[e2])) out.push_back({e1, e2});
  });
  sort_pairs(out);
  return out;
}

std::vector<RacePair> enumerate_pairs_fhb(const Trace& trace, const TimestampLog& fhb_timestamps,
                                          const TimestampLog& fhb_check_clocks) {
  require_timestamps(trace, fhb_timestamps);
  require_timestamps(trace, fhb_check_clocks);
  std::vector<RacePair> out;
  for_each_conflicting_pair(trace, [&](std::size_t e1, std::size_t e2) {
    const std::size_t t1 = trace[e1].thread.value;
    if (fhb_timestamps[e1][t1] > fhb_check_clocks[e2][t1]) out.push_back({e1, e2});
  });
  sort_pairs(out);
  return out;
}

std::vector<LocationPair> location_pairs(const Trace& trace, const std::vector<RacePair>& pairs) {
  std::set<LocationPair> distinct;
  for (const RacePair& p : pairs) {
    std::string a = trace.location_or_index(p.first);
    std::string b = trace.location_or_index(p.second);
    if (b < a) std::swap(a, b);
    distinct.emplace(std::move(a), std::move(b));
  }
  return {distinct.begin(), distinct.end()};
}

RaceReport build_report(const Trace& trace, Engine engine, const ReportOptions& options) {
  RaceReport report;
  report.engine = engine;
  report.event_count = trace.size();

  bool want_pairs = options.compute_pairs;
  if (want_pairs) {
    std::size_t accesses = 0;
    for (const Event& e : trace.events()) accesses += is_access(e.kind);
    if (accesses > options.max_accesses) {
      want_pairs = false;
      report.notice = "trace has " + std::to_string(accesses) + " accesses, above the pair limit of " +
                      std::to_string(options.max_accesses) + "; reporting warnings only";
    }
  }

  DetectorOutput out = run_detector(trace, engine, want_pairs);
  report.warnings = std::move(out.warnings);
  report.stats = out.stats;
  if (!want_pairs) return report;

  switch (engine) {
    case Engine::SHB:
    case Engine::SHBEpoch:
      report.pairs = enumerate_pairs(trace, *out.timestamps);
      break;
    case Engine::HB:
      report.pairs = enumerate_pairs_hb(trace, *out.timestamps);
      break;
    case Engine::FHB:
      report.pairs = enumerate_pairs_fhb(trace, *out.timestamps, *out.check_clocks);
      break;
  }
  report.pairs_computed = true;
  for (const RacePair& p : report.pairs) {
    if (!trace[p.first].has_location() || !trace[p.second].has_location()) report.index_locations = true;
    report.pair_locations.emplace_back(trace.location_or_index(p.first),
                                       trace.location_or_index(p.second));
  }
  report.location_pairs = location_pairs(trace, report.pairs);
  return report;
}

std::optional<ReportFormat> report_format_from_name(std::string_view name) {
  if (name == "text") return ReportFormat::Text;
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  return std::nullopt;
}

std::optional<ReportView> report_view_from_name(std::string_view name) {
  if (name == "warnings") return ReportView::Warnings;
  if (name == "pairs") return ReportView::Pairs;
  if (name == "locations") return ReportView::Locations;
  return std::nullopt;
}

namespace {

void render_json(const RaceReport& r, std::ostream& out) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["engine"] = engine_name(r.engine);
  j["event_count"] = r.event_count;
  j["warnings"] = ordered_json::array();
  for (const RaceWarning& w : r.warnings) {
    j["warnings"].push_back({{"event", w.event_idx}, {"kind", race_kind_name(w.kind)}});
  }
  j["pairs"] = ordered_json::array();
  for (const RacePair& p : r.pairs) j["pairs"].push_back({p.first, p.second});
  j["location_pairs"] = ordered_json::array();
  for (const auto& [a, b] : r.location_pairs) j["location_pairs"].push_back({a, b});
  j["stats"] = {{"reads", r.stats.reads},     {"writes", r.stats.writes},
                {"acquires", r.stats.acquires}, {"releases", r.stats.releases},
                {"forks", r.stats.forks},       {"joins", r.stats.joins}};
  j["counts"] = {{"warnings", r.warnings.size()},
                 {"pairs", r.pairs.size()},
                 {"location_pairs", r.location_pairs.size()}};
  j["pairs_computed"] = r.pairs_computed;
  j["index_locations"] = r.index_locations;
  if (r.notice) j["notice"] = *r.notice;
  out << j.dump(2) << '\n';
}

void render_csv(const RaceReport& r, ReportView view, std::ostream& out) {
  switch (view) {
    case ReportView::Warnings:
      out << "event,kind\n";
      for (const RaceWarning& w : r.warnings) out << w.event_idx << ',' << race_kind_name(w.kind) << '\n';
      break;
    case ReportView::Pairs:
      out << "e1,e2,loc1,loc2\n";
      for (std::size_t i = 0; i < r.pairs.size(); ++i) {
        out << r.pairs[i].first << ',' << r.pairs[i].second << ',' << r.pair_locations[i].first << ','
            << r.pair_locations[i].second << '\n';
      }
      break;
    case ReportView::Locations:
      out << "loc1,loc2\n";
      for (const auto& [a, b] : r.location_pairs) out << a << ',' << b << '\n';
      break;
  }
}

void render_text(const RaceReport& r, ReportView view, std::ostream& out) {
  out << "engine: " << engine_name(r.engine) << "\n";
  out << "events: " << r.event_count << "\n";
  out << "warnings: " << r.warnings.size() << "\n";
  if (view == ReportView::Warnings) {
    for (const RaceWarning& w : r.warnings) {
      out << "  event " << w.event_idx << " race " << race_kind_name(w.kind) << "\n";
    }
  }
  if (r.pairs_computed) {
    out << "pairs: " << r.pairs.size() << "\n";
    if (view == ReportView::Pairs) {
      for (std::size_t i = 0; i < r.pairs.size(); ++i) {
        out << "  (" << r.pairs[i].first << ", " << r.pairs[i].second << ")  "
            << r.pair_locations[i].first << " <-> " << r.pair_locations[i].second << "\n";
      }
    }
    out << "location pairs: " << r.location_pairs.size() << "\n";
    if (view == ReportView::Locations) {
      for (const auto& [a, b] : r.location_pairs) out << "  " << a << " <-> " << b << "\n";
    }
  }
  if (r.index_locations && view != ReportView::Warnings) {
    out << "note: events without a source location are named by their index\n";
  }
  if (r.notice) out << "note: " << *r.notice << "\n";
}

}  // namespace

void render(const RaceReport& report, ReportFormat format, ReportView view, std::ostream& out) {
  switch (format) {
    case ReportFormat::Json: return render_json(report, out);
    case ReportFormat::Csv: return render_csv(report, view, out);
    case ReportFormat::Text: return render_text(report, view, out);
  }
}

std::string render(const RaceReport& report, ReportFormat format, ReportView view) {
  std::ostringstream out;
  render(report, format, view, out);
  return out.str();
}

}  // namespace shb
