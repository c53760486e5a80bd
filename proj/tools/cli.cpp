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

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fuzz.hpp"
#include "shb/detectors.hpp"
#include "shb/oracle.hpp"
#include "shb/race_report.hpp"
#include "shb/trace.hpp"
#include "shb/trace_io.hpp"

namespace shbrace {

using namespace shb;

namespace {

enum class Subcommand { Analyze, Compare, Oracle, Gen };

struct CliConfig {
  Subcommand subcommand = Subcommand::Analyze;
  std::string input = "-";
  std::string engine = "shb";
  std::string report = "warnings";
  std::string format = "text";
  bool lenient = false;
  bool check = false;
  bool timing = false;
  std::optional<std::string> out_path;
  std::optional<std::size_t> max_events;
  std::size_t max_accesses = ReportOptions{}.max_accesses;
  std::size_t fuzz = 0;
  GenParams gen;
};

// Thrown once a diagnostic has already been written; carries the status.
struct CliExit {
  int status;
};

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}

  void report(std::ostream& err, const char* what) const {
    if (!enabled_) return;
    auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_);
    err << "timing: " << what << ' ' << std::fixed << std::setprecision(3) << elapsed.count() << " ms\n";
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

std::string display_name(const std::string& input) { return input == "-" ? "<stdin>" : input; }

// Parses and validates the input. Diagnostics go to `err` with source lines.
Trace load(const CliConfig& cfg, std::istream& in, std::ostream& err) {
  std::vector<std::size_t> lines;
  Trace trace;
  try {
    trace = cfg.input == "-" ? parse(in, &lines) : parse_file(cfg.input, &lines);
  } catch (const ParseError& e) {
    err << display_name(cfg.input) << ':' << e.line() << ": error: " << e.what() << '\n';
    throw CliExit{kExitError};
  }

  auto line_of = [&](std::size_t event) { return event < lines.size() ? lines[event] : 0; };
  if (cfg.lenient) {
    ValidationReport dropped;
    Trace kept = drop_ill_formed(trace, &dropped);
    for (const Violation& v : dropped.violations) {
      err << display_name(cfg.input) << ':' << line_of(v.event_idx) << ": skipped: " << v.message << '\n';
    }
    return kept;
  }
  ValidationReport report = validate_well_formed(trace);
  if (!report.ok()) {
    for (const Violation& v : report.violations) {
      err << display_name(cfg.input) << ':' << line_of(v.event_idx) << ": error: " << v.message << '\n';
    }
    throw CliExit{kExitError};
  }
  return trace;
}

std::string plural(std::size_t n, const char* noun) {
  return std::to_string(n) + ' ' + noun + (n == 1 ? "" : "s");
}

OracleLimits oracle_limits(const CliConfig& cfg) {
  OracleLimits limits;
  if (const char* env = std::getenv("SHB_ORACLE_CAP"); env && *env) {
    try {
      limits.max_events = std::stoul(env);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("SHB_ORACLE_CAP is not a number: '") + env + "'");
    }
  }
  if (cfg.max_events) limits.max_events = *cfg.max_events;
  return limits;
}

int cmd_analyze(const CliConfig& cfg, const Trace& trace, std::ostream& out, std::ostream& err) {
  Engine engine = *engine_from_name(cfg.engine);
  ReportFormat format = *report_format_from_name(cfg.format);
  ReportView view = *report_view_from_name(cfg.report);

  ReportOptions options;
  options.compute_pairs = view != ReportView::Warnings || format == ReportFormat::Json;
  options.max_accesses = cfg.max_accesses;

  Stopwatch clock(cfg.timing);
  RaceReport report = build_report(trace, engine, options);
  clock.report(err, "analyze");

  render(report, format, view, out);
  return report.warnings.empty() ? kExitOk : kExitRaces;
}

std::vector<RacePair> difference(const std::vector<RacePair>& a, const std::vector<RacePair>& b) {
  std::set<RacePair> sb(b.begin(), b.end());
  std::vector<RacePair> d;
  for (const RacePair& p : a) {
    if (!sb.contains(p)) d.push_back(p);
  }
  return d;
}

std::vector<std::size_t> warned(const std::vector<RaceWarning>& warnings) {
  std::set<std::size_t> s;
  for (const RaceWarning& w : warnings) s.insert(w.event_idx);
  return {s.begin(), s.end()};
}

int cmd_compare(const CliConfig& cfg, const Trace& trace, std::ostream& out, std::ostream& err) {
  Stopwatch clock(cfg.timing);
  ReportOptions options;
  options.max_accesses = cfg.max_accesses;
  RaceReport hb = build_report(trace, Engine::HB, options);
  RaceReport shb = build_report(trace, Engine::SHB, options);
  RaceReport fhb = build_report(trace, Engine::FHB, options);
  DetectorOutput epoch = run_detector(trace, Engine::SHBEpoch);
  clock.report(err, "compare");

  const bool epoch_agrees = epoch.warnings == shb.warnings;
  const auto hb_only = difference(hb.pairs, shb.pairs);
  const auto shb_only = difference(shb.pairs, fhb.pairs);
  const bool pairs = shb.pairs_computed && hb.pairs_computed && fhb.pairs_computed;

  if (cfg.format == "json") {
    using nlohmann::ordered_json;
    ordered_json j;
    j["events"] = trace.size();
    ordered_json engines = ordered_json::object();
    for (const RaceReport* r : {&hb, &shb, &fhb}) {
      ordered_json e;
      e["warnings"] = warned(r->warnings).size();
      if (pairs) e["pairs"] = r->pairs.size();
      engines[std::string(engine_name(r->engine))] = e;
    }
    engines["shb-epoch"] = ordered_json{{"warnings", warned(epoch.warnings).size()}};
    j["engines"] = engines;
    auto pair_list = [](const std::vector<RacePair>& ps) {
      ordered_json a = ordered_json::array();
      for (const RacePair& p : ps) a.push_back({p.first, p.second});
      return a;
    };
    if (pairs) {
      j["hb_not_shb"] = pair_list(hb_only);
      j["shb_not_fhb"] = pair_list(shb_only);
    }
    j["epoch_agrees"] = epoch_agrees;
    out << j.dump(2) << '\n';
  } else {
    out << "events: " << trace.size() << '\n';
    out << std::left << std::setw(11) << "engine" << std::setw(10) << "warnings" << "pairs\n";
    for (const RaceReport* r : {&hb, &shb, &fhb}) {
      out << std::setw(11) << engine_name(r->engine) << std::setw(10) << warned(r->warnings).size();
      if (pairs) {
        out << r->pairs.size();
      } else {
        out << '-';
      }
      out << '\n';
    }
    out << std::setw(11) << "shb-epoch" << std::setw(10) << warned(epoch.warnings).size() << "-\n";
    auto list = [&](const char* title, const std::vector<RacePair>& ps) {
      out << title << ": " << ps.size() << '\n';
      for (const RacePair& p : ps) {
        out << "  (" << p.first << ", " << p.second << ")  " << trace.location_or_index(p.first)
            << " <-> " << trace.location_or_index(p.second) << '\n';
      }
    };
    if (pairs) {
      list("hb pairs not in shb", hb_only);
      list("shb pairs not in fhb", shb_only);
    } else {
      out << "note: pair sets skipped, trace exceeds the access limit\n";
    }
    out << "shb-epoch: " << (epoch_agrees ? "agrees with shb" : "DISAGREES with shb") << '\n';
  }
  if (!epoch_agrees) {
    err << "error: shb-epoch warnings differ from shb\n";
    return kExitMismatch;
  }
  return kExitOk;
}

int cmd_oracle(const CliConfig& cfg, const Trace& trace, std::ostream& out, std::ostream& err) {
  OracleLimits limits = oracle_limits(cfg);
  std::set<RacePair> oracle;
  Stopwatch clock(cfg.timing);
  try {
    oracle = all_schedulable_pairs(trace, limits);
  } catch (const OracleCapExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  clock.report(err, "oracle");

  out << "schedulable pairs: " << oracle.size() << '\n';
  for (const RacePair& p : oracle) {
    out << "  (" << p.first << ", " << p.second << ")  " << trace.location_or_index(p.first) << " <-> "
        << trace.location_or_index(p.second) << '\n';
  }
  if (!cfg.check) return kExitOk;

  DetectorOutput shb = run_detector(trace, Engine::SHB, true);
  auto engine_list = enumerate_pairs(trace, *shb.timestamps);
  std::set<RacePair> engine(engine_list.begin(), engine_list.end());
  if (engine == oracle) {
    out << "MATCH: " << plural(oracle.size(), "pair") << '\n';
    return kExitOk;
  }
  out << "MISMATCH:";
  for (const RacePair& p : engine) {
    if (!oracle.contains(p)) out << " engine-only (" << p.first << ", " << p.second << ')';
  }
  for (const RacePair& p : oracle) {
    if (!engine.contains(p)) out << " oracle-only (" << p.first << ", " << p.second << ')';
  }
  out << '\n';
  return kExitMismatch;
}

int cmd_gen(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.fuzz == 0) {
    serialize(generate_random(cfg.gen), out);
    return kExitOk;
  }
  const std::size_t max_events = cfg.max_events.value_or(12);
  OracleLimits limits;
  limits.max_events = std::max(limits.max_events, max_events);

  Stopwatch clock(cfg.timing);
  FuzzResult result = fuzz(cfg.fuzz, max_events, cfg.gen.seed, limits);
  clock.report(err, "fuzz");
  if (!result.failure) {
    out << result.passed << '/' << cfg.fuzz << " OK\n";
    return kExitOk;
  }
  out << "FAIL after " << result.passed << '/' << cfg.fuzz << ": " << *result.failure << '\n';
  out << "shrunken counterexample (" << result.counterexample->size() << " events):\n";
  serialize(*result.counterexample, out);
  if (auto again = differential_check(*result.counterexample, limits)) out << "# " << *again << '\n';
  return kExitMismatch;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  CLI::App app{"Data race detection over recorded execution traces.", "shbrace"};
  app.require_subcommand(1, 1);

  auto add_input = [&](CLI::App* sub) {
    sub->add_option("input", cfg.input, "Trace file, or - for standard input")->required();
  };
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out_path, "Write output to this file instead of standard output");
  };
  auto add_common = [&](CLI::App* sub) {
    add_input(sub);
    add_out(sub);
    sub->add_flag("--lenient", cfg.lenient, "Skip ill-formed events instead of failing");
    sub->add_flag("--timing", cfg.timing, "Print elapsed time to standard error");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "Run one engine and report races");
  add_common(analyze);
  analyze->add_option("--engine", cfg.engine, "hb, shb, shb-epoch or fhb")
      ->check(CLI::IsMember({"hb", "shb", "shb-epoch", "fhb"}))
      ->capture_default_str();
  analyze->add_option("--report", cfg.report, "warnings, pairs or locations")
      ->check(CLI::IsMember({"warnings", "pairs", "locations"}))
      ->capture_default_str();
  analyze->add_option("--format", cfg.format, "text, json or csv")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  analyze->add_option("--max-accesses", cfg.max_accesses, "Skip pair enumeration above this many accesses")
      ->capture_default_str();

  CLI::App* compare = app.add_subcommand("compare", "Run every engine and show where they differ");
  add_common(compare);
  compare->add_option("--format", cfg.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  compare->add_option("--max-accesses", cfg.max_accesses, "Skip pair enumeration above this many accesses")
      ->capture_default_str();

  CLI::App* oracle = app.add_subcommand("oracle", "Enumerate schedulable pairs by exhaustive search");
  add_common(oracle);
  oracle->add_flag("--check", cfg.check, "Compare against the SHB engine's pairs");
  oracle->add_option("--max-events", cfg.max_events, "Event cap for the search (default 24)");

  CLI::App* gen = app.add_subcommand("gen", "Generate a random well-formed trace");
  add_out(gen);
  gen->add_option("--threads", cfg.gen.threads)->capture_default_str();
  gen->add_option("--events", cfg.gen.events)->capture_default_str();
  gen->add_option("--vars", cfg.gen.vars)->capture_default_str();
  gen->add_option("--locks", cfg.gen.locks)->capture_default_str();
  gen->add_flag("--fork-join", cfg.gen.fork_join, "Allow fork and join events");
  gen->add_option("--seed", cfg.gen.seed)->capture_default_str();
  gen->add_option("--fuzz", cfg.fuzz, "Differential-test N random traces against the oracle");
  gen->add_option("--max-events", cfg.max_events, "Upper bound on events per fuzz trace (default 12)");
  gen->add_flag("--timing", cfg.timing, "Print elapsed time to standard error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitError;
  }

  if (*analyze) cfg.subcommand = Subcommand::Analyze;
  if (*compare) cfg.subcommand = Subcommand::Compare;
  if (*oracle) cfg.subcommand = Subcommand::Oracle;
  if (*gen) cfg.subcommand = Subcommand::Gen;

  try {
    std::ofstream file;
    if (cfg.out_path) {
      file.open(*cfg.out_path);
      if (!file) {
        err << "error: cannot open '" << *cfg.out_path << "' for writing\n";
        return kExitError;
      }
    }
    std::ostream& sink = cfg.out_path ? static_cast<std::ostream&>(file) : out;

    if (cfg.subcommand == Subcommand::Gen) return cmd_gen(cfg, sink, err);

    Trace trace = load(cfg, in, err);
    switch (cfg.subcommand) {
      case Subcommand::Analyze: return cmd_analyze(cfg, trace, sink, err);
      case Subcommand::Compare: return cmd_compare(cfg, trace, sink, err);
      case Subcommand::Oracle: return cmd_oracle(cfg, trace, sink, err);
      case Subcommand::Gen: break;
    }
  } catch (const CliExit& e) {
    return e.status;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace shbrace
