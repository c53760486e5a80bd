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

#include "shb/trace_io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

namespace shb {

namespace {

bool is_ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '.' || c == ':' || c == '$' || c == '-';
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

void check_identifier(std::string_view id, std::size_t line_no) {
  if (id.empty()) throw ParseError(line_no, "empty identifier");
  if (!std::all_of(id.begin(), id.end(), is_ident_char)) {
    throw ParseError(line_no, "invalid identifier '" + std::string(id) + "'");
  }
}

}  // namespace

Trace parse(std::istream& in, std::vector<std::size_t>* lines) {
  TraceBuilder builder;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    auto fields = split_fields(view);
    if (fields.empty() || fields.front().front() == '#') continue;

    if (fields.size() >= 2 && !op_from_mnemonic(fields[1])) {
      throw ParseError(line_no, "unknown op '" + std::string(fields[1]) + "'");
    }
    if (fields.size() < 3 || fields.size() > 4) {
      throw ParseError(line_no, "expected 3 or 4 fields, got " + std::to_string(fields.size()));
    }
    for (auto f : fields) check_identifier(f, line_no);

    std::optional<std::string> location;
    if (fields.size() == 4) location = std::string(fields[3]);
    builder.add(fields[0], *op_from_mnemonic(fields[1]), fields[2], std::move(location));
    if (lines) lines->push_back(line_no);
  }
  return std::move(builder).build();
}

Trace parse(std::string_view text, std::vector<std::size_t>* lines) {
  std::istringstream in{std::string(text)};
  return parse(in, lines);
}

Trace parse_file(const std::string& path, std::vector<std::size_t>* lines) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file '" + path + "'");
  return parse(in, lines);
}

void serialize(const Trace& trace, std::ostream& out) {
  for (const Event& e : trace.events()) {
    const SymbolTable& ns =
        is_access(e.kind) ? trace.vars() : is_lock_op(e.kind) ? trace.locks() : trace.threads();
    out << trace.threads().name(e.thread.value) << ' ' << op_mnemonic(e.kind) << ' '
        << ns.name(e.target);
    if (auto loc = trace.location(e)) out << ' ' << *loc;
    out << '\n';
  }
}

std::string serialize(const Trace& trace) {
  std::ostringstream out;
  serialize(trace, out);
  return out.str();
}

namespace {

// Scheduler-style generator: picks a runnable thread and an action that
// keeps the trace well formed, reserving enough budget to release every
// held lock before the trace ends.
class RandomTraceGenerator {
 public:
  explicit RandomTraceGenerator(const GenParams& p) : p_(p), rng_(p.seed) {
    for (std::size_t t = 0; t < p_.threads; ++t) thread_names_.push_back("t" + std::to_string(t));
    for (std::size_t x = 0; x < p_.vars; ++x) var_names_.push_back("x" + std::to_string(x));
    for (std::size_t l = 0; l < p_.locks; ++l) lock_names_.push_back("l" + std::to_string(l));
    state_.assign(p_.threads, p_.fork_join ? State::Unforked : State::Running);
    if (!state_.empty()) state_[0] = State::Running;
    held_.resize(p_.threads);
    holder_.assign(p_.locks, kNone);
  }

  Trace run() {
    if (p_.threads == 0 || p_.vars == 0) throw std::invalid_argument("GenParams needs threads >= 1 and vars >= 1");
    while (builder_.size() < p_.events) step();
    return std::move(builder_).build();
  }

 private:
  enum class State { Unforked, Running, Joined };
  static constexpr std::size_t kNone = SIZE_MAX;

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::size_t total_held() const {
    std::size_t n = 0;
    for (const auto& h : held_) n += h.size();
    return n;
  }

  void emit(std::size_t t, OpKind kind, const std::string& target) {
    builder_.add(thread_names_[t], kind, target);
  }

  void release_top(std::size_t t) {
    std::size_t l = held_[t].back();
    held_[t].pop_back();
    holder_[l] = kNone;
    emit(t, OpKind::Release, lock_names_[l]);
  }

  void step() {
    std::size_t remaining = p_.events - builder_.size();
    std::vector<std::size_t> runnable;
    for (std::size_t t = 0; t < p_.threads; ++t) {
      if (state_[t] == State::Running) runnable.push_back(t);
    }

    // Only releases fit in the remaining budget.
    if (remaining <= total_held()) {
      for (std::size_t t : runnable) {
        if (!held_[t].empty()) return release_top(t);
      }
    }

    std::size_t t = runnable[pick(runnable.size())];
    if (chance(0.7)) {
      OpKind kind = chance(0.5) ? OpKind::Read : OpKind::Write;
      return emit(t, kind, var_names_[pick(p_.vars)]);
    }

    std::vector<int> options;  // 0 acquire, 1 release, 2 fork, 3 join
    std::vector<std::size_t> free_locks;
    for (std::size_t l = 0; l < p_.locks; ++l) {
      if (holder_[l] == kNone) free_locks.push_back(l);
    }
    if (!free_locks.empty() && remaining >= total_held() + 2 && held_[t].size() < 2) options.push_back(0);
    if (!held_[t].empty()) options.push_back(1);

    std::vector<std::size_t> forkable, joinable;
    if (p_.fork_join) {
      for (std::size_t u = 0; u < p_.threads; ++u) {
        if (u == t) continue;
        if (state_[u] == State::Unforked) forkable.push_back(u);
        if (state_[u] == State::Running && held_[u].empty() && u != 0) joinable.push_back(u);
      }
      if (!forkable.empty()) options.push_back(2);
      if (!joinable.empty() && chance(0.3)) options.push_back(3);
    }

    if (options.empty()) {
      OpKind kind = chance(0.5) ? OpKind::Read : OpKind::Write;
      return emit(t, kind, var_names_[pick(p_.vars)]);
    }

    switch (options[pick(options.size())]) {
      case 0: {
        std::size_t l = free_locks[pick(free_locks.size())];
        holder_[l] = t;
        held_[t].push_back(l);
        return emit(t, OpKind::Acquire, lock_names_[l]);
      }
      case 1:
        return release_top(t);
      case 2: {
        std::size_t u = forkable[pick(forkable.size())];
        state_[u] = State::Running;
        return emit(t, OpKind::Fork, thread_names_[u]);
      }
      default: {
        std::size_t u = joinable[pick(joinable.size())];
        state_[u] = State::Joined;
        return emit(t, OpKind::Join, thread_names_[u]);
      }
    }
  }

  GenParams p_;
  std::mt19937_64 rng_;
  TraceBuilder builder_;
  std::vector<std::string> thread_names_, var_names_, lock_names_;
  std::vector<State> state_;
  std::vector<std::vector<std::size_t>> held_;
  std::vector<std::size_t> holder_;
};

}  // namespace

Trace generate_random(const GenParams& params) { return RandomTraceGenerator(params).run(); }

}  // namespace shb
