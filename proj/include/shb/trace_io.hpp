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

#ifndef SHB_TRACE_IO_HPP
#define SHB_TRACE_IO_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shb/trace.hpp"

namespace shb {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : std::runtime_error(reason + " at line " + std::to_string(line)), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Text format, one event per line:
//
//   <thread> <op> <target> [<location>]
//
// with op one of r, w, acq, rel, fork, join. Blank lines and lines whose
// first non-blank character is '#' are ignored. Identifiers match
// [A-Za-z0-9_.:$-]+. When `lines` is given it receives the 1-based source
// line of every event.
Trace parse(std::istream& in, std::vector<std::size_t>* lines = nullptr);
Trace parse(std::string_view text, std::vector<std::size_t>* lines = nullptr);
Trace parse_file(const std::string& path, std::vector<std::size_t>* lines = nullptr);

void serialize(const Trace& trace, std::ostream& out);
std::string serialize(const Trace& trace);

struct GenParams {
  std::size_t threads = 2;
  std::size_t events = 10;
  std::size_t vars = 2;
  std::size_t locks = 1;
  bool fork_join = false;
  std::uint64_t seed = 0;
};

// Random well-formed trace. Deterministic in `params`.
Trace generate_random(const GenParams& params);

}  // namespace shb

#endif  // SHB_TRACE_IO_HPP
