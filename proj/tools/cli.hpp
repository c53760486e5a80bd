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

#ifndef SHBRACE_TOOLS_CLI_HPP
#define SHBRACE_TOOLS_CLI_HPP

#include <iosfwd>

namespace shbrace {

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;     // bad usage, unreadable or invalid input, oracle cap
inline constexpr int kExitRaces = 2;     // analyze found at least one warning
inline constexpr int kExitMismatch = 3;  // a cross-check disagreed

// Entry point of the shbrace tool. Input "-" reads from `in`; --out
// redirects the primary output to a file.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace shbrace

#endif  // SHBRACE_TOOLS_CLI_HPP
