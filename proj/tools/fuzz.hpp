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

#ifndef SHBRACE_TOOLS_FUZZ_HPP
#define SHBRACE_TOOLS_FUZZ_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "shb/oracle.hpp"
#include "shb/trace.hpp"
#include "shb/trace_io.hpp"

namespace shbrace {

// Cross-checks every engine against each other and against the oracle.
// Returns a description of the first disagreement.
std::optional<std::string> differential_check(const shb::Trace& trace,
                                              const shb::OracleLimits& limits = {});

// Greedily removes events (and acquire/release pairs) while the trace stays
// well formed and `still_fails` keeps returning true.
shb::Trace shrink(const shb::Trace& trace, const std::function<bool(const shb::Trace&)>& still_fails);

// Parameters for the i-th fuzz case; events drawn from [0, max_events].
shb::GenParams fuzz_case_params(std::uint64_t seed, std::size_t max_events);

struct FuzzResult {
  std::size_t runs = 0;
  std::size_t passed = 0;
  std::optional<std::string> failure;
  std::optional<shb::Trace> counterexample;
};

FuzzResult fuzz(std::size_t iterations, std::size_t max_events, std::uint64_t seed,
                const shb::OracleLimits& limits = {});

}  // namespace shbrace

#endif  // SHBRACE_TOOLS_FUZZ_HPP
