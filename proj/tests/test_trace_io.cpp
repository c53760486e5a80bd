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

#include <doctest.h>

#include <fstream>
#include <sstream>

#include "shb/oracle.hpp"
#include "shb/trace_io.hpp"
#include "support.hpp"

using namespace shb;

TEST_CASE("parse the two-thread figure") {
  Trace t = parse("t1 r x\nt1 w y\nt2 r y\nt2 w x\n");
  REQUIRE(t.size() == 4);
  CHECK(t.thread_count() == 2);
  CHECK(t[0].kind == OpKind::Read);
  CHECK(t[3].kind == OpKind::Write);
  CHECK(t.threads().name(t[2].thread.value) == "t2");
  CHECK(t == testing::fixture("fig1.trace"));
}

TEST_CASE("empty input") {
  CHECK(parse("").empty());
  CHECK(parse("\n# only a comment\n   \n").empty());
  CHECK(serialize(Trace{}).empty());
}

TEST_CASE("parse errors carry the line") {
  try {
    parse("t1 frobnicate x");
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(std::string(err.what()) == "unknown op 'frobnicate' at line 1");
    CHECK(err.line() == 1);
  }
  CHECK_THROWS_WITH_AS(parse("t1 r x\n\nt2 w\n"), "expected 3 or 4 fields, got 2 at line 3", ParseError);
  CHECK_THROWS_WITH_AS(parse("t1 r x loc extra"), "expected 3 or 4 fields, got 5 at line 1", ParseError);
  CHECK_THROWS_WITH_AS(parse("t1 r x{y}"), "invalid identifier 'x{y}' at line 1", ParseError);
}

TEST_CASE("comments, tabs and CRLF") {
  Trace t = parse("# header\r\n\tt1\tacq\tl  \r\nt1 rel l\r\n");
  REQUIRE(t.size() == 2);
  CHECK(t[0].kind == OpKind::Acquire);
}

TEST_CASE("event line numbers") {
  std::vector<std::size_t> lines;
  parse("# c\nt1 w x\n\nt2 r x\n", &lines);
  CHECK(lines == std::vector<std::size_t>{2, 4});
}

TEST_CASE("serialize writes one event per line") {
  CHECK(serialize(testing::fixture("fig1.trace")) == "t1 r x\nt1 w y\nt2 r y\nt2 w x\n");
  Trace loc = parse("t1 w x A.java:3\nt2 r x\n");
  CHECK(serialize(loc) == "t1 w x A.java:3\nt2 r x\n");
}

TEST_CASE("round trip on fixtures and generated traces") {
  for (const char* name : {"fig1.trace", "fig2.trace", "fig3.trace", "fig4.trace", "empty.trace",
                           "fig1_locations.trace"}) {
    CAPTURE(name);
    Trace t = testing::fixture(name);
    CHECK(parse(serialize(t)) == t);
  }
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Trace t = testing::random_trace(seed, {.max_events = 80, .max_threads = 5});
    CAPTURE(seed);
    REQUIRE(parse(serialize(t)) == t);
  }
}

TEST_CASE("missing file") { CHECK_THROWS_AS(parse_file("/nonexistent/trace"), std::runtime_error); }

TEST_CASE("generator is deterministic and well formed") {
  GenParams p{.threads = 3, .events = 40, .vars = 2, .locks = 2, .fork_join = true, .seed = 5};
  CHECK(serialize(generate_random(p)) == serialize(generate_random(p)));
  p.seed = 6;
  CHECK(serialize(generate_random(p)) != serialize(generate_random(GenParams{.threads = 3, .events = 40, .vars = 2, .locks = 2, .fork_join = true, .seed = 5})));

  std::size_t ok = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    Trace t = testing::random_trace(seed, {.max_events = 40, .max_threads = 5});
    ok += validate_well_formed(t).ok() ? 1 : 0;
  }
  CHECK(ok == 10000);
}

TEST_CASE("generator honours its parameters") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    GenParams p{.threads = 3, .events = 25, .vars = 2, .locks = 1, .fork_join = seed % 2 == 1, .seed = seed};
    Trace t = generate_random(p);
    CHECK(t.size() == 25);
    CHECK(t.thread_count() <= 3);
    CHECK(t.var_count() <= 2);
    CHECK(t.lock_count() <= 1);
    // Every acquire is released by the end.
    std::size_t acq = 0, rel = 0;
    for (const Event& ev : t.events()) {
      acq += ev.kind == OpKind::Acquire;
      rel += ev.kind == OpKind::Release;
    }
    CHECK(acq == rel);
  }
  CHECK(generate_random({.threads = 2, .events = 0}).empty());
  CHECK_THROWS_AS(generate_random({.threads = 0}), std::invalid_argument);
}

TEST_CASE("a single-threaded generated trace has no schedulable race") {
  Trace t = generate_random({.threads = 1, .events = 5, .vars = 2, .locks = 1, .seed = 7});
  CHECK(t.size() == 5);
  CHECK(all_schedulable_pairs(t).empty());
}

TEST_CASE("fixed generated trace: race set equals the oracle") {
  Trace t = generate_random({.threads = 3, .events = 12, .vars = 2, .locks = 1, .seed = 42});
  CHECK(validate_well_formed(t).ok());
  CHECK(all_schedulable_pairs(t) == testing::ref_schedulable_pairs(t));
}
