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

#include <stdexcept>

#include "shb/trace.hpp"
#include "support.hpp"

using namespace shb;
using testing::e;

namespace {

Trace single(std::initializer_list<std::tuple<const char*, OpKind, const char*>> events) {
  TraceBuilder b;
  for (auto [t, k, x] : events) b.add(t, k, x);
  return std::move(b).build();
}

}  // namespace

TEST_CASE("interning follows first appearance") {
  Trace t = TraceBuilder().write("main", "b").read("worker", "a").acquire("worker", "m").build();
  CHECK(t.threads().name(0) == "main");
  CHECK(t.threads().name(1) == "worker");
  CHECK(t.vars().name(0) == "b");
  CHECK(t.vars().name(1) == "a");
  CHECK(t.lock_count() == 1);
  CHECK(t[2].lock().value == 0);
  CHECK_THROWS_AS(t[2].var(), std::logic_error);
}

TEST_CASE("fork and join events belong to both threads") {
  Trace s3 = testing::fixture("fig3.trace");
  // The projection to t4 is e8 e9 e10 e11.
  ThreadId t4{*s3.threads().find("t4")};
  CHECK(s3.projection(t4) == std::vector<std::size_t>{e(8), e(9), e(10), e(11)});
  CHECK(s3[e(8)].belongs_to(t4));
  CHECK(s3[e(11)].belongs_to(ThreadId{*s3.threads().find("t3")}));
}

TEST_CASE("validation of the figures") {
  for (const char* name : {"fig1.trace", "fig2.trace", "fig3.trace", "fig4.trace", "empty.trace"}) {
    CAPTURE(name);
    CHECK(validate_well_formed(testing::fixture(name)).ok());
  }
}

TEST_CASE("validation rules") {
  SUBCASE("reentrant acquire") {
    auto r = validate_well_formed(single({{"t1", OpKind::Acquire, "l"}, {"t1", OpKind::Acquire, "l"}}));
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].event_idx == 1);
    CHECK(r.violations[0].rule == "reentrant acquire");
  }
  SUBCASE("release without acquire") {
    auto r = validate_well_formed(single({{"t1", OpKind::Release, "l"}}));
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].event_idx == 0);
    CHECK(r.violations[0].rule == "release without acquire");
  }
  SUBCASE("lock held elsewhere") {
    auto r = validate_well_formed(single({{"t1", OpKind::Acquire, "l"}, {"t2", OpKind::Acquire, "l"}}));
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].rule == "acquire of held lock");
  }
  SUBCASE("release by another thread") {
    auto r = validate_well_formed(single({{"t1", OpKind::Acquire, "l"}, {"t2", OpKind::Release, "l"}}));
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].rule == "release by non-owner");
  }
  SUBCASE("events after join") {
    auto r = validate_well_formed(single(
        {{"t1", OpKind::Fork, "t2"}, {"t2", OpKind::Write, "x"}, {"t1", OpKind::Join, "t2"}, {"t2", OpKind::Read, "x"}}));
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].event_idx == 3);
    CHECK(r.violations[0].rule == "event after join");
  }
  SUBCASE("fork of a running thread") {
    auto r = validate_well_formed(single({{"t2", OpKind::Write, "x"}, {"t1", OpKind::Fork, "t2"}}));
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].rule == "fork of started thread");
  }
  SUBCASE("self fork and self join") {
    auto r = validate_well_formed(single({{"t1", OpKind::Fork, "t1"}, {"t1", OpKind::Join, "t1"}}));
    REQUIRE(r.violations.size() == 2);
    CHECK(r.violations[0].rule == "self fork");
    CHECK(r.violations[1].rule == "self join");
  }
  SUBCASE("join of a thread with no events") {
    auto r = validate_well_formed(single({{"t1", OpKind::Join, "ghost"}}));
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].rule == "join of unknown thread");
  }
  SUBCASE("message names the rule and event") {
    auto r = validate_well_formed(single({{"t1", OpKind::Release, "l"}}));
    CHECK(r.violations[0].message.starts_with("release without acquire at event 0"));
  }
}

TEST_CASE("lenient mode drops offending events and keeps the rest") {
  Trace t = single({{"t1", OpKind::Release, "l"}, {"t1", OpKind::Write, "x"}, {"t1", OpKind::Acquire, "l"},
                    {"t1", OpKind::Acquire, "l"}, {"t1", OpKind::Release, "l"}});
  ValidationReport dropped;
  Trace kept = drop_ill_formed(t, &dropped);
  CHECK(dropped.violations.size() == 2);
  CHECK(kept.size() == 3);
  CHECK(validate_well_formed(kept).ok());
  CHECK(kept[0].kind == OpKind::Write);
  CHECK(kept[0].idx == 0);
}

TEST_CASE("last write and last thread event on the three-thread figure") {
  Trace s3 = testing::fixture("fig3.trace");
  CHECK(last_write(s3, s3[e(7)]) == e(5));
  CHECK(last_write(s3, s3[e(12)]) == e(10));
  CHECK(last_thread_event(s3, s3[e(9)]) == e(8));
  CHECK_FALSE(last_thread_event(s3, s3[e(7)]).has_value());
  CHECK(last_thread_event(s3, s3[e(11)]) == e(10));
  CHECK_THROWS_AS(last_write(s3, s3[e(2)]), std::invalid_argument);

  Trace first_read = TraceBuilder().read("t", "x").write("t", "x").build();
  CHECK_FALSE(last_write(first_read, first_read[0]).has_value());
}

TEST_CASE("conflicting") {
  Trace t = TraceBuilder().write("t1", "x").read("t2", "x").read("t1", "x").read("t2", "y").build();
  CHECK(conflicting(t[0], t[1]));
  CHECK_FALSE(conflicting(t[1], t[2]));  // two reads
  CHECK_FALSE(conflicting(t[0], t[2]));  // same thread
  CHECK_FALSE(conflicting(t[0], t[3]));  // other variable
}

TEST_CASE("lw and ltho agree with a backwards scan") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Trace t = testing::random_trace(seed, {.max_events = 1000, .max_threads = 6, .max_vars = 5, .max_locks = 3});
    for (std::size_t i = 0; i < t.size(); ++i) {
      CAPTURE(seed);
      CAPTURE(i);
      REQUIRE(t.ltho(i) == testing::ref_ltho(t, i));
      if (t[i].kind == OpKind::Read) {
        auto w = t.lw(i);
        REQUIRE(w == testing::ref_lw(t, i));
        if (w) {
          CHECK(t[*w].kind == OpKind::Write);
          CHECK(t[*w].target == t[i].target);
          CHECK(*w < i);
        }
      }
    }
  }
}

TEST_CASE("every projection is in trace order and fork/join events appear twice") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Trace t = testing::random_trace(seed, {.max_events = 60, .allow_fork_join = true});
    std::size_t total = 0;
    for (std::size_t th = 0; th < t.thread_count(); ++th) {
      auto p = t.projection(ThreadId{static_cast<std::uint32_t>(th)});
      CHECK(std::is_sorted(p.begin(), p.end()));
      total += p.size();
    }
    std::size_t dual = 0;
    for (const Event& ev : t.events()) dual += is_thread_op(ev.kind) ? 1 : 0;
    CHECK(total == t.size() + dual);
  }
}

TEST_CASE("default location is the event index") {
  Trace t = TraceBuilder().write("t1", "x").add("t2", OpKind::Read, "x", "Main.java:12").build();
  CHECK(t.location_or_index(0) == "0");
  CHECK(t.location_or_index(1) == "Main.java:12");
}
