#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gmrf/marks.hpp"
#include "gmrf/philox.hpp"

using namespace gmrf;

TEST_CASE("philox known-answer vectors") {
  const auto a = philox4x32_10({0, 0, 0, 0}, {0, 0});
  CHECK(a[0] == 0x6627e8d5u);
  CHECK(a[1] == 0xe169c58du);
  CHECK(a[2] == 0xbc57ac4cu);
  CHECK(a[3] == 0x9b00dbd8u);
  const auto b = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  CHECK(b[0] == 0x408f276du);
  CHECK(b[1] == 0x41c83b0eu);
  CHECK(b[2] == 0xa20bc7c6u);
  CHECK(b[3] == 0x6d5451fdu);
  const auto c = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  CHECK(c[0] == 0xd16cfe09u);
  CHECK(c[1] == 0x94fdccebu);
  CHECK(c[2] == 0x5001e420u);
  CHECK(c[3] == 0x24126ea1u);
}

TEST_CASE("marks are a pure function of seed, site and index") {
  MarkStore a(42, 1), b(42, 1);
  const UpdateMark late = a.mark(Site{3}, 10);
  for (int k = 0; k <= 10; ++k) b.mark(Site{3}, k);
  const UpdateMark m = b.mark(Site{3}, 10);
  CHECK(late.time == m.time);
  CHECK(late.u == m.u);
  CHECK(MarkStore(43, 1).mark(Site{3}, 10).u != m.u);
}

TEST_CASE("mark times decrease strictly from 0") {
  MarkStore s(1, 2);
  double prev = 0.0;
  for (std::uint32_t k = 0; k < 1000; ++k) {
    const auto m = s.mark(Site{1, -1}, k);
    CHECK(m.time < prev);
    CHECK(m.u >= 0.0);
    CHECK(m.u < 1.0);
    prev = m.time;
  }
  // rate one: mean gap 1
  CHECK(-prev / 1000 == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("mark lookups") {
  MarkStore s(7, 1);
  const auto m3 = s.mark(Site{0}, 3);
  CHECK(s.last_mark_before(Site{0}, m3.time).index == 3);
  CHECK(s.last_mark_strictly_before(Site{0}, m3.time).index == 4);
  CHECK(s.last_mark_before(Site{0}, 0.0).index == 0);
  const auto since = s.marks_since(Site{0}, m3.time);
  CHECK(since.size() == 4);
  CHECK(since.back().index == 3);
}

TEST_CASE("key offset translates the mark field") {
  MarkStore shifted(11, 1, Site{5}), plain(11, 1);
  CHECK(shifted.mark(Site{0}, 2).u == plain.mark(Site{5}, 2).u);
  CHECK(shifted.mark(Site{-2}, 0).time == plain.mark(Site{3}, 0).time);
}

TEST_CASE("reach") {
  const LevelSchedule s(1, 0.05, 0.5, 4.0);
  CHECK(reach_u(0.1, s) == 0);
  CHECK(reach_u(s.level_prob(0), s) == 0);
  CHECK(reach_u(0.92, s) == 1);
  CHECK(reach_u(0.95, s) == 2);
  CHECK(reach_u(0.999, s) == 3);
}

TEST_CASE("children are the latest earlier marks at the neighbors") {
  MarkStore s(3, 1);
  const NeighborhoodSpec spec(1);
  const auto root = s.mark(Site{0}, 0);
  const auto kids = children(s, root, spec);
  REQUIRE(kids.size() == 2);
  for (const auto& k : kids) {
    CHECK(k.time < root.time);
    CHECK(s.last_mark_strictly_before(k.site, root.time).key == k.key);
  }
}

TEST_CASE("cone exploration") {
  MarkStore s(5, 1);
  const NeighborhoodSpec spec(1);
  ConeDag dag(s, s.mark(Site{0}, 0), spec);
  dag.explore(3);
  CHECK(dag.depth() >= 3);
  CHECK(dag.count_per_depth()[0] == 1);
  CHECK(dag.max_radius(Site{0}) <= 3);
  const auto order = dag.time_order();
  for (std::size_t k = 1; k < order.size(); ++k)
    CHECK(dag.node(order[k - 1]).mark.time <= dag.node(order[k]).mark.time);
  ConeDag small(s, s.mark(Site{0}, 0), spec, 3);
  CHECK_THROWS_AS(small.explore(5), BudgetExceeded);
}

TEST_CASE("trace has a header and is deterministic") {
  MarkStore a(9, 1), b(9, 1);
  for (auto* s : {&a, &b}) {
    s->mark(Site{1}, 2);
    s->mark(Site{-1}, 1);
  }
  std::ostringstream x, y;
  a.write_trace(x);
  b.write_trace(y);
  CHECK(x.str() == y.str());
  CHECK(x.str().rfind("x0,time,u,index\n", 0) == 0);
}
