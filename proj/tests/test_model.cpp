#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gmrf/lattice.hpp"
#include "gmrf/model.hpp"

using namespace gmrf;

TEST_CASE("unit sphere neighborhoods") {
  CHECK(NeighborhoodSpec(1).size() == 2);
  CHECK(NeighborhoodSpec(2).size() == 4);
  CHECK(NeighborhoodSpec(3).size() == 6);
  const auto n = neighbors(Site{0, 0}, NeighborhoodSpec(2));
  CHECK(n.size() == 4);
  for (const Site& s : n) CHECK(l1_norm(s) == 1);
}

TEST_CASE("neighborhood validation") {
  CHECK_THROWS(NeighborhoodSpec(1, {Site{0}}));
  CHECK_THROWS(NeighborhoodSpec(1, {Site{1}}));
  CHECK_THROWS(NeighborhoodSpec(1, {Site{1}, Site{-1}, Site{1}}));
  CHECK_NOTHROW(NeighborhoodSpec(1, {Site{2}, Site{-2}}));
}

TEST_CASE("l1 sphere and ball counts") {
  CHECK(l1_sphere_count(1, 0) == 1);
  CHECK(l1_sphere_count(1, 5) == 2);
  CHECK(l1_sphere_count(2, 3) == 12);
  CHECK(l1_sphere_count(3, 2) == 18);
  CHECK(l1_ball_count(2, 2) == 13);
}

TEST_CASE("level schedule closed forms") {
  const LevelSchedule s(1, 0.05, 0.08, 4.0);
  CHECK(s.level_bound(1) == doctest::Approx(4.0));
  CHECK(s.level_bound(3) == doctest::Approx(4.0 / 0.05));
  CHECK(s.level_prob(0) == doctest::Approx(1 - 0.08 / std::exp(1.0)));
  CHECK(s.level_prob(2) == doctest::Approx(1 - 0.08 * std::exp(-4.0)));
  CHECK(s.tail_prob(5) > 0.0);
  CHECK(s.log_tail_prob(30) == doctest::Approx(std::log(0.08) - std::pow(2.0, 30)));
  for (int n = 0; n < 10; ++n) CHECK(s.level_prob(n + 1) >= s.level_prob(n));
}

TEST_CASE("schedule rejects bad parameters") {
  CHECK_THROWS(LevelSchedule(1, 1.0, 0.1, 1.0));
  CHECK_THROWS(LevelSchedule(1, 0.1, 3.0, 1.0));
  CHECK_THROWS(LevelSchedule(1, 0.1, 0.1, 0.0));
  CHECK_THROWS(LevelSchedule(4, 0.1, 0.1, 1.0));
  CHECK_THROWS(LevelSchedule(1, 0.0, 0.1, 1.0).level_bound(2));
}

TEST_CASE("u_le_q is monotone and matches q_k") {
  const LevelSchedule s(1, 0.05, 0.5, 4.0);
  for (double u : {0.1, 0.8, 0.9, 0.99, 0.999999, 0.9999999999}) {
    bool prev = false;
    for (int k = 0; k < 8; ++k) {
      const bool b = s.u_le_q(u, k);
      CHECK((!prev || b));
      prev = b;
    }
  }
  CHECK(s.u_le_q(s.level_prob(0), 0));
  CHECK_FALSE(s.u_le_q(std::nextafter(s.level_prob(0), 1.0), 0));
}

TEST_CASE("q0 cap") {
  const LevelSchedule s = LevelSchedule(1, 0.05, 0.08, 4.0).with_q0_cap(0.8);
  CHECK(s.level_prob(0) == doctest::Approx(0.8));
  CHECK(s.level_prob(1) == doctest::Approx(1 - 0.08 * std::exp(-2.0)));
}

TEST_CASE("hypothesis checks on a known-good schedule") {
  const LevelSchedule s(1, 0.05, 1e-3, 20.0);
  CHECK(check_h3(s, 2).holds());
  CHECK(check_growth(s).passes);
  CHECK(check_h4(s, ModelParams{1, 0.05, std::nullopt}).passes);
}

TEST_CASE("H3 fails when a = 1") {
  const LevelSchedule s(1, 0.05, 1.0, 20.0);
  const H3Report r = check_h3(s, 2);
  CHECK_FALSE(r.holds());
  CHECK(r.sum4 >= 4 * 2 * std::exp(-2.0));
}

TEST_CASE("growth fails when L1 is small") {
  const GrowthReport r = check_growth(LevelSchedule(1, 0.05, 0.08, 1.0));
  CHECK_FALSE(r.passes);
  CHECK(r.firstViolation.has_value());
}

TEST_CASE("model config round trip") {
  const ModelConfig c = parse_model_config(R"({"d": 2, "epsilon": 0.3, "truncation": 2.0})");
  CHECK(c.params.d == 2);
  CHECK(c.params.truncation.value() == 2.0);
  CHECK_FALSE(c.schedule().has_value());
  const ModelConfig back = parse_model_config(dump_model_config(c));
  CHECK(back.params.epsilon == 0.3);
  CHECK_THROWS(parse_model_config(R"({"d": 1, "epsilon": 1.5})"));
  CHECK_THROWS(parse_model_config(R"({"epsilon": 0.1})"));
}
