#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gmrf/sampler.hpp"

using namespace gmrf;

TEST_CASE("epsilon 0 truncated draw is the common value of the first mark") {
  const FlatCoupler c(0.0, 2.0, 1);
  MarkStore s(1, 1);
  const auto d = sample_truncated(s, c, Site{0});
  REQUIRE(d.value);
  CHECK(*d.value == c.common_value(s.mark(Site{0}, 0).u));
  CHECK(d.report.marksRevealed == 1);
}

TEST_CASE("truncated draws stay in range and are reproducible") {
  const FlatCoupler c(0.2, 2.0, 1);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    MarkStore a(seed, 1), b(seed, 1);
    const auto x = sample_truncated(a, c, Site{4});
    const auto y = sample_truncated(b, c, Site{4});
    REQUIRE(x.value);
    CHECK(std::abs(*x.value) <= 2.0);
    CHECK(*x.value == *y.value);
    CHECK(x.report.marksRevealed >= 1);
  }
}

TEST_CASE("high-noise gate") {
  const FlatCoupler c(0.9, 2.0, 2);
  MarkStore s(1, 2);
  CHECK_THROWS_AS(sample_truncated(s, c, Site{0, 0}), std::domain_error);
  TruncatedOptions o;
  o.force = true;
  o.budget = 50;
  bool sawBudget = false;
  for (std::uint64_t seed = 0; seed < 50 && !sawBudget; ++seed) {
    MarkStore t(seed, 2);
    sawBudget = sample_truncated(t, c, Site{0, 0}, o).status == SampleStatus::kBudgetExceeded;
  }
  CHECK(sawBudget);
}

TEST_CASE("shared cache does not change values") {
  const FlatCoupler c(0.2, 2.0, 1);
  MarkStore a(77, 1), b(77, 1);
  MarkValueCache cache;
  for (int i = -3; i <= 3; ++i) {
    const auto x = sample_truncated(a, c, Site{i}, {}, &cache);
    const auto y = sample_truncated(b, c, Site{i});
    CHECK(*x.value == *y.value);
  }
}

TEST_CASE("gaussian sampler at epsilon 0 uses the root mark only") {
  const StratifiedCoupler c(LevelSchedule(1, 0.0, 0.5, 2.0));
  MarkStore s(2, 1);
  const auto d = sample_gaussian(s, c, Site{0});
  REQUIRE(d.value);
  CHECK(*d.value == c.update_zero(s.mark(Site{0}, 0).u));
}

TEST_CASE("gaussian sampler is deterministic and certifies dryness") {
  const StratifiedCoupler c(LevelSchedule(1, 0.05, 0.08, 4.0));
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    MarkStore a(seed, 1), b(seed, 1);
    const auto x = sample_gaussian(a, c, Site{0});
    const auto y = sample_gaussian(b, c, Site{0});
    REQUIRE(x.value);
    CHECK(*x.value == *y.value);
    CHECK(x.certificate.residual <= 1e-9);
    CHECK(x.cutsetSize >= 1);
  }
}

TEST_CASE("dryness tail decreases in D") {
  const LevelSchedule s(1, 0.05, 0.08, 4.0);
  CHECK(dryness_tail(s, 2, 3) < dryness_tail(s, 2, 2));
}

TEST_CASE("l-dependent sample with l = 0 is the root update from zero") {
  const StratifiedCoupler c(LevelSchedule(1, 0.05, 0.08, 4.0));
  MarkStore s(4, 1);
  CHECK(sample_l_dependent(s, c, Site{0}, 0) == c.update_zero(s.mark(Site{0}, 0).u));
  CHECK(sample_l_dependent(s, c, Site{0}, 1) == c.update_zero(s.mark(Site{0}, 0).u));
}

TEST_CASE("window samples and writers") {
  const FlatCoupler c(0.2, 2.0, 1);
  MarkStore s(5, 1);
  WindowOptions o;
  const auto f = sample_window(s, {Site{0}, Site{1}}, o, &c, nullptr);
  CHECK(f.values.size() == 2);
  CHECK(f.status == SampleStatus::kOk);
  std::ostringstream csv;
  write_field_csv(csv, f);
  CHECK(csv.str().rfind("x0,value\n", 0) == 0);
  CHECK(field_json(f).find("\"values\"") != std::string::npos);
  CHECK_THROWS(sample_window(s, {Site{0}}, o, nullptr, nullptr));
}
