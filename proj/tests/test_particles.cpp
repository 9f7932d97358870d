#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gmrf/particles.hpp"

using namespace gmrf;

TEST_CASE("torus indexing wraps") {
  const TorusWindow w(2, 4);
  CHECK(w.size() == 16);
  CHECK(w.index(Site{-1, 0}) == w.index(Site{3, 0}));
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(w.index(w.site(i)) == i);
  CHECK(w.neighbors(0).size() == 4);
  CHECK_THROWS(TorusWindow(1, 2));
}

TEST_CASE("events come in increasing time") {
  const TorusWindow w(1, 5);
  MarkStore s(1, 1);
  const auto ev = collect_events(w, s, -4.0);
  for (std::size_t k = 1; k < ev.size(); ++k) CHECK(ev[k - 1].time <= ev[k].time);
  for (const auto& e : ev) CHECK(e.time >= -4.0);
}

TEST_CASE("rules") {
  CHECK(binary_rule(true, 0.1, 0.5) == 0);
  CHECK(binary_rule(true, 0.9, 0.5) == 1);
  CHECK(binary_rule(false, 0.9, 0.5) == 0);
  const LevelSchedule s(1, 0.05, 0.5, 4.0);
  CHECK(level_rule(kSpinInf, 0.1, s) == kSpinInf);
  CHECK(level_rule(0, 0.1, s) == 0);
  CHECK(level_rule(1, 0.1, s) == 0);
  CHECK(level_rule(3, 0.1, s) == 2);
  CHECK(level_rule(0, 0.92, s) == 1);
  CHECK(level_rule(2, 0.95, s) == 2);
}

TEST_CASE("binary dual with gamma 1 dies at the first origin mark") {
  const TorusWindow w(1, 8);
  MarkStore s(3, 1);
  const auto first = s.mark(Site{0}, 0);
  const auto dual = backward_dual_binary(w, -50.0, 1.0, s);
  REQUIRE(dual.extinction);
  CHECK(*dual.extinction == first.time);
}

TEST_CASE("level dual examples") {
  const TorusWindow w(1, 8);
  const LevelSchedule s(1, 0.05, 0.5, 4.0);
  MarkStore st(8, 1);
  const auto first = st.mark(Site{0}, 0);
  const double tau = first.time + 1e-9;
  const auto none = backward_dual_level(w, tau, s, st);
  CHECK(none.final_state()[0] == 0);
  for (std::size_t i = 1; i < w.size(); ++i) CHECK(none.final_state()[i] == kSpinInf);
  if (first.u <= s.level_prob(0)) {
    // first event processed at the origin puts 1 on both neighbors
    const auto d = backward_dual_level(w, -20.0, s, st);
    std::size_t k = 0;
    while (d.events[k].site != 0) ++k;
    const auto& after = d.states[k + 1];
    CHECK(after[0] == kSpinInf);
    CHECK(after[w.index(Site{1})] == 1);
    CHECK(after[w.index(Site{-1})] == 1);
  }
}

TEST_CASE("level dual implementations agree") {
  const TorusWindow w(1, 8);
  const LevelSchedule s(1, 0.05, 0.5, 4.0);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    MarkStore st(seed, 1);
    CHECK(backward_dual_level(w, -3.0, s, st).states == backward_dual_level_paths(w, -3.0, s, st).states);
  }
}

TEST_CASE("attractiveness of the binary system") {
  const TorusWindow w(1, 8);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    MarkStore st(seed, 1);
    const auto early = forward_spin(w, -3.0, 0.7, st);
    const auto late = forward_spin(w, -2.0, 0.7, st);
    for (double t : {-1.5, -1.0, -0.5, 0.0}) {
      const auto& a = early.at(t);
      const auto& b = late.at(t);
      for (std::size_t i = 0; i < w.size(); ++i) CHECK(a[i] <= b[i]);
    }
  }
}

TEST_CASE("extinction is monotone in tau") {
  const TorusWindow w(1, 8);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    MarkStore st(seed, 1);
    const auto a = backward_dual_binary(w, -2.0, 0.7, st);
    const auto b = backward_dual_binary(w, -4.0, 0.7, st);
    if (a.extinction) {
      REQUIRE(b.extinction);
      CHECK(*a.extinction == *b.extinction);
    }
  }
}

TEST_CASE("spin 0 implies coalescence of the field dynamics") {
  const TorusWindow w(1, 8);
  const FlatCoupler c(0.2, 2.0, 1);
  const UpdateFn phi = [&](std::span<const double> eta, double u) { return c.update(eta, u); };
  int zeros = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    MarkStore st(seed, 1);
    const auto spin = forward_spin(w, -3.0, c.gamma(), st).final_state();
    const auto x = forward_glauber(w, std::vector<double>(8, 2.0), -3.0, 0.0, st, phi);
    const auto y = forward_glauber(w, std::vector<double>(8, -2.0), -3.0, 0.0, st, phi);
    for (std::size_t i = 0; i < w.size(); ++i)
      if (spin[i] == 0) {
        ++zeros;
        CHECK(x[i] == y[i]);
      }
  }
  CHECK(zeros > 100);
}

TEST_CASE("epsilon 0 dynamics forgets the start") {
  const TorusWindow w(1, 6);
  const FlatCoupler c(0.0, 2.0, 1);
  const UpdateFn phi = [&](std::span<const double> eta, double u) { return c.update(eta, u); };
  MarkStore st(2, 1);
  const auto x = forward_glauber(w, std::vector<double>(6, 1.0), -30.0, 0.0, st, phi);
  const auto y = forward_glauber(w, std::vector<double>(6, -1.0), -30.0, 0.0, st, phi);
  CHECK(x == y);
}

TEST_CASE("binary duality with gamma 1 matches the Poisson gap law") {
  const auto r = duality_check_binary(TorusWindow(1, 8), -3.0, 1.0, 20000, 99);
  const double exact = 1 - std::exp(-3.0);
  CHECK(r.passes);
  CHECK(std::abs(r.pOmega - exact) < 4 * std::sqrt(exact * (1 - exact) / 20000));
  CHECK(std::abs(r.pSigma - exact) < 4 * std::sqrt(exact * (1 - exact) / 20000));
}

TEST_CASE("binary duality with gamma 0 never coalesces") {
  const auto r = duality_check_binary(TorusWindow(1, 8), -3.0, 0.0, 10000, 5);
  CHECK(r.pOmega == 0.0);
  CHECK(r.pSigma == 0.0);
  CHECK(r.passes);
}

TEST_CASE("level duality with a huge far entry") {
  const TorusWindow w(1, 8);
  const LevelSchedule s(1, 0.05, 0.5, 4.0);
  std::vector<int> kappa(8, 1);
  kappa[4] = 1000;
  const auto r = duality_check_level(w, -1.0, kappa, s, 10000, 31);
  CHECK(r.passes);
  CHECK(r.pathwiseViolations == 0);
  CHECK_THROWS(duality_check_level(w, -1.0, kappa, s, 10, 31));
}

TEST_CASE("rate tables") {
  const LevelSchedule s(1, 0.05, 0.5, 4.0);
  for (int m : {0, 1, 2, 3}) {
    double total = level_rate(kSpinInf, m, s);
    for (int k = 0; k < 30; ++k) total += level_rate(k, m, s);
    CHECK(total == doctest::Approx(1.0));
  }
  CHECK(level_rate(kSpinInf, kSpinInf, s) == 1.0);
  CHECK(binary_rate(1, false, 0.3) == 1.0);
  CHECK(binary_rate(1, true, 0.3) == doctest::Approx(0.3));
  CHECK(binary_rate(0, true, 0.3) == doctest::Approx(0.7));
  for (const auto& r : measure_spin_rates(0.6, 200000, 4))
    CHECK(std::abs(r.empirical - r.expected) <= 4 * r.se + 1e-15);
}
