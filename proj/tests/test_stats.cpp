#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gmrf/gaussian.hpp"
#include "gmrf/philox.hpp"
#include "gmrf/stats.hpp"

using namespace gmrf;

namespace {

std::vector<double> normals(std::uint64_t seed, std::size_t n, double shift = 0.0) {
  PhiloxStream rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = std_normal_quantile(std::max(1e-300, rng.uniform())) + shift;
  return x;
}

}  // namespace

TEST_CASE("ks critical values") {
  CHECK(ks_critical(0.01) == 1.628);
  CHECK(ks_critical(0.05) == 1.358);
  CHECK(ks_critical(0.1) == doctest::Approx(1.2239).epsilon(1e-3));
}

TEST_CASE("ks self-consistency over meta-trials") {
  int passes = 0;
  for (int t = 0; t < 100; ++t) passes += ks_test(normals(1000 + t, 10000), std_normal_cdf, 0.05).passes;
  // 95 expected; 3 binomial SE is about 6.5
  CHECK(passes >= 88);
}

TEST_CASE("ks rejects constants and shifted laws") {
  const KsResult c = ks_test(std::vector<double>(500, 0.0), std_normal_cdf);
  CHECK(c.statistic >= 0.5);
  CHECK_FALSE(c.passes);
  CHECK_FALSE(ks_test(normals(3, 10000), [](double x) { return std_normal_cdf(x - 0.5); }).passes);
  CHECK_THROWS(ks_test(std::vector<double>(10, 0.0), std_normal_cdf));
}

TEST_CASE("two-sample ks") {
  CHECK(ks_two_sample(normals(1, 5000), normals(2, 5000)).passes);
  CHECK_FALSE(ks_two_sample(normals(1, 5000), normals(2, 5000, 0.3)).passes);
}

TEST_CASE("discretized total variation") {
  auto windows = [](const std::vector<double>& x) {
    std::vector<std::vector<double>> w;
    for (double v : x) w.push_back({v});
    return w;
  };
  const auto a = windows(normals(5, 20000));
  CHECK(tv_discretized(a, a, 16, -4, 4).tv == 0.0);
  const TvResult same = tv_discretized(a, windows(normals(6, 20000)), 16, -4, 4);
  CHECK(same.passes);
  CHECK_FALSE(tv_discretized(a, windows(normals(6, 20000, 0.3)), 16, -4, 4).passes);
  const std::vector<std::vector<double>> big(10, std::vector<double>(3, 0.0));
  CHECK_THROWS(tv_discretized(big, big, 8, -1, 1));
  CHECK_THROWS(tv_discretized(a, a, 64, -1, 1));
  // deterministic
  CHECK(tv_discretized(a, windows(normals(6, 20000)), 16, -4, 4).bootstrapSe == same.bootstrapSe);
}

TEST_CASE("regression recovers slope and unit variance") {
  const auto s = normals(7, 40000);
  const auto e = normals(8, 40000);
  std::vector<double> x(s.size()), zero(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    x[i] = 0.05 * s[i] + e[i];
    zero[i] = e[i];
  }
  const auto r = conditional_regression(x, s);
  CHECK(std::abs(r.slope - 0.05) <= 3 * r.slopeSe);
  CHECK(std::abs(r.residualVariance - 1.0) <= 3 * r.residualVarianceSe);
  const auto z = conditional_regression(zero, s);
  CHECK(std::abs(z.slope) <= 3 * z.slopeSe);
  CHECK_THROWS(conditional_regression(std::vector<double>(100, 1.0), std::vector<double>(100, 1.0)));
}

TEST_CASE("truncated location mle recovers the slope where least squares is biased") {
  PhiloxStream rng(12);
  const double L = 2.0, slope = 0.1;
  std::vector<double> x, s;
  for (int i = 0; i < 30000; ++i) {
    const double si = 4 * rng.uniform() - 2;
    const TruncatedNormal tn(slope * si, L);
    s.push_back(si);
    x.push_back(tn.quantile(rng.uniform()));
  }
  const auto mle = truncated_location_mle(x, s, L);
  CHECK(std::abs(mle.slope - slope) <= 3 * mle.slopeSe);
  CHECK(conditional_regression(x, s).slope < slope);
}

TEST_CASE("wilson interval") {
  const Interval i = wilson_interval(0, 100);
  CHECK(i.lo == 0.0);
  CHECK(i.hi > 0.0);
  const Interval a = wilson_interval(250, 1000, 3), b = wilson_interval(1000, 4000, 3);
  CHECK((b.hi - b.lo) == doctest::Approx((a.hi - a.lo) / 2).epsilon(0.02));
}

TEST_CASE("bootstrap SE halves across 4x N") {
  auto windows = [](const std::vector<double>& x) {
    std::vector<std::vector<double>> w;
    for (double v : x) w.push_back({v});
    return w;
  };
  const double small = tv_discretized(windows(normals(1, 10000)), windows(normals(2, 10000)), 8, -3, 3).nullSe;
  const double large = tv_discretized(windows(normals(1, 40000)), windows(normals(2, 40000)), 8, -3, 3).nullSe;
  CHECK(large / small == doctest::Approx(0.5).epsilon(0.35));
}

TEST_CASE("tail curve") {
  std::vector<int> none(10000, 0);
  const TailCurve z = tail_curve(none, 1.0, 2);
  CHECK(z.passes);
  for (const auto& r : z.rows) CHECK(r.exceedances == 0);
  std::vector<int> d(10000, 1);
  const TailCurve c = tail_curve(d, 0.8, 2);
  CHECK(c.rows[0].bound == doctest::Approx(0.2));
  CHECK_FALSE(c.passes);
  std::vector<int> three(10000, 3);
  CHECK(tail_curve(three, 0.8, 2).rows[2].bound == doctest::Approx(0.032));
}

TEST_CASE("independence test") {
  const auto a = normals(21, 20000), b = normals(22, 20000);
  const auto r = independence_test(a, b);
  CHECK(r.passes);
  CHECK(r.chiDof == 16);
  std::vector<double> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = b[i] + 0.2 * a[i];
  const auto dep = independence_test(a, c);
  CHECK_FALSE(dep.passes);
  CHECK(dep.chiPValue < 1e-6);
}

TEST_CASE("covariance estimate") {
  const auto a = normals(31, 20000), b = normals(32, 20000);
  std::vector<double> c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  const MeanSe m = covariance_se(a, c);
  CHECK(std::abs(m.mean - 1.0) <= 3 * m.se);
}
