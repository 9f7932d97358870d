#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gmrf/gaussian.hpp"

using namespace gmrf;

TEST_CASE("normal helpers") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  CHECK(std_normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
  CHECK(std_normal_upper(30.0) > 0.0);
  CHECK(log_std_normal_upper(30.0) == doctest::Approx(std::log(std_normal_upper(30.0))).epsilon(1e-10));
  CHECK(log_std_normal_upper(100.0) < -5000.0);
  CHECK(normal_mass(-1, 1) == doctest::Approx(0.6826894921370859));
  CHECK(normal_mass(30, 31) > 0.0);
  CHECK_THROWS(std_normal_quantile(0.0));
}

TEST_CASE("generalized inverse") {
  auto f = [](double x) { return x < 0.5 ? 0.0 : 1.0; };
  CHECK(bisect_generalized_inverse(f, 0.7, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(bisect_generalized_inverse(f, 0.0, 0.0, 1.0) == 0.0);
}

TEST_CASE("truncated normal") {
  const TruncatedNormal tn(0.3, 2.0);
  CHECK(tn.cdf(-2.0) == 0.0);
  CHECK(tn.cdf(2.0) == doctest::Approx(1.0));
  CHECK(tn.quantile(tn.cdf(0.7)) == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(TruncatedNormal(0.0, 2.0).mean() == doctest::Approx(0.0));
  CHECK(TruncatedNormal(0.0, 2.0).variance() < 1.0);
  CHECK_THROWS_AS(TruncatedNormal(100.0, 1.0), std::domain_error);
}

TEST_CASE("gamma of the truncated model against an adaptive-quadrature oracle") {
  CHECK(gamma_truncated(0.0, 2.0) == 1.0);
  CHECK(gamma_truncated(0.2, 2.0) == doctest::Approx(0.7179927077774129).epsilon(1e-10));
  CHECK(gamma_truncated(0.1, 2.0) == doctest::Approx(0.8563487708943723).epsilon(1e-10));
  CHECK(gamma_truncated(0.3, 2.0) == doctest::Approx(0.5895411995914057).epsilon(1e-10));
  CHECK(gamma_unbounded(0.1) == 0.0);
  CHECK(gamma_unbounded(0.0) == 1.0);
}

TEST_CASE("gamma tilde") {
  CHECK(gamma_tilde(0.05, 4.0) == doctest::Approx(0.8414538896237621).epsilon(1e-10));
  CHECK(gamma_tilde_density_scan(0.05, 4.0, 0.3, 401) ==
        doctest::Approx(gamma_tilde_density_endpoints(0.05, 4.0, 0.3)).epsilon(1e-12));
}

TEST_CASE("lipschitz bound dominates 1 - gamma") {
  for (double e : {0.2, 0.1, 0.05, 0.025}) CHECK(1.0 - gamma_truncated(e, 2.0) <= lipschitz_eta_bound(e, 2.0));
}

TEST_CASE("covariance against the one-dimensional closed form") {
  // Gamma(0,k) = rho^k / sqrt(1 - eps^2), rho = (1 - sqrt(1 - eps^2)) / eps
  for (double e : {0.05, 0.2, -0.3}) {
    const double g = 1.0 / std::sqrt(1 - e * e);
    const double rho = (1 - std::sqrt(1 - e * e)) / e;
    for (int k : {0, 1, 2, 5}) {
      const double exact = g * std::pow(rho, k);
      CHECK(std::abs(covariance(CovarianceQuery{e, 1, Site{0}, Site{k}}) - exact) < 1e-12);
    }
  }
  CHECK(covariance(CovarianceQuery{0.0, 2, Site{0, 0}, Site{0, 0}}) == 1.0);
  CHECK(covariance(CovarianceQuery{0.0, 2, Site{0, 0}, Site{1, 0}}) == 0.0);
}

TEST_CASE("covariance is symmetric and translation invariant") {
  const double a = covariance(CovarianceQuery{0.3, 2, Site{0, 0}, Site{2, 1}});
  const double b = covariance(CovarianceQuery{0.3, 2, Site{2, 1}, Site{0, 0}});
  const double c = covariance(CovarianceQuery{0.3, 2, Site{5, -3}, Site{7, -2}});
  CHECK(a == doctest::Approx(b).epsilon(1e-14));
  CHECK(a == doctest::Approx(c).epsilon(1e-14));
}

TEST_CASE("H2 checks") {
  const LevelSchedule s(1, 0.05, 1e-3, 20.0);
  for (int n = 1; n <= 10; ++n) {
    CHECK(check_h2(s, n));
    CHECK(check_h2_exact(s, n));
  }
  CHECK_FALSE(check_h2(LevelSchedule(1, 0.5, 0.9, 0.5), 1));
}

TEST_CASE("H1 is reported") {
  const H1Report r = check_h1(LevelSchedule(1, 0.05, 0.08, 4.0));
  CHECK(r.gammaTilde == doctest::Approx(0.8414538896).epsilon(1e-8));
  CHECK_FALSE(r.holds);
}
