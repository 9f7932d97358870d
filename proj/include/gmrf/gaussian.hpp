#pragma once

#include <functional>

#include "gmrf/lattice.hpp"
#include "gmrf/model.hpp"

namespace gmrf {

double std_normal_pdf(double x);
double std_normal_cdf(double x);
// 1 - cdf(x), computed without cancellation
double std_normal_upper(double x);
double log_std_normal_upper(double x);
// bisection on the CDF, absolute tolerance 1e-12; rejects p outside (0, 1)
double std_normal_quantile(double p);

// P(a <= N(0,1) <= b), accurate in both tails
double normal_mass(double a, double b);

// Smallest s in [lo, hi] with f(s) >= y, for nondecreasing f (bisection).
double bisect_generalized_inverse(const std::function<double(double)>& f, double y, double lo, double hi,
                                  double tol = 1e-12);

// N(m, 1) conditioned on [-L, L].
class TruncatedNormal {
 public:
  TruncatedNormal(double m, double L);

  double mean_param() const { return m_; }
  double halfwidth() const { return L_; }
  double mass() const { return z_; }

  double pdf(double s) const;
  double cdf(double s) const;
  double quantile(double p) const;
  double mean() const;
  double variance() const;

 private:
  double m_;
  double L_;
  double z_;
};

inline double trunc_cdf(const TruncatedNormal& tn, double s) { return tn.cdf(s); }
inline double trunc_quantile(const TruncatedNormal& tn, double p) { return tn.quantile(p); }

struct QuadratureGrid {
  int tPoints = 4001;  // odd
  int xPoints = 401;   // odd, includes both endpoints
};

double gamma_truncated(double epsilon, double L, QuadratureGrid grid = {});
double gamma_unbounded(double epsilon);
double gamma_tilde(double epsilon, double L1, int tPoints = 4001);

// inf over the x grid of the unnormalized densities, for the endpoint check
double gamma_tilde_density_scan(double epsilon, double L1, double t, int xPoints);
double gamma_tilde_density_endpoints(double epsilon, double L1, double t);

struct CovarianceQuery {
  double epsilon = 0.0;
  int d = 1;
  Site i{};
  Site j{};
  double tolerance = 1e-13;
};

double covariance(const CovarianceQuery& q);

double gaussian_tail_bound(double L, double sigma);
double lipschitz_eta_bound(double epsilon, double L);

// 2 (1 - cdf(L_n - |eps| L_{n+1})) <= 1 - q_n
bool check_h2(const LevelSchedule& schedule, int n);
// exact form: sup over eta in S_{n+1}^B of P(|N(m_eta, 1)| > L_n) <= 1 - q_n
bool check_h2_exact(const LevelSchedule& schedule, int n);

struct H1Report {
  double gammaTilde = 0.0;
  double q0 = 0.0;
  bool holds = false;
};
H1Report check_h1(const LevelSchedule& schedule);

}  // namespace gmrf
