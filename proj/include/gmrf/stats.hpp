#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace gmrf {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& x);
// sample covariance of (x, y) with a plug-in standard error
MeanSe covariance_se(const std::vector<double>& x, const std::vector<double>& y);

double ks_critical(double alpha);

struct KsResult {
  double statistic = 0.0;
  double threshold = 0.0;
  double alpha = 0.01;
  std::size_t n = 0;
  bool passes = false;
};

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf, double alpha = 0.01);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha = 0.01);

// Samples are windows of one or two sites, binned on [lo, hi] per axis
// (values outside are clamped into the edge bins).
struct TvResult {
  double tv = 0.0;
  double bootstrapSe = 0.0;
  double nullMean = 0.0;  // finite-sample bias, from pooled relabelling
  double nullSe = 0.0;
  int bins = 0;
  bool passes = false;  // tv <= nullMean + 3 bootstrapSe
};

TvResult tv_discretized(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b, int bins,
                        double lo, double hi, std::uint64_t seed = 1, int resamples = 100);

struct RegressionResult {
  double slope = 0.0, slopeSe = 0.0;
  double intercept = 0.0, interceptSe = 0.0;
  double residualVariance = 0.0, residualVarianceSe = 0.0;
  std::size_t n = 0;
};

// least squares of x0 on s
RegressionResult conditional_regression(const std::vector<double>& x0, const std::vector<double>& s);
// maximum likelihood for x0 | s ~ N(intercept + slope s, 1) restricted to [-L, L]
RegressionResult truncated_location_mle(const std::vector<double>& x0, const std::vector<double>& s, double L);

struct Interval {
  double lo = 0.0, hi = 0.0;
};
Interval wilson_interval(std::int64_t hits, std::int64_t n, double z = 3.0);

struct TailRow {
  int n = 0;
  std::int64_t exceedances = 0;
  double empirical = 0.0;
  Interval ci;
  double bound = 0.0;
  bool flagged = false;
};

struct TailCurve {
  std::vector<TailRow> rows;
  std::int64_t reports = 0;
  int minEvents = 30;
  bool passes = true;
};

// P(depth >= n) against |B|^{n-1} (1-gamma)^n
TailCurve tail_curve(const std::vector<int>& depths, double gamma, int bSize, int minEvents = 30, double z = 3.0);

struct IndependenceResult {
  double corr = 0.0;
  double se = 0.0;  // Fisher scale 1/sqrt(N-3)
  bool passes = false;
  double chiSquare = 0.0;
  int chiDof = 0;
  double chiPValue = 1.0;
  std::size_t n = 0;
};

IndependenceResult independence_test(const std::vector<double>& a, const std::vector<double>& b, int chiBins = 5);

nlohmann::ordered_json to_json(const KsResult& r);
nlohmann::ordered_json to_json(const TvResult& r);
nlohmann::ordered_json to_json(const RegressionResult& r);
nlohmann::ordered_json to_json(const TailCurve& r);
nlohmann::ordered_json to_json(const IndependenceResult& r);
void write_tail_csv(std::ostream& os, const TailCurve& c);

}  // namespace gmrf
