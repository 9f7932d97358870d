#include "gmrf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "gmrf/gaussian.hpp"
#include "gmrf/philox.hpp"

namespace gmrf {

MeanSe mean_se(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("need at least two samples");
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0;
  for (double v : x) ss += (v - m) * (v - m);
  return {m, std::sqrt(ss / (n - 1) / n)};
}

MeanSe covariance_se(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("size mismatch");
  const std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("need at least three samples");
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = (x[i] - mx) * (y[i] - my);
  MeanSe r = mean_se(p);
  r.mean *= static_cast<double>(n) / (n - 1);
  return r;
}

double ks_critical(double alpha) {
  if (alpha == 0.01) return 1.628;
  if (alpha == 0.05) return 1.358;
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must be in (0,1)");
  return std::sqrt(-0.5 * std::log(alpha / 2));
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf, double alpha) {
  const std::size_t n = samples.size();
  if (n < 100) throw std::invalid_argument("ks_test needs at least 100 samples");
  std::sort(samples.begin(), samples.end());
  double d = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  KsResult r;
  r.statistic = d;
  r.alpha = alpha;
  r.n = n;
  r.threshold = ks_critical(alpha) / std::sqrt(static_cast<double>(n));
  r.passes = d <= r.threshold;
  return r;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha) {
  if (a.size() < 100 || b.size() < 100) throw std::invalid_argument("ks_two_sample needs at least 100 samples each");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = a.size(), nb = b.size();
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  KsResult r;
  r.statistic = d;
  r.alpha = alpha;
  r.n = a.size() + b.size();
  r.threshold = ks_critical(alpha) * std::sqrt((na + nb) / (na * nb));
  r.passes = d <= r.threshold;
  return r;
}

namespace {

std::vector<std::uint32_t> cells(const std::vector<std::vector<double>>& s, int bins, double lo, double hi,
                                 std::size_t width) {
  std::vector<std::uint32_t> out;
  out.reserve(s.size());
  for (const auto& w : s) {
    if (w.size() != width) throw std::invalid_argument("windows differ in size");
    std::uint32_t c = 0;
    for (double v : w) {
      int k = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
      k = std::clamp(k, 0, bins - 1);
      c = c * bins + static_cast<std::uint32_t>(k);
    }
    out.push_back(c);
  }
  return out;
}

double tv_from(const std::vector<double>& ca, double na, const std::vector<double>& cb, double nb) {
  double s = 0;
  for (std::size_t k = 0; k < ca.size(); ++k) s += std::abs(ca[k] / na - cb[k] / nb);
  return 0.5 * s;
}

double sd(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (v.size() - 1));
}

std::size_t draw_index(PhiloxStream& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(rng.uniform() * n));
}

}  // namespace

TvResult tv_discretized(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b, int bins,
                        double lo, double hi, std::uint64_t seed, int resamples) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empty batch");
  const std::size_t width = a.front().size();
  if (width < 1 || width > 2) throw std::invalid_argument("tv_discretized supports windows of at most 2 sites");
  if (bins < 1 || bins > 32) throw std::invalid_argument("bins must be in 1..32");
  if (!(hi > lo)) throw std::invalid_argument("empty binning range");
  if (resamples < 2) throw std::invalid_argument("need at least two resamples");
  const auto ia = cells(a, bins, lo, hi, width);
  const auto ib = cells(b, bins, lo, hi, width);
  const std::size_t nc = width == 1 ? bins : static_cast<std::size_t>(bins) * bins;
  auto hist = [&](const std::vector<std::uint32_t>& idx) {
    std::vector<double> h(nc, 0.0);
    for (auto c : idx) h[c] += 1;
    return h;
  };
  const double na = ia.size(), nb = ib.size();
  TvResult r;
  r.bins = bins;
  r.tv = tv_from(hist(ia), na, hist(ib), nb);

  PhiloxStream rng(seed, 7);
  std::vector<double> boot, null;
  std::vector<double> ha(nc), hb(nc);
  for (int rep = 0; rep < resamples; ++rep) {
    std::fill(ha.begin(), ha.end(), 0.0);
    std::fill(hb.begin(), hb.end(), 0.0);
    for (std::size_t k = 0; k < ia.size(); ++k) ha[ia[draw_index(rng, ia.size())]] += 1;
    for (std::size_t k = 0; k < ib.size(); ++k) hb[ib[draw_index(rng, ib.size())]] += 1;
    boot.push_back(tv_from(ha, na, hb, nb));
  }
  std::vector<std::uint32_t> pool(ia);
  pool.insert(pool.end(), ib.begin(), ib.end());
  for (int rep = 0; rep < resamples; ++rep) {
    for (std::size_t k = pool.size() - 1; k > 0; --k) std::swap(pool[k], pool[draw_index(rng, k + 1)]);
    std::fill(ha.begin(), ha.end(), 0.0);
    std::fill(hb.begin(), hb.end(), 0.0);
    for (std::size_t k = 0; k < pool.size(); ++k) (k < ia.size() ? ha : hb)[pool[k]] += 1;
    null.push_back(tv_from(ha, na, hb, nb));
  }
  r.bootstrapSe = sd(boot);
  r.nullMean = std::accumulate(null.begin(), null.end(), 0.0) / null.size();
  r.nullSe = sd(null);
  r.passes = r.tv <= r.nullMean + 3.0 * r.bootstrapSe;
  return r;
}

RegressionResult conditional_regression(const std::vector<double>& x0, const std::vector<double>& s) {
  if (x0.size() != s.size()) throw std::invalid_argument("size mismatch");
  const std::size_t n = x0.size();
  if (n < 10000) throw std::invalid_argument("conditional_regression needs at least 1e4 samples");
  const double mx = std::accumulate(s.begin(), s.end(), 0.0) / n;
  const double my = std::accumulate(x0.begin(), x0.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (s[i] - mx) * (s[i] - mx);
    sxy += (s[i] - mx) * (x0[i] - my);
  }
  if (sxx <= 0) throw std::domain_error("regressor has zero variance");
  RegressionResult r;
  r.n = n;
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  std::vector<double> r2(n);
  double ssr = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = x0[i] - r.intercept - r.slope * s[i];
    ssr += e * e;
    r2[i] = e * e;
  }
  const double sigma2 = ssr / (n - 2);
  r.slopeSe = std::sqrt(sigma2 / sxx);
  r.interceptSe = std::sqrt(sigma2 * (1.0 / n + mx * mx / sxx));
  const MeanSe v = mean_se(r2);
  r.residualVariance = sigma2;
  r.residualVarianceSe = v.se;
  return r;
}

RegressionResult truncated_location_mle(const std::vector<double>& x0, const std::vector<double>& s, double L) {
  RegressionResult r = conditional_regression(x0, s);
  const std::size_t n = x0.size();
  double a = r.intercept, b = r.slope;
  double i00 = 0, i01 = 0, i11 = 0;
  for (int it = 0; it < 100; ++it) {
    double g0 = 0, g1 = 0;
    i00 = i01 = i11 = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const TruncatedNormal tn(a + b * s[k], L);
      const double e = x0[k] - tn.mean(), v = tn.variance();
      g0 += e;
      g1 += e * s[k];
      i00 += v;
      i01 += v * s[k];
      i11 += v * s[k] * s[k];
    }
    const double det = i00 * i11 - i01 * i01;
    if (!(det > 0)) throw std::domain_error("singular information matrix");
    const double da = (i11 * g0 - i01 * g1) / det;
    const double db = (-i01 * g0 + i00 * g1) / det;
    a += da;
    b += db;
    if (std::abs(da) < 1e-12 && std::abs(db) < 1e-12) break;
  }
  const double det = i00 * i11 - i01 * i01;
  r.intercept = a;
  r.slope = b;
  r.interceptSe = std::sqrt(i11 / det);
  r.slopeSe = std::sqrt(i00 / det);
  std::vector<double> r2(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double e = x0[k] - TruncatedNormal(a + b * s[k], L).mean();
    r2[k] = e * e;
  }
  const MeanSe v = mean_se(r2);
  r.residualVariance = v.mean;
  r.residualVarianceSe = v.se;
  return r;
}

Interval wilson_interval(std::int64_t hits, std::int64_t n, double z) {
  if (n <= 0) throw std::invalid_argument("wilson_interval needs n > 0");
  const double p = static_cast<double>(hits) / n, z2 = z * z;
  const double denom = 1 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

TailCurve tail_curve(const std::vector<int>& depths, double gamma, int bSize, int minEvents, double z) {
  if (depths.size() < 10000) throw std::invalid_argument("tail_curve needs at least 1e4 reports");
  TailCurve c;
  c.reports = static_cast<std::int64_t>(depths.size());
  c.minEvents = minEvents;
  const int maxDepth = *std::max_element(depths.begin(), depths.end());
  std::vector<std::int64_t> atLeast(maxDepth + 2, 0);
  for (int dpt : depths) ++atLeast[std::max(0, dpt)];
  for (int n = maxDepth; n >= 0; --n) atLeast[n] += atLeast[n + 1];
  for (int n = 1; n <= std::max(1, maxDepth); ++n) {
    TailRow row;
    row.n = n;
    row.exceedances = n <= maxDepth ? atLeast[n] : 0;
    row.empirical = static_cast<double>(row.exceedances) / c.reports;
    row.ci = wilson_interval(row.exceedances, c.reports, z);
    row.bound = std::pow(bSize, n - 1) * std::pow(1 - gamma, n);
    row.flagged = row.exceedances >= minEvents && row.ci.lo > row.bound;
    c.passes = c.passes && !row.flagged;
    c.rows.push_back(row);
  }
  return c;
}

IndependenceResult independence_test(const std::vector<double>& a, const std::vector<double>& b, int chiBins) {
  if (a.size() != b.size()) throw std::invalid_argument("size mismatch");
  const std::size_t n = a.size();
  if (n < 10000) throw std::invalid_argument("independence_test needs at least 1e4 pairs");
  if (chiBins < 2) throw std::invalid_argument("need at least two bins");
  IndependenceResult r;
  r.n = n;
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double saa = 0, sbb = 0, sab = 0;
  for (std::size_t i = 0; i < n; ++i) {
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
    sab += (a[i] - ma) * (b[i] - mb);
  }
  r.corr = sab / std::sqrt(saa * sbb);
  r.se = 1.0 / std::sqrt(n - 3.0);
  r.passes = std::abs(std::atanh(r.corr)) <= 3.0 * r.se;

  // quantile bins of each margin
  auto binner = [&](const std::vector<double>& x) {
    std::vector<double> sorted(x);
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> edges;
    for (int k = 1; k < chiBins; ++k) edges.push_back(sorted[k * n / chiBins]);
    std::vector<int> out(n);
    for (std::size_t i = 0; i < n; ++i)
      out[i] = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), x[i]) - edges.begin());
    return out;
  };
  const auto ba = binner(a), bb = binner(b);
  std::vector<double> joint(chiBins * chiBins, 0.0), ra(chiBins, 0.0), rb(chiBins, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    joint[ba[i] * chiBins + bb[i]] += 1;
    ra[ba[i]] += 1;
    rb[bb[i]] += 1;
  }
  double chi = 0;
  int usedA = 0, usedB = 0;
  for (int k = 0; k < chiBins; ++k) {
    usedA += ra[k] > 0;
    usedB += rb[k] > 0;
  }
  for (int p = 0; p < chiBins; ++p)
    for (int q = 0; q < chiBins; ++q) {
      const double e = ra[p] * rb[q] / n;
      if (e > 0) chi += (joint[p * chiBins + q] - e) * (joint[p * chiBins + q] - e) / e;
    }
  r.chiSquare = chi;
  r.chiDof = (usedA - 1) * (usedB - 1);
  r.chiPValue = r.chiDof > 0 ? boost::math::gamma_q(r.chiDof / 2.0, chi / 2.0) : 1.0;
  return r;
}

nlohmann::ordered_json to_json(const KsResult& r) {
  return {{"statistic", r.statistic}, {"threshold", r.threshold}, {"alpha", r.alpha}, {"n", r.n}, {"passes", r.passes}};
}

nlohmann::ordered_json to_json(const TvResult& r) {
  return {{"tv", r.tv},          {"bootstrap_se", r.bootstrapSe}, {"null_mean", r.nullMean},
          {"null_se", r.nullSe}, {"bins", r.bins},                {"passes", r.passes}};
}

nlohmann::ordered_json to_json(const RegressionResult& r) {
  return {{"slope", r.slope},
          {"slope_se", r.slopeSe},
          {"intercept", r.intercept},
          {"intercept_se", r.interceptSe},
          {"residual_variance", r.residualVariance},
          {"residual_variance_se", r.residualVarianceSe},
          {"n", r.n}};
}

nlohmann::ordered_json to_json(const TailCurve& c) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : c.rows)
    rows.push_back({{"n", r.n},
                    {"exceedances", r.exceedances},
                    {"empirical", r.empirical},
                    {"wilson_lo", r.ci.lo},
                    {"wilson_hi", r.ci.hi},
                    {"bound", r.bound},
                    {"flagged", r.flagged}});
  return {{"reports", c.reports}, {"min_events", c.minEvents}, {"passes", c.passes}, {"rows", rows}};
}

nlohmann::ordered_json to_json(const IndependenceResult& r) {
  return {{"corr", r.corr},           {"se", r.se},           {"passes", r.passes},         {"chi_square", r.chiSquare},
          {"chi_dof", r.chiDof},      {"chi_p_value", r.chiPValue}, {"n", r.n}};
}

void write_tail_csv(std::ostream& os, const TailCurve& c) {
  os << "n,exceedances,empirical,wilson_lo,wilson_hi,bound,flagged\n";
  char buf[256];
  for (const auto& r : c.rows) {
    std::snprintf(buf, sizeof buf, "%d,%lld,%.17g,%.17g,%.17g,%.17g,%d\n", r.n, static_cast<long long>(r.exceedances),
                  r.empirical, r.ci.lo, r.ci.hi, r.bound, r.flagged ? 1 : 0);
    os << buf;
  }
}

}  // namespace gmrf
