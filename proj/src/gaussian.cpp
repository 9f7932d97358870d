#include "gmrf/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmrf {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kInvSqrt2 = 0.70710678118654752440;

std::vector<double> simpson_weights(int n, double h) {
  if (n < 3 || n % 2 == 0) throw std::invalid_argument("Simpson grid needs an odd number (>= 3) of points");
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) w[k] = (k == 0 || k == n - 1) ? 1.0 : (k % 2 ? 4.0 : 2.0);
  for (auto& v : w) v *= h / 3.0;
  return w;
}

// Neumaier compensated sum
struct CompensatedSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double v) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      c += (sum - t) + v;
    else
      c += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

}  // namespace

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double std_normal_upper(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double log_std_normal_upper(double x) {
  if (x < 25.0) return std::log(std_normal_upper(x));
  double x2 = x * x;
  double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
  return -0.5 * x2 - std::log(x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("std_normal_quantile: p must lie in (0, 1)");
  double lo = -40.0, hi = 40.0;
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    bool below = p <= 0.5 ? std_normal_cdf(mid) < p : std_normal_upper(mid) > 1.0 - p;
    if (below)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double normal_mass(double a, double b) {
  if (!(b > a)) return 0.0;
  if (a >= 0.0) return std_normal_upper(a) - std_normal_upper(b);
  if (b <= 0.0) return std_normal_cdf(b) - std_normal_cdf(a);
  return 1.0 - std_normal_cdf(a) - std_normal_upper(b);
}

double bisect_generalized_inverse(const std::function<double(double)>& f, double y, double lo, double hi,
                                  double tol) {
  if (!(hi >= lo)) throw std::invalid_argument("bisect_generalized_inverse: empty bracket");
  if (f(lo) >= y) return lo;
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) >= y)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

TruncatedNormal::TruncatedNormal(double m, double L) : m_(m), L_(L) {
  if (!(L > 0.0)) throw std::invalid_argument("TruncatedNormal: L must be positive");
  z_ = normal_mass(-L - m, L - m);
  if (!(z_ > 1e-300))
    throw std::domain_error("TruncatedNormal: normalizing mass underflows (|m| = " + std::to_string(std::abs(m)) +
                            " far outside [-L, L] with L = " + std::to_string(L) + ")");
}

double TruncatedNormal::pdf(double s) const {
  if (s < -L_ || s > L_) return 0.0;
  return std_normal_pdf(s - m_) / z_;
}

double TruncatedNormal::cdf(double s) const {
  if (s <= -L_) return 0.0;
  if (s >= L_) return 1.0;
  return std::clamp(normal_mass(-L_ - m_, s - m_) / z_, 0.0, 1.0);
}

double TruncatedNormal::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("trunc_quantile: p must lie in [0, 1]");
  return bisect_generalized_inverse([this](double s) { return cdf(s); }, p, -L_, L_);
}

double TruncatedNormal::mean() const {
  return m_ + (std_normal_pdf(-L_ - m_) - std_normal_pdf(L_ - m_)) / z_;
}

double TruncatedNormal::variance() const {
  double a = -L_ - m_, b = L_ - m_;
  double pa = std_normal_pdf(a), pb = std_normal_pdf(b);
  double shift = (pa - pb) / z_;
  return 1.0 + (a * pa - b * pb) / z_ - shift * shift;
}

double gamma_truncated(double epsilon, double L, QuadratureGrid grid) {
  if (!(std::abs(epsilon) < 1.0)) throw std::invalid_argument("gamma_truncated: |epsilon| must be < 1");
  if (!(L > 0.0)) throw std::invalid_argument("gamma_truncated: L must be positive");
  if (grid.xPoints < 2) throw std::invalid_argument("gamma_truncated: x grid needs both endpoints");
  if (epsilon == 0.0) return 1.0;

  const int nx = grid.xPoints;
  std::vector<double> means(static_cast<std::size_t>(nx));
  std::vector<double> invZ(static_cast<std::size_t>(nx));
  for (int k = 0; k < nx; ++k) {
    double x = (k == nx - 1) ? L : -L + 2.0 * L * k / (nx - 1);
    means[k] = epsilon * x;
    invZ[k] = 1.0 / normal_mass(-L - means[k], L - means[k]);
  }

  const int nt = grid.tPoints;
  const double h = 2.0 * L / (nt - 1);
  auto w = simpson_weights(nt, h);
  CompensatedSum acc;
  for (int i = 0; i < nt; ++i) {
    double t = (i == nt - 1) ? L : -L + h * i;
    double inf = std::numeric_limits<double>::infinity();
    for (int k = 0; k < nx; ++k) inf = std::min(inf, std_normal_pdf(t - means[k]) * invZ[k]);
    acc.add(w[i] * inf);
  }
  return std::clamp(acc.value(), 0.0, 1.0);
}

double gamma_unbounded(double epsilon) {
  if (!(std::abs(epsilon) < 1.0)) throw std::invalid_argument("gamma_unbounded: |epsilon| must be < 1");
  return epsilon == 0.0 ? 1.0 : 0.0;
}

double gamma_tilde_density_endpoints(double epsilon, double L1, double t) {
  double a = std::abs(epsilon) * L1;
  return std::min(std_normal_pdf(t - a), std_normal_pdf(t + a));
}

double gamma_tilde_density_scan(double epsilon, double L1, double t, int xPoints) {
  double inf = std::numeric_limits<double>::infinity();
  for (int k = 0; k < xPoints; ++k) {
    double x = (k == xPoints - 1) ? L1 : -L1 + 2.0 * L1 * k / (xPoints - 1);
    inf = std::min(inf, std_normal_pdf(t - epsilon * x));
  }
  return inf;
}

double gamma_tilde(double epsilon, double L1, int tPoints) {
  if (!(std::abs(epsilon) < 1.0)) throw std::invalid_argument("gamma_tilde: |epsilon| must be < 1");
  if (!(L1 > 0.0)) throw std::invalid_argument("gamma_tilde: L1 must be positive");
  const double h = 2.0 * L1 / (tPoints - 1);
  auto w = simpson_weights(tPoints, h);
  CompensatedSum acc;
  for (int i = 0; i < tPoints; ++i) {
    double t = (i == tPoints - 1) ? L1 : -L1 + h * i;
    acc.add(w[i] * gamma_tilde_density_endpoints(epsilon, L1, t));
  }
  return std::clamp(acc.value(), 0.0, 1.0);
}

double covariance(const CovarianceQuery& q) {
  const double e = std::abs(q.epsilon);
  if (!(e < 1.0)) throw std::invalid_argument("covariance: |epsilon| must be < 1");
  if (q.d < 1 || q.d > kMaxDim) throw std::invalid_argument("covariance: d out of range");
  if (!(q.tolerance > 0.0)) throw std::invalid_argument("covariance: tolerance must be positive");
  const Site v = q.j - q.i;
  if (q.epsilon == 0.0) return v == Site{} ? 1.0 : 0.0;

  int N = 0;
  while (std::pow(e, N + 1) / (1.0 - e) >= q.tolerance) {
    ++N;
    if (N > 128) throw std::domain_error("covariance: tolerance not reachable within 128 terms");
  }
  const std::int64_t dist = l1_norm(v);
  if (dist > N) return 0.0;

  // P_n(x): probability that the simple random walk sits at x after n steps.
  const int d = q.d;
  const int R = N + 1;
  const int side = 2 * R + 1;
  std::size_t cells = 1;
  std::array<std::size_t, kMaxDim> stride{};
  for (int k = d - 1; k >= 0; --k) {
    stride[k] = cells;
    cells *= static_cast<std::size_t>(side);
  }
  auto index = [&](const Site& s) {
    std::size_t idx = 0;
    for (int k = 0; k < d; ++k) idx += static_cast<std::size_t>(s[k] + R) * stride[k];
    return idx;
  };
  std::vector<double> cur(cells, 0.0), next(cells, 0.0);
  cur[index(Site{})] = 1.0;
  const std::size_t target = index(v);
  const double inv2d = 1.0 / (2.0 * d);

  CompensatedSum acc;
  double epsPow = 1.0;
  for (int n = 0; n <= N; ++n) {
    acc.add(epsPow * cur[target]);
    if (n == N) break;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t c = 0; c < cells; ++c) {
      double p = cur[c];
      if (p == 0.0) continue;
      for (int k = 0; k < d; ++k) {
        next[c + stride[k]] += p * inv2d;
        next[c - stride[k]] += p * inv2d;
      }
    }
    std::swap(cur, next);
    epsPow *= q.epsilon;
  }
  return acc.value();
}

double gaussian_tail_bound(double L, double sigma) {
  if (!(L > 0.0) || !(sigma > 0.0)) throw std::invalid_argument("gaussian_tail_bound: L and sigma must be positive");
  return 2.0 * sigma * kInvSqrt2Pi / L * std::exp(-L * L / (2.0 * sigma * sigma));
}

double lipschitz_eta_bound(double epsilon, double L) {
  const double e = std::abs(epsilon);
  if (!(e <= 1.0)) throw std::invalid_argument("lipschitz_eta_bound: |epsilon| must be <= 1");
  if (!(L > 0.0)) throw std::invalid_argument("lipschitz_eta_bound: L must be positive");
  const double c = std::exp(-0.5) * kInvSqrt2Pi;
  const double lambda = normal_mass(-L - e * L, L - e * L);
  const double Lm = std::max(L, 1.0);
  return 6.0 * Lm * Lm * Lm * c * e / (lambda * lambda);
}

bool check_h2(const LevelSchedule& schedule, int n) {
  if (n < 1) throw std::invalid_argument("check_h2: n must be >= 1");
  const double x = schedule.level_bound(n) - std::abs(schedule.epsilon()) * schedule.level_bound(n + 1);
  return std::log(2.0) + log_std_normal_upper(x) <= schedule.log_tail_prob(n);
}

bool check_h2_exact(const LevelSchedule& schedule, int n) {
  if (n < 1) throw std::invalid_argument("check_h2_exact: n must be >= 1");
  const double Ln = schedule.level_bound(n);
  const double m = std::abs(schedule.epsilon()) * schedule.level_bound(n + 1);
  const double la = log_std_normal_upper(Ln - m);
  const double lb = log_std_normal_upper(Ln + m);
  return la + std::log1p(std::exp(lb - la)) <= schedule.log_tail_prob(n);
}

H1Report check_h1(const LevelSchedule& schedule) {
  H1Report r;
  r.gammaTilde = gamma_tilde(schedule.epsilon(), schedule.L1());
  r.q0 = 1.0 - schedule.a() * std::exp(-1.0);
  r.holds = r.gammaTilde >= r.q0;
  return r;
}

}  // namespace gmrf
