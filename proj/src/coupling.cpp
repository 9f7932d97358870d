#include "gmrf/coupling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gmrf/gaussian.hpp"

namespace gmrf {

namespace {

void check_u(double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("update: u must lie in [0, 1]");
}

double sum_of(std::span<const double> eta) {
  double s = 0.0;
  for (double v : eta) s += v;
  return s;
}

constexpr double kTailReach = 40.0;  // N(0,1) mass beyond this is below 1e-300

}  // namespace

// For fixed t the truncated density is log-concave in its mean, so the
// infimum over admissible means is attained at one of the extreme means +-a:
// the one farther from t.
FlatCoupler::FlatCoupler(double epsilon, double L, int d, CouplingMode mode)
    : epsilon_(epsilon), L_(L), d_(d), mode_(mode) {
  if (!(std::abs(epsilon) < 1.0)) throw std::invalid_argument("FlatCoupler: |epsilon| must be < 1");
  if (!(L > 0.0)) throw std::invalid_argument("FlatCoupler: L must be positive");
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("FlatCoupler: d out of range");
  a_ = std::abs(epsilon) * L;
  z_ = normal_mass(-L - a_, L - a_);
  half_ = normal_mass(-L - a_, -a_) / z_;
  gamma_ = 2.0 * half_;
}

double FlatCoupler::mean_field(std::span<const double> eta) const {
  if (eta.size() != static_cast<std::size_t>(2 * d_)) throw std::invalid_argument("FlatCoupler: boundary size != 2d");
  for (double v : eta)
    if (!(std::abs(v) <= L_)) throw std::domain_error("FlatCoupler: boundary value outside [-L, L]");
  return epsilon_ / (2.0 * d_) * sum_of(eta);
}

double FlatCoupler::common_cdf(double s) const {
  if (s <= -L_) return 0.0;
  if (s >= L_) return gamma_;
  if (s <= 0.0) return normal_mass(-L_ - a_, s - a_) / z_;
  return half_ + normal_mass(a_, s + a_) / z_;
}

double FlatCoupler::common_value(double u) const {
  if (!(u >= 0.0)) throw std::domain_error("common_value: u must be >= 0");
  if (u > gamma_) throw std::domain_error("common_value: u above the common mass gamma");
  return bisect_generalized_inverse([this](double s) { return common_cdf(s); }, u, -L_, L_);
}

double FlatCoupler::update(std::span<const double> eta, double u) const { return update_mean(mean_field(eta), u); }

double FlatCoupler::update_mean(double m, double u) const {
  check_u(u);
  if (mode_ == CouplingMode::kQuantileOnly) return TruncatedNormal(m, L_).quantile(u);
  if (u <= gamma_) return common_value(u);
  TruncatedNormal tn(m, L_);
  const double y = u - gamma_;
  return bisect_generalized_inverse([&](double s) { return tn.cdf(s) - common_cdf(s); }, y, -L_, L_);
}

StratifiedCoupler::StratifiedCoupler(const LevelSchedule& schedule, CouplingMode mode)
    : schedule_(schedule), mode_(mode) {
  a1_ = std::abs(schedule.epsilon()) * schedule.L1();
  half_ = normal_mass(-schedule.L1() - a1_, -a1_);
  gammaTilde_ = 2.0 * half_;
  schedule_ = schedule.with_q0_cap(gammaTilde_);
  if (schedule.q0_cap()) schedule_ = schedule_.with_q0_cap(std::min(gammaTilde_, *schedule.q0_cap()));
}

double StratifiedCoupler::band_edge(int n) const {
  if (n < 1) throw std::invalid_argument("band_edge: n must be >= 1");
  if (schedule_.epsilon() == 0.0) return n == 1 ? schedule_.L1() : std::numeric_limits<double>::infinity();
  return schedule_.level_bound(n);
}

double StratifiedCoupler::band_tail(int n, double m) const {
  double Ln = band_edge(n);
  return std_normal_upper(Ln - m) + std_normal_upper(Ln + m);
}

double StratifiedCoupler::mean_field(std::span<const double> eta) const {
  if (eta.size() != static_cast<std::size_t>(2 * d())) throw std::invalid_argument("StratifiedCoupler: boundary size != 2d");
  return epsilon() / (2.0 * d()) * sum_of(eta);
}

bool StratifiedCoupler::inside_first_level(std::span<const double> eta) const {
  for (double v : eta)
    if (!(std::abs(v) <= schedule_.L1())) return false;
  return true;
}

double StratifiedCoupler::common_cdf(double s) const {
  const double L1 = schedule_.L1();
  if (s <= -L1) return 0.0;
  if (s >= L1) return gammaTilde_;
  if (s <= 0.0) return normal_mass(-L1 - a1_, s - a1_);
  return half_ + normal_mass(a1_, s + a1_);
}

double StratifiedCoupler::common_value(double u) const {
  if (!(u >= 0.0)) throw std::domain_error("common_value: u must be >= 0");
  if (u > gammaTilde_) throw std::domain_error("common_value: u above the common mass gamma_tilde");
  const double L1 = schedule_.L1();
  return bisect_generalized_inverse([this](double s) { return common_cdf(s); }, u, -L1, L1);
}

double StratifiedCoupler::update(std::span<const double> eta, double u) const {
  return update_impl(mean_field(eta), inside_first_level(eta), u, nullptr);
}

double StratifiedCoupler::update_zero(double u) const { return update_impl(0.0, true, u, nullptr); }

int StratifiedCoupler::band_of(std::span<const double> eta, double u) const {
  int band = -1;
  update_impl(mean_field(eta), inside_first_level(eta), u, &band);
  return band;
}

double StratifiedCoupler::update_impl(double m, bool inside, double u, int* bandOut) const {
  check_u(u);
  if (bandOut) *bandOut = -1;
  if (mode_ == CouplingMode::kQuantileOnly) {
    if (u <= 0.0 || u >= 1.0) throw std::domain_error("update: quantile-only mode needs u in (0, 1)");
    return m + std_normal_quantile(u);
  }
  if (inside && u <= gammaTilde_) return common_value(u);

  const double L1 = schedule_.L1();
  const double base = inside ? gammaTilde_ : 0.0;  // q_0(eta)
  if (inside && band_tail(1, m) > 1.0 - gammaTilde_ + 1e-14)
    throw std::runtime_error("stratified_update: negative band-0 mass (common component exceeds the first level)");

  // band n: q_n(eta) < u <= q_{n+1}(eta), searched in tail space 1 - u
  const double w = 1.0 - u;
  int n = 0;
  double tailN = 1.0 - base;
  for (;;) {
    double tailNext = band_tail(n + 1, m);
    if (tailNext <= w) break;
    tailN = tailNext;
    if (++n > 128) throw std::runtime_error("stratified_update: band search exceeded n = 128");
  }
  if (bandOut) *bandOut = n;

  if (n == 0) {
    const double y = u - base;
    auto F0 = [&](double s) {
      double v = normal_mass(-L1 - m, std::min(s, L1) - m);
      return inside ? v - common_cdf(s) : v;
    };
    return bisect_generalized_inverse(F0, y, -L1, L1);
  }

  const double y = tailN - w;
  const double Ln = band_edge(n), Lnext = band_edge(n + 1);
  const double leftTotal = normal_mass(-Lnext - m, -Ln - m);
  if (y <= leftTotal) {
    const double lo = std::max(-Lnext, std::min(m - kTailReach, -Ln));
    return bisect_generalized_inverse([&](double s) { return normal_mass(-Lnext - m, s - m); }, y, lo, -Ln);
  }
  const double hi = std::min(Lnext, std::max(m + kTailReach, Ln));
  const double yr = y - leftTotal;
  return bisect_generalized_inverse([&](double s) { return normal_mass(Ln - m, s - m); }, yr, Ln, hi);
}

}  // namespace gmrf
