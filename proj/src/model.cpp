#include "gmrf/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "gmrf/gaussian.hpp"

namespace gmrf {

void ModelParams::validate() const {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("ModelParams: d must be in [1, 3]");
  if (!(std::abs(epsilon) < 1.0)) throw std::invalid_argument("ModelParams: |epsilon| must be < 1");
  if (truncation && !(*truncation > 0.0)) throw std::invalid_argument("ModelParams: truncation must be positive");
}

LevelSchedule::LevelSchedule(int d, double epsilon, double a, double L1)
    : d_(d), epsilon_(epsilon), a_(a), L1_(L1) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("LevelSchedule: d must be in [1, 3]");
  if (!(std::abs(epsilon) < 1.0)) throw std::invalid_argument("LevelSchedule: |epsilon| must be < 1");
  if (!(a > 0.0) || !(a * std::exp(-1.0) < 1.0))
    throw std::invalid_argument("LevelSchedule: need 0 < a e^{-1} < 1");
  if (!(L1 > 0.0)) throw std::invalid_argument("LevelSchedule: L1 must be positive");
}

double LevelSchedule::level_bound(int n) const {
  if (n < 1) throw std::invalid_argument("level_bound: n must be >= 1");
  if (epsilon_ == 0.0) throw std::domain_error("level_bound: schedule undefined for epsilon = 0 (i.i.d. field)");
  return L1_ * std::pow(std::abs(epsilon_), -0.5 * (n - 1));
}

double LevelSchedule::tail_prob(int n) const {
  if (n < 0) throw std::invalid_argument("level_prob: n must be >= 0");
  double t = std::exp(log_tail_prob(n));
  return t;
}

double LevelSchedule::log_tail_prob(int n) const {
  if (n < 0) throw std::invalid_argument("level_prob: n must be >= 0");
  double nominal = std::log(a_) - std::pow(2.0 * d_, n);
  if (n == 0 && q0_cap_) return std::max(nominal, std::log1p(-*q0_cap_));
  return nominal;
}

double LevelSchedule::level_prob(int n) const { return 1.0 - tail_prob(n); }

bool LevelSchedule::u_le_q(double u, int k) const {
  if (u <= level_prob(0)) return true;
  return k >= 1 && tail_prob(k) <= 1.0 - u;
}

LevelSchedule LevelSchedule::with_q0_cap(double cap) const {
  if (!(cap > 0.0 && cap <= 1.0)) throw std::invalid_argument("with_q0_cap: cap must be in (0, 1]");
  LevelSchedule s = *this;
  s.q0_cap_ = cap;
  return s;
}

H3Report check_h3(const LevelSchedule& schedule, int bSize) {
  if (bSize < 2) throw std::invalid_argument("check_h3: |B| must be >= 2");
  H3Report rep;
  const double lb = std::log(static_cast<double>(bSize));
  double prev = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int n = 0; n < 64; ++n) {
    double term = std::exp(std::log(4.0) + (2 * n + 1) * lb + schedule.log_tail_prob(n));
    rep.sum4 += term;
    rep.terms = n + 1;
    if (n > 0 && term < prev && term < 1e-16 * rep.sum4) {
      converged = true;
      break;
    }
    prev = term;
  }
  if (!converged) throw std::runtime_error("check_h3: partial sums not Cauchy within 64 terms");
  rep.passes = rep.sum4 < 1.0;

  // second condition at t = 1/2: log terms must become decreasing and negligible
  const double t = 0.5;
  double prevLog = std::numeric_limits<double>::infinity();
  int decreasingFrom = -1;
  for (int n = 0; n < 64; ++n) {
    double lt = n * lb + t * std::pow(2.0 * schedule.d(), n) + schedule.log_tail_prob(n);
    if (lt < prevLog) {
      if (decreasingFrom < 0) decreasingFrom = n;
    } else {
      decreasingFrom = -1;
    }
    prevLog = lt;
  }
  rep.tExists = decreasingFrom >= 0 && prevLog < -700.0;
  return rep;
}

GrowthReport check_growth(const LevelSchedule& schedule) {
  const double e = std::abs(schedule.epsilon());
  if (e == 0.0) throw std::domain_error("check_growth: schedule undefined for epsilon = 0");
  const double se = std::sqrt(e);
  if (1.0 - se <= 0.0) throw std::domain_error("check_growth: 1 - sqrt|eps| must be positive");
  const double twoD = 2.0 * schedule.d();
  const double c = -std::log(schedule.a());

  GrowthReport rep;
  rep.minSlack = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= 64; ++n) {
    double lhs = schedule.level_bound(n) - e * schedule.level_bound(n + 1);
    double rhs = std::sqrt(2.0) * std::sqrt(std::max(0.0, std::pow(twoD, n) + c));
    double slack = lhs - rhs;
    rep.minSlack = std::min(rep.minSlack, slack);
    if (slack < 0.0 && !rep.firstViolation) rep.firstViolation = n;
  }

  // Beyond n = 64 the left side grows by |eps|^{-1/2} per step; the right side
  // grows by at most the ratio computed at n = 64 (ratios decrease to sqrt(2d)).
  auto rhsRatio = [&](int n) {
    return std::sqrt((std::pow(twoD, n + 1) + c) / (std::pow(twoD, n) + c));
  };
  double bound = c >= 0.0 ? std::sqrt(twoD) : rhsRatio(64);
  rep.tailCertified = 1.0 / se >= bound;
  if (!rep.firstViolation && !rep.tailCertified) {
    // scan further in log space to report where the violation happens
    const double logLhs0 = std::log(schedule.L1()) + std::log1p(-se);
    for (int n = 65; n <= 100000; ++n) {
      double logLhs = logLhs0 - 0.5 * (n - 1) * std::log(e);
      double logRhs = 0.5 * std::log(2.0) + 0.5 * (n * std::log(twoD) + std::log1p(c / std::pow(twoD, n)));
      if (logLhs < logRhs) {
        rep.firstViolation = n;
        break;
      }
    }
  }
  rep.passes = !rep.firstViolation && rep.tailCertified;
  return rep;
}

H4Report check_h4(const LevelSchedule& schedule, const ModelParams& params) {
  if (params.truncated()) throw std::invalid_argument("check_h4: unbounded model required");
  const double eps = schedule.epsilon();
  const double sigma = 1.0 / std::sqrt(1.0 - eps * eps);
  const int d = schedule.d();
  constexpr int kMaxN = 64;
  constexpr int kTail = 96;

  std::vector<double> term(kTail + 2, 0.0);  // sphere count times tail bound at level k
  for (int k = 1; k <= kTail + 1; ++k)
    term[k] = l1_sphere_count(d, k) * gaussian_tail_bound(schedule.level_bound(k), sigma);
  std::vector<double> suffix(kTail + 3, 0.0);
  for (int k = kTail + 1; k >= 1; --k) suffix[k] = suffix[k + 1] + term[k];

  H4Report rep;
  for (int n = 1; n <= kMaxN; ++n)
    rep.boundAt.push_back(l1_ball_count(d, n) * gaussian_tail_bound(schedule.level_bound(n), sigma) + suffix[n + 1]);

  auto peak = std::max_element(rep.boundAt.begin(), rep.boundAt.end());
  bool monotoneAfterPeak = std::is_sorted(peak, rep.boundAt.end(), std::greater<double>());
  rep.passes = monotoneAfterPeak && rep.boundAt.back() < 1e-12;
  return rep;
}

std::optional<LevelSchedule> ModelConfig::schedule() const {
  if (!a || !L1) return std::nullopt;
  return LevelSchedule(params.d, params.epsilon, *a, *L1);
}

ModelConfig parse_model_config(const std::string& json_text) {
  auto j = nlohmann::json::parse(json_text);
  ModelConfig cfg;
  cfg.params.d = j.at("d").get<int>();
  cfg.params.epsilon = j.at("epsilon").get<double>();
  if (j.contains("truncation") && !j["truncation"].is_null()) cfg.params.truncation = j["truncation"].get<double>();
  if (j.contains("a") && !j["a"].is_null()) cfg.a = j["a"].get<double>();
  if (j.contains("L1") && !j["L1"].is_null()) cfg.L1 = j["L1"].get<double>();
  cfg.params.validate();
  return cfg;
}

std::string dump_model_config(const ModelConfig& config) {
  nlohmann::json j;
  j["d"] = config.params.d;
  j["epsilon"] = config.params.epsilon;
  j["truncation"] = config.params.truncation ? nlohmann::json(*config.params.truncation) : nlohmann::json(nullptr);
  j["a"] = config.a ? nlohmann::json(*config.a) : nlohmann::json(nullptr);
  j["L1"] = config.L1 ? nlohmann::json(*config.L1) : nlohmann::json(nullptr);
  return j.dump();
}

}  // namespace gmrf
