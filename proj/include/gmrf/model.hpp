#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gmrf/lattice.hpp"

namespace gmrf {

struct ModelParams {
  int d = 1;
  double epsilon = 0.0;
  std::optional<double> truncation;  // present: truncated model on [-L, L]

  bool truncated() const { return truncation.has_value(); }
  void validate() const;
};

// Levels S_n = [-L_n, L_n] and probabilities q_n of the stratified scheme.
//   L_n = L1 |eps|^{-(n-1)/2},  q_n = 1 - a exp(-(2d)^n).
// An optional cap lowers q_0 (see StratifiedCoupler).
class LevelSchedule {
 public:
  LevelSchedule(int d, double epsilon, double a, double L1);

  int d() const { return d_; }
  double epsilon() const { return epsilon_; }
  double a() const { return a_; }
  double L1() const { return L1_; }

  double level_bound(int n) const;
  double level_prob(int n) const;
  // 1 - q_n without cancellation, and its logarithm (finite for every n)
  double tail_prob(int n) const;
  double log_tail_prob(int n) const;

  // u <= q_k, evaluated in tail space for k >= 1; monotone in k
  bool u_le_q(double u, int k) const;

  std::optional<double> q0_cap() const { return q0_cap_; }
  LevelSchedule with_q0_cap(double cap) const;

 private:
  int d_;
  double epsilon_;
  double a_;
  double L1_;
  std::optional<double> q0_cap_;
};

inline double level_bound(const LevelSchedule& s, int n) { return s.level_bound(n); }
inline double level_prob(const LevelSchedule& s, int n) { return s.level_prob(n); }

struct H3Report {
  double sum4 = 0.0;
  bool passes = false;
  bool tExists = false;
  int terms = 0;
  bool holds() const { return passes && tExists; }
};

struct GrowthReport {
  double minSlack = 0.0;
  bool passes = false;
  std::optional<int> firstViolation;
  bool tailCertified = false;
};

struct H4Report {
  std::vector<double> boundAt;  // boundAt[k] is the bound at n = k + 1
  bool passes = false;
};

H3Report check_h3(const LevelSchedule& schedule, int bSize);
GrowthReport check_growth(const LevelSchedule& schedule);
H4Report check_h4(const LevelSchedule& schedule, const ModelParams& params);

// JSON experiment config with keys d, epsilon, truncation, a, L1.
struct ModelConfig {
  ModelParams params;
  std::optional<double> a;
  std::optional<double> L1;

  std::optional<LevelSchedule> schedule() const;
};

ModelConfig parse_model_config(const std::string& json_text);
std::string dump_model_config(const ModelConfig& config);

}  // namespace gmrf
