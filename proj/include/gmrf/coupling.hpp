#pragma once

#include <span>
#include <vector>

#include "gmrf/model.hpp"

namespace gmrf {

// Field values on i + B, in the canonical offset order.
using BoundaryConfig = std::vector<double>;

// kQuantileOnly skips the common component and inverts the full
// conditional CDF. It is a negative-control hook: coalescence fails.
enum class CouplingMode { kMaximal, kQuantileOnly };

// Update function for the truncated model on [-L, L].
class FlatCoupler {
 public:
  FlatCoupler(double epsilon, double L, int d, CouplingMode mode = CouplingMode::kMaximal);

  double epsilon() const { return epsilon_; }
  double L() const { return L_; }
  int d() const { return d_; }
  double gamma() const { return gamma_; }
  CouplingMode mode() const { return mode_; }

  double mean_field(std::span<const double> eta) const;
  double common_cdf(double s) const;
  double common_value(double u) const;
  double update(std::span<const double> eta, double u) const;
  double update_mean(double m, double u) const;

 private:
  double epsilon_, L_;
  int d_;
  CouplingMode mode_;
  double a_;      // largest admissible |mean|
  double z_;      // normalizing mass at the extreme means
  double half_;   // common mass on [-L, 0]
  double gamma_;
};

// Update function for the unbounded model, stratified along the levels S_n.
class StratifiedCoupler {
 public:
  explicit StratifiedCoupler(const LevelSchedule& schedule, CouplingMode mode = CouplingMode::kMaximal);

  // schedule with q_0 capped at gamma_tilde
  const LevelSchedule& schedule() const { return schedule_; }
  double epsilon() const { return schedule_.epsilon(); }
  int d() const { return schedule_.d(); }
  double gamma_tilde() const { return gammaTilde_; }
  double q0() const { return schedule_.level_prob(0); }
  CouplingMode mode() const { return mode_; }

  // L_n, with L_n = +inf for n >= 2 when eps = 0
  double band_edge(int n) const;
  // P(|N(m, 1)| > L_n), i.e. 1 - q_n(eta)
  double band_tail(int n, double m) const;

  double mean_field(std::span<const double> eta) const;
  bool inside_first_level(std::span<const double> eta) const;

  double common_cdf(double s) const;
  double common_value(double u) const;
  double update(std::span<const double> eta, double u) const;
  double update_zero(double u) const;
  // band index n with q_n(eta) < u <= q_{n+1}(eta), or -1 for the common part
  int band_of(std::span<const double> eta, double u) const;

 private:
  double update_impl(double m, bool inside, double u, int* bandOut) const;

  LevelSchedule schedule_;
  CouplingMode mode_;
  double a1_;
  double half_;
  double gammaTilde_;
};

inline double flat_update(const FlatCoupler& c, std::span<const double> eta, double u) { return c.update(eta, u); }
inline double stratified_update(const StratifiedCoupler& c, std::span<const double> eta, double u) {
  return c.update(eta, u);
}
inline double common_value(const FlatCoupler& c, double u) { return c.common_value(u); }
inline double common_value(const StratifiedCoupler& c, double u) { return c.common_value(u); }

}  // namespace gmrf
