#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gmrf/coupling.hpp"
#include "gmrf/marks.hpp"

namespace gmrf {

class TorusWindow {
 public:
  TorusWindow(int d, int side);

  int d() const { return d_; }
  int side() const { return side_; }
  std::size_t size() const { return size_; }
  Site site(std::size_t index) const;
  std::size_t index(const Site& s) const;  // coordinates taken modulo side
  // neighbor indices in canonical offset order
  const std::vector<std::size_t>& neighbors(std::size_t index) const { return nbr_[index]; }

 private:
  int d_, side_;
  std::size_t size_;
  std::vector<std::vector<std::size_t>> nbr_;
};

struct TorusEvent {
  double time = 0.0;
  std::size_t site = 0;
  double u = 0.0;
  std::uint32_t markIndex = 0;
};

// Marks of the window with tau <= time <= tEnd, in increasing time.
std::vector<TorusEvent> collect_events(const TorusWindow& w, MarkStore& store, double tau, double tEnd = 0.0);

constexpr int kSpinInf = std::numeric_limits<int>::max();
constexpr int kSpinNegInf = std::numeric_limits<int>::min();

int binary_rule(bool someNeighborOne, double u, double gamma);
// rules 1-3 of the level system, m = max neighbor spin
int level_rule(int m, double u, const LevelSchedule& schedule);

// Forward trajectory: states[k] is the configuration after the first k events.
template <class Spin>
struct ForwardTrajectory {
  double tau = 0.0;
  std::vector<TorusEvent> events;
  std::vector<std::vector<Spin>> states;

  const std::vector<Spin>& final_state() const { return states.back(); }
  // configuration at time t (right-continuous)
  const std::vector<Spin>& at(double t) const;
  Spin query(std::size_t site, double t) const { return at(t)[site]; }
};

using BinarySpinTrajectory = ForwardTrajectory<std::uint8_t>;
using LevelTrajectory = ForwardTrajectory<int>;

BinarySpinTrajectory forward_spin(const TorusWindow& w, double tau, double gamma, MarkStore& store);
LevelTrajectory forward_level(const TorusWindow& w, double tau, const std::vector<int>& kappa,
                              const LevelSchedule& schedule, MarkStore& store);

using UpdateFn = std::function<double(std::span<const double>, double)>;
// Glauber dynamics on the torus from xi over marks in (tau, tEnd].
std::vector<double> forward_glauber(const TorusWindow& w, const std::vector<double>& xi, double tau, double tEnd,
                                    MarkStore& store, const UpdateFn& update);

// Backward trajectory: events in decreasing time; states[k] is the
// configuration after processing the k latest events (states[0] at time 0).
struct DualTrajectory {
  double tau = 0.0;
  std::vector<TorusEvent> events;
  std::vector<std::vector<int>> states;
  std::optional<double> extinction;  // binary dual: time at which the set became empty

  const std::vector<int>& final_state() const { return states.back(); }
};

DualTrajectory backward_dual_binary(const TorusWindow& w, double tau, double gamma, MarkStore& store,
                                    std::size_t origin = 0);
DualTrajectory backward_dual_level(const TorusWindow& w, double tau, const LevelSchedule& schedule, MarkStore& store,
                                   std::size_t origin = 0);
// Same process read off minimal active-path lengths and wet active paths.
DualTrajectory backward_dual_level_paths(const TorusWindow& w, double tau, const LevelSchedule& schedule,
                                         MarkStore& store, std::size_t origin = 0);

struct DualityReport {
  double pOmega = 0.0;
  double pSigma = 0.0;
  double se = 0.0;
  bool passes = false;
  std::int64_t trials = 0;
  std::int64_t eventMismatches = 0;     // shared marks: {omega_0(0)=0} vs dual event
  std::int64_t pathwiseViolations = 0;  // lemma checks on shared marks
};

std::uint64_t trial_seed(std::uint64_t masterSeed, std::uint64_t index);

DualityReport duality_check_binary(const TorusWindow& w, double tau, double gamma, std::int64_t trials,
                                   std::uint64_t seed);
DualityReport duality_check_level(const TorusWindow& w, double tau, const std::vector<int>& kappa,
                                  const LevelSchedule& schedule, std::int64_t trials, std::uint64_t seed);

struct RateEstimate {
  std::string label;
  double empirical = 0.0;
  double se = 0.0;
  double expected = 0.0;
};

double binary_rate(int own, bool someNeighborOne, double gamma);
double level_rate(int k, int m, const LevelSchedule& schedule);

// Jump rates out of frozen configurations, driven by `epochs` marks of one site.
std::vector<RateEstimate> measure_spin_rates(double gamma, std::int64_t epochs, std::uint64_t seed);
std::vector<RateEstimate> measure_level_rates(const LevelSchedule& schedule, std::int64_t epochs, std::uint64_t seed,
                                              int maxK = 5);

}  // namespace gmrf
