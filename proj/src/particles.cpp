#include "gmrf/particles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gmrf/philox.hpp"

namespace gmrf {

TorusWindow::TorusWindow(int d, int side) : d_(d), side_(side) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("torus dimension must be 1..3");
  if (side < 3) throw std::invalid_argument("torus side must be at least 3");
  size_ = 1;
  for (int k = 0; k < d; ++k) size_ *= static_cast<std::size_t>(side);
  NeighborhoodSpec spec(d);
  nbr_.resize(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    const Site s = site(i);
    for (const Site& off : spec.offsets()) nbr_[i].push_back(index(s + off));
  }
}

Site TorusWindow::site(std::size_t index) const {
  Site s{};
  for (int k = d_ - 1; k >= 0; --k) {
    s.x[k] = static_cast<std::int32_t>(index % side_);
    index /= side_;
  }
  return s;
}

std::size_t TorusWindow::index(const Site& s) const {
  std::size_t idx = 0;
  for (int k = 0; k < d_; ++k) {
    const int c = ((s.x[k] % side_) + side_) % side_;
    idx = idx * side_ + static_cast<std::size_t>(c);
  }
  return idx;
}

std::vector<TorusEvent> collect_events(const TorusWindow& w, MarkStore& store, double tau, double tEnd) {
  std::vector<TorusEvent> ev;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (const UpdateMark& m : store.marks_since(w.site(i), tau)) {
      if (m.time > tEnd) continue;
      ev.push_back({m.time, i, m.u, m.index});
    }
  }
  std::sort(ev.begin(), ev.end(), [](const TorusEvent& a, const TorusEvent& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.site != b.site) return a.site < b.site;
    return a.markIndex < b.markIndex;
  });
  return ev;
}

int binary_rule(bool someNeighborOne, double u, double gamma) {
  if (u <= gamma) return 0;
  return someNeighborOne ? 1 : 0;
}

int level_rule(int m, double u, const LevelSchedule& schedule) {
  if (m == kSpinInf) return kSpinInf;
  const int k = reach_u(u, schedule);
  if (m <= 0) return k;
  return std::max(m - 1, k);
}

template <class Spin>
const std::vector<Spin>& ForwardTrajectory<Spin>::at(double t) const {
  auto it = std::upper_bound(events.begin(), events.end(), t,
                             [](double v, const TorusEvent& e) { return v < e.time; });
  return states[static_cast<std::size_t>(it - events.begin())];
}

template struct ForwardTrajectory<std::uint8_t>;
template struct ForwardTrajectory<int>;

BinarySpinTrajectory forward_spin(const TorusWindow& w, double tau, double gamma, MarkStore& store) {
  BinarySpinTrajectory tr;
  tr.tau = tau;
  tr.events = collect_events(w, store, tau);
  tr.states.reserve(tr.events.size() + 1);
  tr.states.emplace_back(w.size(), std::uint8_t{1});
  for (const TorusEvent& e : tr.events) {
    std::vector<std::uint8_t> next = tr.states.back();
    bool some = false;
    for (std::size_t j : w.neighbors(e.site)) some = some || next[j] == 1;
    next[e.site] = static_cast<std::uint8_t>(binary_rule(some, e.u, gamma));
    tr.states.push_back(std::move(next));
  }
  return tr;
}

LevelTrajectory forward_level(const TorusWindow& w, double tau, const std::vector<int>& kappa,
                              const LevelSchedule& schedule, MarkStore& store) {
  if (kappa.size() != w.size()) throw std::invalid_argument("initial configuration has wrong size");
  LevelTrajectory tr;
  tr.tau = tau;
  tr.events = collect_events(w, store, tau);
  tr.states.reserve(tr.events.size() + 1);
  tr.states.push_back(kappa);
  for (const TorusEvent& e : tr.events) {
    std::vector<int> next = tr.states.back();
    int m = 0;
    for (std::size_t j : w.neighbors(e.site)) m = std::max(m, next[j]);
    next[e.site] = level_rule(m, e.u, schedule);
    tr.states.push_back(std::move(next));
  }
  return tr;
}

std::vector<double> forward_glauber(const TorusWindow& w, const std::vector<double>& xi, double tau, double tEnd,
                                    MarkStore& store, const UpdateFn& update) {
  if (xi.size() != w.size()) throw std::invalid_argument("initial field has wrong size");
  std::vector<double> x = xi;
  std::vector<double> eta;
  for (const TorusEvent& e : collect_events(w, store, tau, tEnd)) {
    if (e.time <= tau) continue;
    eta.clear();
    for (std::size_t j : w.neighbors(e.site)) eta.push_back(x[j]);
    x[e.site] = update(eta, e.u);
  }
  return x;
}

namespace {

std::vector<TorusEvent> descending(std::vector<TorusEvent> ev) {
  std::reverse(ev.begin(), ev.end());
  return ev;
}

}  // namespace

DualTrajectory backward_dual_binary(const TorusWindow& w, double tau, double gamma, MarkStore& store,
                                    std::size_t origin) {
  DualTrajectory tr;
  tr.tau = tau;
  tr.events = descending(collect_events(w, store, tau));
  std::vector<int> s(w.size(), 0);
  s[origin] = 1;
  std::size_t live = 1;
  tr.states.push_back(s);
  for (const TorusEvent& e : tr.events) {
    if (s[e.site] == 1) {
      s[e.site] = 0;
      --live;
      if (e.u > gamma) {
        for (std::size_t j : w.neighbors(e.site))
          if (s[j] == 0) {
            s[j] = 1;
            ++live;
          }
      }
      if (live == 0 && !tr.extinction) tr.extinction = e.time;
    }
    tr.states.push_back(s);
  }
  return tr;
}

DualTrajectory backward_dual_level(const TorusWindow& w, double tau, const LevelSchedule& schedule, MarkStore& store,
                                   std::size_t origin) {
  DualTrajectory tr;
  tr.tau = tau;
  tr.events = descending(collect_events(w, store, tau));
  std::vector<int> s(w.size(), kSpinInf);
  s[origin] = 0;
  tr.states.push_back(s);
  for (const TorusEvent& e : tr.events) {
    const int cur = s[e.site];
    if (cur != kSpinInf) {
      const int k = (cur != kSpinNegInf && schedule.u_le_q(e.u, cur)) ? cur + 1 : kSpinNegInf;
      s[e.site] = kSpinInf;
      for (std::size_t j : w.neighbors(e.site)) s[j] = std::min(s[j], k);
    }
    tr.states.push_back(s);
  }
  return tr;
}

DualTrajectory backward_dual_level_paths(const TorusWindow& w, double tau, const LevelSchedule& schedule,
                                         MarkStore& store, std::size_t origin) {
  DualTrajectory tr;
  tr.tau = tau;
  tr.events = descending(collect_events(w, store, tau));
  const std::size_t n = tr.events.size();

  // per-site event indices, latest first
  std::vector<std::vector<std::size_t>> bySite(w.size());
  for (std::size_t e = 0; e < n; ++e) bySite[tr.events[e].site].push_back(e);
  auto next_below = [&](std::size_t site, double t) -> std::ptrdiff_t {
    for (std::size_t e : bySite[site])
      if (tr.events[e].time < t) return static_cast<std::ptrdiff_t>(e);
    return -1;
  };

  std::vector<std::vector<std::ptrdiff_t>> kids(n);
  for (std::size_t e = 0; e < n; ++e)
    for (std::size_t j : w.neighbors(tr.events[e].site)) kids[e].push_back(next_below(j, tr.events[e].time));

  std::vector<int> dist(n, -1);
  const std::ptrdiff_t root = bySite[origin].empty() ? -1 : static_cast<std::ptrdiff_t>(bySite[origin].front());
  if (root >= 0) {
    std::vector<std::size_t> queue{static_cast<std::size_t>(root)};
    dist[root] = 0;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::size_t e = queue[q];
      for (std::ptrdiff_t c : kids[e])
        if (c >= 0 && dist[c] < 0) {
          dist[c] = dist[e] + 1;
          queue.push_back(static_cast<std::size_t>(c));
        }
    }
  }

  // events are in decreasing time, so parents come before children
  std::vector<char> wetIn(n, 0), wet(n, 0);
  for (std::size_t e = 0; e < n; ++e) {
    if (dist[e] < 0) continue;
    wet[e] = wetIn[e] || !schedule.u_le_q(tr.events[e].u, dist[e]);
    if (wet[e])
      for (std::ptrdiff_t c : kids[e])
        if (c >= 0) wetIn[c] = 1;
  }

  struct Segment {
    std::size_t site;
    double lo, hi;
    int length;
    bool wet;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Segment> segs;
  segs.push_back({origin, root >= 0 ? tr.events[root].time : -inf, inf, 0, false});
  for (std::size_t e = 0; e < n; ++e) {
    if (dist[e] < 0) continue;
    const auto& nb = w.neighbors(tr.events[e].site);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const std::ptrdiff_t c = kids[e][k];
      segs.push_back({nb[k], c >= 0 ? tr.events[c].time : -inf, tr.events[e].time, dist[e] + 1, wet[e] != 0});
    }
  }

  auto state_at = [&](double t) {
    std::vector<int> s(w.size(), kSpinInf);
    for (const Segment& g : segs) {
      if (!(g.lo < t && t < g.hi)) continue;
      if (g.wet)
        s[g.site] = kSpinNegInf;
      else if (s[g.site] != kSpinNegInf)
        s[g.site] = std::min(s[g.site], g.length);
    }
    return s;
  };
  for (std::size_t k = 0; k <= n; ++k) {
    const double upper = k == 0 ? 0.0 : tr.events[k - 1].time;
    const double lower = k == n ? tau : tr.events[k].time;
    tr.states.push_back(state_at(0.5 * (upper + lower)));
  }
  return tr;
}

std::uint64_t trial_seed(std::uint64_t masterSeed, std::uint64_t index) { return masterSeed ^ splitmix64(index); }

namespace {

DualityReport finish_report(std::int64_t hitsOmega, std::int64_t hitsSigma, std::int64_t trials) {
  DualityReport r;
  r.trials = trials;
  const double n = static_cast<double>(trials);
  r.pOmega = hitsOmega / n;
  r.pSigma = hitsSigma / n;
  r.se = std::sqrt(r.pOmega * (1 - r.pOmega) / n + r.pSigma * (1 - r.pSigma) / n);
  const double diff = std::abs(r.pOmega - r.pSigma);
  r.passes = r.se > 0 ? diff <= 3.0 * r.se : diff == 0.0;
  return r;
}

}  // namespace

DualityReport duality_check_binary(const TorusWindow& w, double tau, double gamma, std::int64_t trials,
                                   std::uint64_t seed) {
  if (trials < 10000) throw std::invalid_argument("duality checks need at least 1e4 trials");
  std::int64_t hitO = 0, hitS = 0, mismatch = 0, violations = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    MarkStore a(trial_seed(seed, 2 * t), w.d());
    MarkStore b(trial_seed(seed, 2 * t + 1), w.d());
    const auto fw = forward_spin(w, tau, gamma, a);
    const bool omegaZero = fw.final_state()[0] == 0;
    hitO += omegaZero;
    const auto dualB = backward_dual_binary(w, tau, gamma, b);
    hitS += dualB.extinction.has_value();

    const auto dualA = backward_dual_binary(w, tau, gamma, a);
    if (omegaZero != dualA.extinction.has_value()) ++mismatch;
    if (omegaZero) {
      const std::size_t K = fw.events.size();
      for (std::size_t k = 0; k <= K; ++k) {
        const auto& om = fw.states[k];
        const auto& sg = dualA.states[K - k];
        for (std::size_t i = 0; i < w.size(); ++i)
          if (om[i] == 1 && sg[i] == 1) {
            ++violations;
            k = K;
            break;
          }
      }
    }
  }
  auto r = finish_report(hitO, hitS, trials);
  r.eventMismatches = mismatch;
  r.pathwiseViolations = violations;
  r.passes = r.passes && mismatch == 0 && violations == 0;
  return r;
}

DualityReport duality_check_level(const TorusWindow& w, double tau, const std::vector<int>& kappa,
                                  const LevelSchedule& schedule, std::int64_t trials, std::uint64_t seed) {
  if (trials < 10000) throw std::invalid_argument("duality checks need at least 1e4 trials");
  auto dominated = [&](const std::vector<int>& dual) {
    for (std::size_t i = 0; i < w.size(); ++i)
      if (kappa[i] > dual[i]) return false;
    return true;
  };
  std::int64_t hitO = 0, hitS = 0, mismatch = 0, violations = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    MarkStore a(trial_seed(seed, 2 * t), w.d());
    MarkStore b(trial_seed(seed, 2 * t + 1), w.d());
    const auto fw = forward_level(w, tau, kappa, schedule, a);
    const bool omegaZero = fw.final_state()[0] == 0;
    hitO += omegaZero;
    hitS += dominated(backward_dual_level(w, tau, schedule, b).final_state());

    const auto dualA = backward_dual_level(w, tau, schedule, a);
    if (omegaZero != dominated(dualA.final_state())) ++mismatch;
    if (omegaZero) {
      const std::size_t K = fw.events.size();
      for (std::size_t k = 0; k <= K; ++k) {
        const auto& om = fw.states[k];
        const auto& sg = dualA.states[K - k];
        bool bad = false;
        for (std::size_t i = 0; i < w.size() && !bad; ++i) bad = om[i] > sg[i];
        if (bad) {
          ++violations;
          break;
        }
      }
    }
  }
  auto r = finish_report(hitO, hitS, trials);
  r.eventMismatches = mismatch;
  r.pathwiseViolations = violations;
  r.passes = r.passes && mismatch == 0 && violations == 0;
  return r;
}

double binary_rate(int own, bool someNeighborOne, double gamma) {
  if (own == 1) return gamma + (someNeighborOne ? 0.0 : 1.0 - gamma);
  return someNeighborOne ? 1.0 - gamma : 0.0;
}

double level_rate(int k, int m, const LevelSchedule& schedule) {
  if (m == kSpinInf) return k == kSpinInf ? 1.0 : 0.0;
  if (k == kSpinInf) return 0.0;
  if (k == 0) return m <= 1 ? schedule.level_prob(0) : 0.0;
  if (m == k + 1) return schedule.level_prob(k);
  if (m <= k) return schedule.level_prob(k) - schedule.level_prob(k - 1);
  return 0.0;
}

namespace {

std::vector<UpdateMark> rate_marks(std::int64_t epochs, std::uint64_t seed, double& horizon) {
  if (epochs < 1) throw std::invalid_argument("epochs must be positive");
  MarkStore store(seed, 1);
  std::vector<UpdateMark> marks;
  marks.reserve(static_cast<std::size_t>(epochs));
  for (std::int64_t k = 0; k < epochs; ++k) marks.push_back(store.mark(Site{0}, static_cast<std::uint32_t>(k)));
  horizon = -marks.back().time;
  return marks;
}

RateEstimate make_rate(std::string label, std::int64_t count, double horizon, double expected) {
  RateEstimate r;
  r.label = std::move(label);
  r.empirical = count / horizon;
  r.expected = expected;
  r.se = std::sqrt(std::max(expected, r.empirical) / horizon);
  return r;
}

std::string spin_label(int s) {
  if (s == kSpinInf) return "inf";
  return std::to_string(s);
}

}  // namespace

std::vector<RateEstimate> measure_spin_rates(double gamma, std::int64_t epochs, std::uint64_t seed) {
  double T = 0;
  const auto marks = rate_marks(epochs, seed, T);
  std::vector<RateEstimate> out;
  for (int own : {0, 1})
    for (bool some : {false, true}) {
      std::int64_t jumps = 0;
      for (const auto& m : marks) jumps += binary_rule(some, m.u, gamma) != own;
      out.push_back(make_rate("own=" + std::to_string(own) + ",neighbor_one=" + (some ? "1" : "0"), jumps, T,
                              binary_rate(own, some, gamma)));
    }
  return out;
}

std::vector<RateEstimate> measure_level_rates(const LevelSchedule& schedule, std::int64_t epochs, std::uint64_t seed,
                                              int maxK) {
  double T = 0;
  const auto marks = rate_marks(epochs, seed, T);
  std::vector<int> targets;
  for (int k = 0; k <= maxK; ++k) targets.push_back(k);
  targets.push_back(kSpinInf);
  std::vector<RateEstimate> out;
  for (int m : {0, 1, 2, kSpinInf}) {
    std::vector<int> next;
    next.reserve(marks.size());
    for (const auto& mk : marks) next.push_back(level_rule(m, mk.u, schedule));
    for (int k : targets) {
      const std::int64_t count = std::count(next.begin(), next.end(), k);
      out.push_back(make_rate("m=" + spin_label(m) + ",k=" + spin_label(k), count, T, level_rate(k, m, schedule)));
    }
  }
  return out;
}

}  // namespace gmrf
