#include "gmrf/sampler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace gmrf {

const char* to_string(SampleStatus s) {
  switch (s) {
    case SampleStatus::kOk:
      return "ok";
    case SampleStatus::kBudgetExceeded:
      return "budget_exceeded";
    case SampleStatus::kDepthExceeded:
      return "depth_exceeded";
  }
  return "unknown";
}

namespace {

struct DepNode {
  UpdateMark mark;
  int dist = 0;
  bool open = false;
  std::array<std::int64_t, 2 * kMaxDim> kids{};
};

std::vector<std::size_t> by_time(const std::vector<DepNode>& nodes) {
  std::vector<std::size_t> order(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (nodes[a].mark.time != nodes[b].mark.time) return nodes[a].mark.time < nodes[b].mark.time;
    return nodes[a].mark.key < nodes[b].mark.key;
  });
  return order;
}

}  // namespace

TruncatedDraw sample_truncated(MarkStore& store, const FlatCoupler& coupler, const Site& site,
                               const TruncatedOptions& options, MarkValueCache* cache) {
  const int d = coupler.d();
  if (store.dim() != d) throw std::invalid_argument("sample_truncated: store and coupler dimensions differ");
  if (!options.force && !(coupler.gamma() > 1.0 - 1.0 / (2.0 * d)))
    throw std::domain_error("sample_truncated: high-noise gate fails (gamma <= 1 - 1/|B|); set force to run anyway");
  const NeighborhoodSpec spec(d);
  const std::size_t fan = spec.size();
  const double gamma = coupler.gamma();

  TruncatedDraw out;
  std::vector<DepNode> nodes;
  std::unordered_map<MarkKey, std::size_t> index;
  auto add = [&](const UpdateMark& m, int dist) {
    auto [it, fresh] = index.emplace(m.key, nodes.size());
    if (fresh) {
      DepNode n;
      n.mark = m;
      n.dist = dist;
      n.open = m.u > gamma;
      n.kids.fill(-1);
      nodes.push_back(n);
    }
    return it->second;
  };
  auto fill_report = [&] {
    out.report.marksRevealed = static_cast<std::int64_t>(nodes.size());
    for (const auto& n : nodes) {
      out.report.depth = std::max(out.report.depth, n.dist);
      out.report.radius = std::max(out.report.radius, l1_norm(n.mark.site - site));
    }
  };

  add(store.last_mark_before(site, 0.0), 0);
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    if (!nodes[q].open) continue;
    const UpdateMark parent = nodes[q].mark;
    const int dist = nodes[q].dist;
    for (std::size_t k = 0; k < fan; ++k) {
      UpdateMark c = store.last_mark_strictly_before(parent.site + spec.offsets()[k], parent.time);
      if (index.find(c.key) == index.end() && static_cast<std::int64_t>(nodes.size()) >= options.budget) {
        fill_report();
        out.status = SampleStatus::kBudgetExceeded;
        out.diagnostic = "mark budget exceeded after revealing " + std::to_string(nodes.size()) + " marks";
        return out;
      }
      nodes[q].kids[k] = static_cast<std::int64_t>(add(c, dist + 1));
    }
  }
  fill_report();

  std::vector<double> value(nodes.size());
  std::vector<double> eta(fan);
  for (std::size_t i : by_time(nodes)) {
    const DepNode& n = nodes[i];
    if (cache) {
      auto it = cache->find(n.mark.key);
      if (it != cache->end()) {
        value[i] = it->second;
        continue;
      }
    }
    if (!n.open) {
      value[i] = coupler.common_value(n.mark.u);
    } else {
      for (std::size_t k = 0; k < fan; ++k) eta[k] = value[static_cast<std::size_t>(n.kids[k])];
      value[i] = coupler.update(eta, n.mark.u);
    }
    if (cache) cache->emplace(n.mark.key, value[i]);
  }
  out.value = value[0];
  return out;
}

double dryness_tail(const LevelSchedule& schedule, int bSize, int D) {
  const double lb = std::log(static_cast<double>(bSize));
  double total = 0.0;
  for (int k = std::max(D, 0); k < D + 256; ++k) {
    double term = std::exp(k * lb + schedule.log_tail_prob(k));
    total += term;
    if (k > D && (term == 0.0 || term < 1e-17 * total)) break;
  }
  return total;
}

GaussianDraw sample_gaussian(MarkStore& store, const StratifiedCoupler& coupler, const Site& site,
                             const GaussianOptions& options, MarkValueCache* cache) {
  const int d = coupler.d();
  if (store.dim() != d) throw std::invalid_argument("sample_gaussian: store and coupler dimensions differ");
  if (!(options.deltaFail > 0.0)) throw std::invalid_argument("sample_gaussian: deltaFail must be positive");
  GaussianDraw out;
  const UpdateMark root = store.last_mark_before(site, 0.0);
  if (coupler.epsilon() == 0.0) {
    out.value = coupler.update_zero(root.u);
    out.report.marksRevealed = 1;
    out.cutsetSize = 1;
    return out;
  }

  const NeighborhoodSpec spec(d);
  const std::size_t fan = spec.size();
  const LevelSchedule& schedule = coupler.schedule();
  const int bSize = static_cast<int>(fan);

  int D = 1;
  while (dryness_tail(schedule, bSize, D) > options.deltaFail) ++D;
  int H = D;

  ConeDag dag(store, root, spec, static_cast<std::size_t>(std::max<std::int64_t>(options.budget, 1)));
  std::vector<int> K;
  std::vector<int> W;
  std::vector<char> role;  // 0 untouched, 1 wet above cutset, 2 cutset
  auto fail = [&](SampleStatus st, std::string msg) {
    out.status = st;
    out.diagnostic = std::move(msg);
    out.report.marksRevealed = static_cast<std::int64_t>(dag.size());
    out.report.depth = dag.depth();
    out.report.radius = dag.max_radius(site);
    return out;
  };

  std::vector<std::size_t> order;
  for (;;) {
    try {
      dag.explore(H);
    } catch (const BudgetExceeded& e) {
      return fail(SampleStatus::kBudgetExceeded, std::string(e.what()) + " at depth " + std::to_string(e.depthReached));
    }
    for (std::size_t i = K.size(); i < dag.size(); ++i) K.push_back(reach(dag.node(i).mark, schedule));
    order = dag.time_order();
    W.assign(dag.size(), 0);
    for (std::size_t i : order) {
      int w = K[i];
      if (dag.node(i).expanded)
        for (std::size_t k = 0; k < fan; ++k) w = std::max(w, W[static_cast<std::size_t>(dag.child(i, k))] - 1);
      W[i] = w;
    }

    role.assign(dag.size(), 0);
    std::vector<std::size_t> stack{0};
    bool deeper = false;
    std::size_t cut = 0;
    int unresolvedDepth = 0;
    while (!stack.empty()) {
      std::size_t i = stack.back();
      stack.pop_back();
      if (role[i]) continue;
      const auto& n = dag.node(i);
      if (W[i] > 0) {
        role[i] = 1;
        if (!n.expanded) {
          deeper = true;
          unresolvedDepth = std::max(unresolvedDepth, n.dist);
          continue;
        }
        for (std::size_t k = 0; k < fan; ++k) stack.push_back(static_cast<std::size_t>(dag.child(i, k)));
      } else if (n.dist + D <= H) {
        role[i] = 2;
        ++cut;
      } else {
        role[i] = 3;
        deeper = true;
        unresolvedDepth = std::max(unresolvedDepth, n.dist);
      }
    }
    if (deeper) {
      if (H + 1 > options.maxDepth) {
        std::size_t wet = static_cast<std::size_t>(std::count(role.begin(), role.end(), 1));
        return fail(SampleStatus::kDepthExceeded, "dryness certificate unattainable within depth " +
                                                      std::to_string(options.maxDepth) + " (wet region " +
                                                      std::to_string(wet) + " marks, deepest unresolved mark at depth " +
                                                      std::to_string(unresolvedDepth) + ")");
      }
      ++H;
      continue;
    }
    double residual = static_cast<double>(cut) * dryness_tail(schedule, bSize, D);
    if (residual > options.deltaFail) {
      ++D;
      H = std::max(H, D);
      continue;
    }
    out.certificate = {D, residual, cut};
    out.cutsetSize = cut;
    break;
  }

  // propagate from the cutset towards the root
  std::vector<double> value(dag.size(), 0.0);
  std::vector<int> wetPath(dag.size(), 0);
  std::vector<double> eta(fan);
  for (std::size_t i : order) {
    if (role[i] == 0) continue;
    const auto& n = dag.node(i);
    if (role[i] == 2) {
      out.maxCutsetDepth = std::max(out.maxCutsetDepth, n.dist);
    } else {
      ++out.wetCount;
      out.maxWetDepth = std::max(out.maxWetDepth, n.dist);
      int best = 0;
      for (std::size_t k = 0; k < fan; ++k) best = std::max(best, wetPath[static_cast<std::size_t>(dag.child(i, k))]);
      wetPath[i] = best + 1;
    }
    if (cache) {
      auto it = cache->find(n.mark.key);
      if (it != cache->end()) {
        value[i] = it->second;
        continue;
      }
    }
    if (role[i] == 2) {
      value[i] = coupler.common_value(n.mark.u);
    } else {
      for (std::size_t k = 0; k < fan; ++k) eta[k] = value[static_cast<std::size_t>(dag.child(i, k))];
      value[i] = coupler.update(eta, n.mark.u);
    }
    if (cache) cache->emplace(n.mark.key, value[i]);
  }
  out.longestWetPath = wetPath[0];
  out.value = value[0];
  out.report.marksRevealed = static_cast<std::int64_t>(dag.size());
  out.report.depth = dag.depth();
  out.report.radius = dag.max_radius(site);
  return out;
}

double sample_l_dependent(MarkStore& store, const StratifiedCoupler& coupler, const Site& site, int l,
                          std::size_t nodeCap) {
  if (l < 0) throw std::invalid_argument("sample_l_dependent: l must be >= 0");
  const int h = l / 2;
  const NeighborhoodSpec spec(coupler.d());
  const std::size_t fan = spec.size();
  ConeDag dag = explore_cone(store, store.last_mark_before(site, 0.0), h, spec, nodeCap);
  std::vector<double> value(dag.size(), 0.0);
  std::vector<double> eta(fan);
  for (std::size_t i : dag.time_order()) {
    const auto& n = dag.node(i);
    if (n.dist >= h || !n.expanded) {
      value[i] = coupler.update_zero(n.mark.u);
      continue;
    }
    for (std::size_t k = 0; k < fan; ++k) {
      std::int64_t c = dag.child(i, k);
      eta[k] = c < 0 ? 0.0 : value[static_cast<std::size_t>(c)];
    }
    value[i] = coupler.update(eta, n.mark.u);
  }
  return value[0];
}

FieldSample sample_window(MarkStore& store, const std::vector<Site>& window, const WindowOptions& options,
                          const FlatCoupler* flat, const StratifiedCoupler* stratified) {
  FieldSample s;
  s.d = store.dim();
  s.window = window;
  s.seed = store.seed();
  MarkValueCache cache;
  MarkValueCache* shared = options.shareCache ? &cache : nullptr;
  for (const Site& site : window) {
    switch (options.mode) {
      case SampleMode::kTruncated: {
        if (!flat) throw std::invalid_argument("sample_window: truncated mode needs a flat coupler");
        TruncatedDraw r = sample_truncated(store, *flat, site, options.truncated, shared);
        s.reports.push_back(r.report);
        s.values.push_back(r.value.value_or(std::nan("")));
        if (r.status != SampleStatus::kOk) s.status = r.status;
        break;
      }
      case SampleMode::kGaussian: {
        if (!stratified) throw std::invalid_argument("sample_window: gaussian mode needs a stratified coupler");
        GaussianDraw r = sample_gaussian(store, *stratified, site, options.gaussian, shared);
        s.reports.push_back(r.report);
        s.values.push_back(r.value.value_or(std::nan("")));
        if (r.status != SampleStatus::kOk) s.status = r.status;
        break;
      }
      case SampleMode::kLDependent: {
        if (!stratified) throw std::invalid_argument("sample_window: l-dependent mode needs a stratified coupler");
        s.values.push_back(sample_l_dependent(store, *stratified, site, options.l));
        CodingReport rep;
        rep.depth = options.l / 2;
        s.reports.push_back(rep);
        break;
      }
    }
    s.maxDepth = std::max(s.maxDepth, s.reports.back().depth);
  }
  s.marksRevealed = static_cast<std::int64_t>(store.marks_generated());
  return s;
}

namespace {
const char* kCoordNames[] = {"x0", "x1", "x2"};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

void write_field_csv(std::ostream& os, const FieldSample& s) {
  for (int i = 0; i < s.d; ++i) os << kCoordNames[i] << ',';
  os << "value\n";
  for (std::size_t k = 0; k < s.window.size(); ++k) {
    for (int i = 0; i < s.d; ++i) os << s.window[k][i] << ',';
    os << fmt(s.values[k]) << '\n';
  }
}

std::string field_json(const FieldSample& s) {
  nlohmann::ordered_json j;
  j["d"] = s.d;
  auto& sites = j["window"] = nlohmann::ordered_json::array();
  for (const auto& w : s.window) {
    auto c = nlohmann::ordered_json::array();
    for (int i = 0; i < s.d; ++i) c.push_back(w[i]);
    sites.push_back(c);
  }
  j["values"] = s.values;
  j["meta"] = {{"seed", s.seed},
               {"marks_revealed", s.marksRevealed},
               {"max_depth", s.maxDepth},
               {"status", to_string(s.status)}};
  return j.dump();
}

void write_coding_reports_csv(std::ostream& os, const std::vector<std::int64_t>& replicas,
                              const std::vector<CodingReport>& reports) {
  os << "replica,radius,depth,marks\n";
  for (std::size_t k = 0; k < reports.size(); ++k)
    os << replicas[k] << ',' << reports[k].radius << ',' << reports[k].depth << ',' << reports[k].marksRevealed << '\n';
}

}  // namespace gmrf
