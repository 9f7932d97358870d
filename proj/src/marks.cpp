#include "gmrf/marks.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "gmrf/philox.hpp"

namespace gmrf {

MarkStore::MarkStore(std::uint64_t seed, int d, Site keyOffset) : seed_(seed), d_(d), keyOffset_(keyOffset) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("MarkStore: d out of range");
}

std::uint32_t MarkStore::stream_id(const Site& site) {
  auto it = ids_.find(site);
  if (it != ids_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(streams_.size());
  streams_.push_back(Stream{site, {}, {}});
  ids_.emplace(site, id);
  return id;
}

void MarkStore::extend(Stream& s, std::uint32_t, std::size_t count) {
  const Site k = s.site + keyOffset_;
  const PhiloxKey key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  while (s.times.size() < count) {
    auto index = static_cast<std::uint32_t>(s.times.size());
    auto r = philox4x32_10({static_cast<std::uint32_t>(k[0]), static_cast<std::uint32_t>(k[1]),
                            static_cast<std::uint32_t>(k[2]), index},
                           key);
    double gap = -std::log1p(-to_open_unit(r[0], r[1]));
    double prev = s.times.empty() ? 0.0 : s.times.back();
    double t = prev - gap;
    if (!(t < prev)) t = std::nextafter(prev, -INFINITY);
    s.times.push_back(t);
    s.us.push_back(to_unit(r[2], r[3]));
    ++generated_;
  }
}

UpdateMark MarkStore::make(std::uint32_t id, std::uint32_t index) const {
  const Stream& s = streams_[id];
  UpdateMark m;
  m.site = s.site;
  m.time = s.times[index];
  m.u = s.us[index];
  m.index = index;
  m.key = (static_cast<MarkKey>(id) << 32) | index;
  return m;
}

UpdateMark MarkStore::mark(const Site& site, std::uint32_t index) {
  auto id = stream_id(site);
  extend(streams_[id], id, static_cast<std::size_t>(index) + 1);
  return make(id, index);
}

UpdateMark MarkStore::last_mark_before(const Site& site, double t) { return first_mark_below(site, t, false); }

UpdateMark MarkStore::last_mark_strictly_before(const Site& site, double t) { return first_mark_below(site, t, true); }

UpdateMark MarkStore::first_mark_below(const Site& site, double t, bool strict) {
  auto id = stream_id(site);
  auto below = [=](double x) { return strict ? x < t : x <= t; };
  std::size_t n = std::max<std::size_t>(streams_[id].times.size(), 1);
  extend(streams_[id], id, n);
  while (!below(streams_[id].times.back())) {
    n = n * 2 + 1;
    extend(streams_[id], id, n);
  }
  const auto& times = streams_[id].times;
  // times decrease along the stream
  auto it = std::partition_point(times.begin(), times.end(), [&](double x) { return !below(x); });
  return make(id, static_cast<std::uint32_t>(it - times.begin()));
}

std::vector<UpdateMark> MarkStore::marks_since(const Site& site, double tau) {
  std::vector<UpdateMark> out;
  for (std::uint32_t k = 0;; ++k) {
    UpdateMark m = mark(site, k);
    if (m.time < tau) break;
    out.push_back(m);
  }
  return out;
}

void MarkStore::write_trace(std::ostream& os) const {
  static const char* names[] = {"x0", "x1", "x2"};
  for (int i = 0; i < d_; ++i) os << names[i] << ',';
  os << "time,u,index\n";
  std::vector<std::uint32_t> order(streams_.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return streams_[a].site < streams_[b].site; });
  char buf[64];
  for (auto id : order) {
    const Stream& s = streams_[id];
    for (std::size_t k = 0; k < s.times.size(); ++k) {
      for (int i = 0; i < d_; ++i) os << s.site[i] << ',';
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,", s.times[k], s.us[k]);
      os << buf << k << '\n';
    }
  }
}

std::vector<UpdateMark> children(MarkStore& store, const UpdateMark& mark, const NeighborhoodSpec& spec) {
  std::vector<UpdateMark> out;
  out.reserve(spec.size());
  for (const auto& b : spec.offsets()) out.push_back(store.last_mark_strictly_before(mark.site + b, mark.time));
  return out;
}

int reach_u(double u, const LevelSchedule& schedule) {
  for (int k = 0; k <= 64; ++k)
    if (schedule.u_le_q(u, k)) return k;
  throw std::runtime_error("reach: K > 64 (schedule misuse)");
}

int reach(const UpdateMark& mark, const LevelSchedule& schedule) { return reach_u(mark.u, schedule); }

ConeDag::ConeDag(MarkStore& store, const UpdateMark& root, const NeighborhoodSpec& spec, std::size_t nodeCap)
    : store_(&store), spec_(&spec), fanout_(spec.size()), cap_(nodeCap) {
  nodes_.push_back(Node{root, 0, false});
  childIdx_.assign(fanout_, -1);
  index_.emplace(root.key, 0);
  perDepth_.push_back(1);
  frontier_.push_back(0);
}

void ConeDag::explore(int maxDepth) {
  if (maxDepth < 0) throw std::invalid_argument("explore_cone: maxDepth must be >= 0");
  while (depth_ < maxDepth) {
    std::vector<std::size_t> next;
    for (std::size_t i : frontier_) {
      const UpdateMark parent = nodes_[i].mark;
      for (std::size_t k = 0; k < fanout_; ++k) {
        UpdateMark c = store_->last_mark_strictly_before(parent.site + spec_->offsets()[k], parent.time);
        auto [it, fresh] = index_.emplace(c.key, nodes_.size());
        if (fresh) {
          if (nodes_.size() >= cap_) {
            index_.erase(it);
            throw BudgetExceeded("explore_cone: node budget exceeded", nodes_.size(), depth_);
          }
          nodes_.push_back(Node{c, depth_ + 1, false});
          childIdx_.resize(childIdx_.size() + fanout_, -1);
          next.push_back(nodes_.size() - 1);
        }
        childIdx_[i * fanout_ + k] = static_cast<std::int64_t>(it->second);
      }
      nodes_[i].expanded = true;
    }
    ++depth_;
    perDepth_.push_back(next.size());
    frontier_ = std::move(next);
    if (frontier_.empty()) break;
  }
  if (frontier_.empty()) depth_ = std::max(depth_, maxDepth);
}

std::int64_t ConeDag::child(std::size_t i, std::size_t k) const { return childIdx_[i * fanout_ + k]; }

std::int64_t ConeDag::find(MarkKey key) const {
  auto it = index_.find(key);
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::vector<std::size_t> ConeDag::time_order() const {
  std::vector<std::size_t> order(nodes_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (nodes_[a].mark.time != nodes_[b].mark.time) return nodes_[a].mark.time < nodes_[b].mark.time;
    return nodes_[a].mark.key < nodes_[b].mark.key;
  });
  return order;
}

std::int64_t ConeDag::max_radius(const Site& origin) const {
  std::int64_t r = 0;
  for (const auto& n : nodes_) r = std::max(r, l1_norm(n.mark.site - origin));
  return r;
}

ConeDag explore_cone(MarkStore& store, const UpdateMark& root, int maxDepth, const NeighborhoodSpec& spec,
                     std::size_t nodeCap) {
  ConeDag dag(store, root, spec, nodeCap);
  dag.explore(maxDepth);
  return dag;
}

}  // namespace gmrf
