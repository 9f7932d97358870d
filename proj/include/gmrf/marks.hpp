#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "gmrf/lattice.hpp"
#include "gmrf/model.hpp"

namespace gmrf {

// (stream id << 32) | index within the stream; unique within one store
using MarkKey = std::uint64_t;

struct UpdateMark {
  Site site{};
  double time = 0.0;
  double u = 0.0;
  std::uint32_t index = 0;  // 0 is the most recent mark before time 0
  MarkKey key = 0;
};

// Lazily generated Poisson clocks, one backward stream per site. Mark k at
// site i is a pure function of (seed, i + keyOffset, k).
class MarkStore {
 public:
  MarkStore(std::uint64_t seed, int d, Site keyOffset = {});

  std::uint64_t seed() const { return seed_; }
  int dim() const { return d_; }
  const Site& key_offset() const { return keyOffset_; }

  UpdateMark mark(const Site& site, std::uint32_t index);
  // latest mark with time <= t (respectively < t)
  UpdateMark last_mark_before(const Site& site, double t);
  UpdateMark last_mark_strictly_before(const Site& site, double t);
  // all marks at site with time >= tau, most recent first
  std::vector<UpdateMark> marks_since(const Site& site, double tau);

  std::size_t marks_generated() const { return generated_; }
  std::size_t sites_touched() const { return streams_.size(); }

  // CSV: x0[,x1[,x2]],time,u,index sorted by site then index
  void write_trace(std::ostream& os) const;

 private:
  struct Stream {
    Site site;
    std::vector<double> times;
    std::vector<double> us;
  };
  std::uint32_t stream_id(const Site& site);
  void extend(Stream& s, std::uint32_t id, std::size_t count);
  UpdateMark make(std::uint32_t id, std::uint32_t index) const;
  UpdateMark first_mark_below(const Site& site, double t, bool strict);

  std::uint64_t seed_;
  int d_;
  Site keyOffset_;
  std::vector<Stream> streams_;
  std::unordered_map<Site, std::uint32_t, SiteHash> ids_;
  std::size_t generated_ = 0;
};

std::vector<UpdateMark> children(MarkStore& store, const UpdateMark& mark, const NeighborhoodSpec& spec);

// K(mark) = inf{k : u <= q_k}
int reach(const UpdateMark& mark, const LevelSchedule& schedule);
int reach_u(double u, const LevelSchedule& schedule);

struct BudgetExceeded : std::runtime_error {
  BudgetExceeded(const std::string& what, std::size_t nodes, int depth)
      : std::runtime_error(what), nodesExplored(nodes), depthReached(depth) {}
  std::size_t nodesExplored;
  int depthReached;
};

// Active-path DAG explored breadth-first from a root mark.
class ConeDag {
 public:
  struct Node {
    UpdateMark mark;
    int dist = 0;
    bool expanded = false;
  };

  ConeDag(MarkStore& store, const UpdateMark& root, const NeighborhoodSpec& spec,
          std::size_t nodeCap = 10'000'000);

  // expand every node with dist < maxDepth
  void explore(int maxDepth);

  int depth() const { return depth_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t fanout() const { return fanout_; }
  const Node& node(std::size_t i) const { return nodes_[i]; }
  // index of child k of node i, or -1 if the node is not expanded
  std::int64_t child(std::size_t i, std::size_t k) const;
  std::int64_t find(MarkKey key) const;
  const std::vector<std::size_t>& count_per_depth() const { return perDepth_; }
  // node indices ordered by increasing time (children before parents)
  std::vector<std::size_t> time_order() const;
  std::int64_t max_radius(const Site& origin) const;

 private:
  MarkStore* store_;
  const NeighborhoodSpec* spec_;
  std::size_t fanout_;
  std::size_t cap_;
  int depth_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::int64_t> childIdx_;
  std::unordered_map<MarkKey, std::size_t> index_;
  std::vector<std::size_t> perDepth_;
  std::vector<std::size_t> frontier_;
};

ConeDag explore_cone(MarkStore& store, const UpdateMark& root, int maxDepth, const NeighborhoodSpec& spec,
                     std::size_t nodeCap = 10'000'000);

}  // namespace gmrf
