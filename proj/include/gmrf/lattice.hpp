#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace gmrf {

// Lattice dimensions above 3 are not supported: the mark generator packs
// all coordinates of a site into its counter.
inline constexpr int kMaxDim = 3;

struct Site {
  std::array<std::int32_t, kMaxDim> x{};

  Site() = default;
  Site(std::initializer_list<std::int32_t> coords);

  std::int32_t& operator[](int i) { return x[static_cast<std::size_t>(i)]; }
  std::int32_t operator[](int i) const { return x[static_cast<std::size_t>(i)]; }

  friend bool operator==(const Site&, const Site&) = default;
  friend auto operator<=>(const Site&, const Site&) = default;
};

Site operator+(const Site& a, const Site& b);
Site operator-(const Site& a, const Site& b);
Site operator-(const Site& a);
std::int64_t l1_norm(const Site& s);

std::string to_string(const Site& s, int d);

struct SiteHash {
  std::size_t operator()(const Site& s) const noexcept;
};

// Finite symmetric offset set B, kept in lexicographic order.
class NeighborhoodSpec {
 public:
  explicit NeighborhoodSpec(int d);  // unit l1 sphere
  NeighborhoodSpec(int d, std::vector<Site> offsets);

  int dim() const { return d_; }
  std::size_t size() const { return offsets_.size(); }
  const std::vector<Site>& offsets() const { return offsets_; }
  // max l1 norm of an offset
  std::int64_t range() const { return range_; }

 private:
  int d_;
  std::vector<Site> offsets_;
  std::int64_t range_ = 0;
};

std::vector<Site> neighbors(const Site& site, const NeighborhoodSpec& spec);

// Number of points of Z^d at l1 distance exactly n (sphere) or at most n (ball).
double l1_sphere_count(int d, int n);
double l1_ball_count(int d, int n);

}  // namespace gmrf
