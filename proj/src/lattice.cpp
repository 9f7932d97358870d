#include "gmrf/lattice.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace gmrf {

Site::Site(std::initializer_list<std::int32_t> coords) {
  if (coords.size() > static_cast<std::size_t>(kMaxDim))
    throw std::invalid_argument("Site: too many coordinates");
  std::copy(coords.begin(), coords.end(), x.begin());
}

Site operator+(const Site& a, const Site& b) {
  Site r;
  for (int i = 0; i < kMaxDim; ++i) r[i] = a[i] + b[i];
  return r;
}

Site operator-(const Site& a, const Site& b) {
  Site r;
  for (int i = 0; i < kMaxDim; ++i) r[i] = a[i] - b[i];
  return r;
}

Site operator-(const Site& a) {
  Site r;
  for (int i = 0; i < kMaxDim; ++i) r[i] = -a[i];
  return r;
}

std::int64_t l1_norm(const Site& s) {
  std::int64_t n = 0;
  for (auto v : s.x) n += std::abs(static_cast<std::int64_t>(v));
  return n;
}

std::string to_string(const Site& s, int d) {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < d; ++i) {
    if (i) os << ',';
    os << s[i];
  }
  if (d == 1) os << ',';
  os << ')';
  return os.str();
}

std::size_t SiteHash::operator()(const Site& s) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (auto v : s.x) {
    h ^= static_cast<std::uint32_t>(v);
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 31;
  }
  return static_cast<std::size_t>(h);
}

NeighborhoodSpec::NeighborhoodSpec(int d) : d_(d) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("NeighborhoodSpec: dimension out of range");
  for (int i = 0; i < d; ++i) {
    Site plus, minus;
    plus[i] = 1;
    minus[i] = -1;
    offsets_.push_back(plus);
    offsets_.push_back(minus);
  }
  std::sort(offsets_.begin(), offsets_.end());
  range_ = 1;
}

NeighborhoodSpec::NeighborhoodSpec(int d, std::vector<Site> offsets) : d_(d), offsets_(std::move(offsets)) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("NeighborhoodSpec: dimension out of range");
  if (offsets_.empty()) throw std::invalid_argument("NeighborhoodSpec: empty offset set");
  std::sort(offsets_.begin(), offsets_.end());
  if (std::adjacent_find(offsets_.begin(), offsets_.end()) != offsets_.end())
    throw std::invalid_argument("NeighborhoodSpec: duplicate offset");
  for (const auto& b : offsets_) {
    for (int i = d; i < kMaxDim; ++i)
      if (b[i] != 0) throw std::invalid_argument("NeighborhoodSpec: offset outside dimension");
    if (b == Site{}) throw std::invalid_argument("NeighborhoodSpec: 0 in B");
    if (!std::binary_search(offsets_.begin(), offsets_.end(), -b))
      throw std::invalid_argument("NeighborhoodSpec: B not symmetric");
    range_ = std::max(range_, l1_norm(b));
  }
}

std::vector<Site> neighbors(const Site& site, const NeighborhoodSpec& spec) {
  std::vector<Site> out;
  out.reserve(spec.size());
  for (const auto& b : spec.offsets()) out.push_back(site + b);
  return out;
}

double l1_sphere_count(int d, int n) {
  if (n < 0) return 0.0;
  // counts[k] = number of points of Z^j with l1 norm k, built one axis at a time
  std::vector<double> counts(static_cast<std::size_t>(n) + 1, 0.0);
  counts[0] = 1.0;
  for (int j = 0; j < d; ++j) {
    std::vector<double> next(counts.size(), 0.0);
    for (int k = 0; k <= n; ++k) {
      if (counts[k] == 0.0) continue;
      next[k] += counts[k];
      for (int v = 1; k + v <= n; ++v) next[k + v] += 2.0 * counts[k];
    }
    counts = std::move(next);
  }
  return counts[static_cast<std::size_t>(n)];
}

double l1_ball_count(int d, int n) {
  double total = 0.0;
  for (int k = 0; k <= n; ++k) total += l1_sphere_count(d, k);
  return total;
}

}  // namespace gmrf
