#pragma once

#include <array>
#include <cstdint>

namespace gmrf {

// Philox4x32-10 (Salmon et al., SC'11). Pure function of (counter, key).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

// 53-bit uniform in [0, 1)
inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  std::uint64_t w = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>(w >> 11) * 0x1.0p-53;
}

// 53-bit uniform in (0, 1)
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  std::uint64_t w = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based uniform stream for tests and bootstrap resampling.
class PhiloxStream {
 public:
  explicit PhiloxStream(std::uint64_t seed, std::uint32_t lane = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, lane_(lane) {}

  double uniform() {
    if (pos_ == 2) refill();
    double u = to_unit(buf_[2 * pos_], buf_[2 * pos_ + 1]);
    ++pos_;
    return u;
  }
  std::uint64_t next_u64() {
    if (pos_ == 2) refill();
    std::uint64_t w = (static_cast<std::uint64_t>(buf_[2 * pos_]) << 32) | buf_[2 * pos_ + 1];
    ++pos_;
    return w;
  }

 private:
  void refill() {
    buf_ = philox4x32_10({static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32), lane_,
                          0x5eed5eedu},
                         key_);
    ++counter_;
    pos_ = 0;
  }
  PhiloxKey key_;
  std::uint32_t lane_;
  std::uint64_t counter_ = 0;
  PhiloxCounter buf_{};
  int pos_ = 2;
};

}  // namespace gmrf
