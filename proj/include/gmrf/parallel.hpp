#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gmrf {

// GMRF_CFTP_WORKERS, else hardware concurrency
inline unsigned worker_count() {
  if (const char* env = std::getenv("GMRF_CFTP_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Calls fn(i) for i in [begin, end). Results must be written by index so the
// outcome does not depend on scheduling.
template <class Fn>
void parallel_for(std::int64_t begin, std::int64_t end, Fn&& fn, unsigned workers = worker_count()) {
  if (end <= begin) return;
  workers = static_cast<unsigned>(std::min<std::int64_t>(workers, end - begin));
  if (workers <= 1) {
    for (std::int64_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{begin};
  std::exception_ptr err;
  std::mutex m;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      try {
        for (std::int64_t i; (i = next.fetch_add(1)) < end;) fn(i);
      } catch (...) {
        std::lock_guard lk(m);
        if (!err) err = std::current_exception();
        next = end;
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace gmrf
