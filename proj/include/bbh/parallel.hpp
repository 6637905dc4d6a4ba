#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace bbh {

/// One step of splitmix64.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of substream `index` under `master`: splitmix64 started at
/// master ^ (index * golden), advanced twice.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (index * 0x9e3779b97f4a7c15ULL);
  splitmix64(s);
  return splitmix64(s);
}

/// Uniform integer in [0, n) by rejection; independent of the standard
/// library's distribution implementation.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = n == 0 ? 0 : UINT64_MAX - (UINT64_MAX % n + 1) % n;
  std::uint64_t x;
  do x = rng();
  while (x > limit);
  return x % n;
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Task order is
/// dynamic; callers write results into per-index slots.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const int w = static_cast<int>(std::max<std::size_t>(1, std::min<std::size_t>(std::max(workers, 1), n)));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < w; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace bbh
