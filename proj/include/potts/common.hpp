#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>
#include <functional>
#include <thread>
#include <atomic>

namespace potts {

// Error taxonomy; the CLI maps these onto its exit-code contract.
struct invalid_input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct resource_limit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct dependency_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kVersionStamp = "potts-0.1.0";

// FNV-1a, used for content hashes embedded in outputs and cache files.
inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t h = 1469598103934665603ULL) {
  auto p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}
inline std::uint64_t fnv1a(const std::string& s,
                           std::uint64_t h = 1469598103934665603ULL) {
  return fnv1a(s.data(), s.size(), h);
}
inline std::string hash_hex(std::uint64_t h) {
  char buf[17];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

inline int default_thread_count() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

// Deterministic parallel map: results land in caller-owned slots, so the
// merge order never depends on scheduling.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                         int threads = 0) {
  if (threads <= 0) threads = default_thread_count();
  if (threads == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

// splitmix64; all seeded randomness in the library flows through this so
// reruns are reproducible.
struct SplitMix64 {
  std::uint64_t s;
  explicit SplitMix64(std::uint64_t seed) : s(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t next_below(std::uint64_t n) { return next() % n; }
};

}  // namespace potts
