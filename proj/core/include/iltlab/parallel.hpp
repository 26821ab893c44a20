#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace iltlab {

// Work split for replica ensembles. The chunk size, not the thread count, fixes how
// work is partitioned, so results merged in chunk order are identical for any number
// of threads.
struct ParallelConfig {
  int threads = 1;
  std::uint64_t chunk = 256;
};

// Evaluates fn(begin, end) on [0, n) split into consecutive chunks and returns the
// partial results in chunk order. The first exception thrown (lowest chunk) is rethrown.
template <typename Fn>
auto map_chunks(std::uint64_t n, const ParallelConfig& cfg, Fn&& fn)
    -> std::vector<decltype(fn(std::uint64_t{}, std::uint64_t{}))> {
  using Partial = decltype(fn(std::uint64_t{}, std::uint64_t{}));
  const std::uint64_t chunk = std::max<std::uint64_t>(1, cfg.chunk);
  const std::uint64_t n_chunks = (n + chunk - 1) / chunk;
  std::vector<std::optional<Partial>> slots(n_chunks);
  std::vector<std::exception_ptr> errors(n_chunks);
  std::atomic<std::uint64_t> next{0};

  auto worker = [&] {
    for (std::uint64_t c = next++; c < n_chunks; c = next++) {
      const std::uint64_t begin = c * chunk;
      const std::uint64_t end = std::min(n, begin + chunk);
      try {
        slots[c].emplace(fn(begin, end));
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };

  const int threads = static_cast<int>(
      std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::max(1, cfg.threads)), 1,
                                std::max<std::uint64_t>(1, n_chunks)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Partial> out;
  out.reserve(n_chunks);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace iltlab
