#pragma once

#include <cstdint>
#include <vector>

#include "iltlab/green.hpp"
#include "iltlab/parallel.hpp"
#include "iltlab/walk.hpp"

namespace iltlab {

// Harmonic tilt toward the origin: while the walk has fewer than return_target visits
// to 0, a step to y is proposed with probability proportional to
// h(y) = 1 - theta + theta G(y)/G(0) over the 2d+1 lazy moves. h is harmonic off the
// origin, so the likelihood ratio telescopes to h(start)/h(end) times a factor
// (1 - theta/G(0)) per tilted departure from 0. Steps from sites outside the trusted
// half of the oracle box are never tilted. Afterwards the walk is the plain lazy walk. theta = 0 is the plain
// walk with weight 1.
struct TiltConfig {
  double theta = 0.0;
  std::uint64_t return_target = 1;
  std::int64_t stop_radius = 40;
  std::uint64_t max_steps = 100'000'000;
};

struct TiltedWalk {
  LocalTimeField field;
  // log dP / dQ of the path: true walk over tilted walk.
  double log_weight = 0.0;
  // False when the step cap was hit or the weight is not finite.
  bool valid = true;
  std::uint64_t tilted_steps = 0;
};

void validate(const TiltConfig& cfg);

// Walk from the origin (time 0 counted) truncated at the first exit from B(0, R).
// Uses the stream (seed, stream); with theta = 0 the path equals simulate_local_times.
TiltedWalk forced_return_walk(int dim, const TiltConfig& cfg, const GreenOracle& oracle, std::uint64_t seed,
                              std::uint64_t stream);

struct WeightedSample {
  std::vector<double> values;
  double log_weight = 0.0;
  std::uint64_t replica = 0;
  bool valid = true;
};

// One sample per replica from a pair of tilted walks (streams 2r, 2r+1); the
// observable maps the two fields to a value vector. Samples are in replica order.
template <typename Observable>
std::vector<WeightedSample> forced_return_pairs(int dim, const TiltConfig& cfg, const GreenOracle& oracle,
                                                std::uint64_t seed, std::uint64_t replicas, Observable&& observable,
                                                const ParallelConfig& parallel = {}) {
  validate(cfg);
  auto parts = map_chunks(replicas, parallel, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<WeightedSample> out;
    out.reserve(end - begin);
    for (std::uint64_t r = begin; r < end; ++r) {
      const TiltedWalk a = forced_return_walk(dim, cfg, oracle, seed, 2 * r);
      const TiltedWalk b = forced_return_walk(dim, cfg, oracle, seed, 2 * r + 1);
      WeightedSample s;
      s.replica = r;
      s.log_weight = a.log_weight + b.log_weight;
      s.valid = a.valid && b.valid;
      if (s.valid) s.values = observable(a.field, b.field);
      out.push_back(std::move(s));
    }
    return out;
  });
  std::vector<WeightedSample> out;
  out.reserve(replicas);
  for (auto& p : parts) {
    for (auto& s : p) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace iltlab
