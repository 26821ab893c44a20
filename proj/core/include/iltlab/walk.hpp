#pragma once

#include <cstdint>
#include <variant>

#include <absl/container/flat_hash_map.h>

#include "iltlab/lattice.hpp"
#include "iltlab/rng.hpp"

namespace iltlab {

class GreenOracle;

// Lazy simple random walk: each step is uniform over the 2d+1 sites at l1 distance
// <= 1, staying put included.
struct WalkState {
  LatticePoint position;
  std::uint64_t step_count = 0;
  StreamRng rng;
};

WalkState start_walk(const LatticePoint& start, std::uint64_t seed, std::uint64_t replica = 0);
inline WalkState start_walk(int dim, std::uint64_t seed, std::uint64_t replica = 0) {
  return start_walk(LatticePoint(dim), seed, replica);
}

// One lazy step in place. Returns the signed axis moved along (+/-(axis+1)), 0 if the
// walk stayed.
inline int advance(WalkState& s) noexcept {
  const int d = s.position.dim();
  const auto k = static_cast<int>(s.rng.below(static_cast<std::uint32_t>(2 * d + 1)));
  ++s.step_count;
  if (k == 2 * d) return 0;
  const int axis = k >> 1;
  if (k & 1) {
    --s.position[axis];
    return -(axis + 1);
  }
  ++s.position[axis];
  return axis + 1;
}

WalkState step_walk(WalkState state);

// Runs the walk while ||S_n|| <= stop_radius, calling visit(position) at every such
// time starting with the current one. Stops early when visit returns false.
// Returns true if the walk left the ball, false if the visitor stopped it.
template <typename Visit>
bool walk_in_ball(WalkState& s, std::int64_t stop_radius, Visit&& visit) {
  const std::int64_t r2 = stop_radius * stop_radius;
  std::int64_t sq = s.position.squared_norm();
  while (sq <= r2) {
    if (!visit(s.position)) return false;
    const int moved = advance(s);
    if (moved > 0) {
      sq += 2 * static_cast<std::int64_t>(s.position[moved - 1]) - 1;
    } else if (moved < 0) {
      sq -= 2 * static_cast<std::int64_t>(s.position[-moved - 1]) + 1;
    }
  }
  return true;
}

// Site -> index lookup with a bounding-box prefilter, for hot walk loops.
class SiteIndex {
 public:
  explicit SiteIndex(const SiteList& sites);

  // Index of z in the original list, or -1.
  int find(const LatticePoint& z) const {
    for (int i = 0; i < z.dim(); ++i) {
      if (z[i] < lo_[static_cast<std::size_t>(i)] || z[i] > hi_[static_cast<std::size_t>(i)]) return -1;
    }
    const auto it = index_.find(z);
    return it == index_.end() ? -1 : it->second;
  }
  std::size_t size() const noexcept { return index_.size(); }

 private:
  absl::flat_hash_map<LatticePoint, int> index_;
  std::array<LatticePoint::Coord, kMaxDim> lo_{};
  std::array<LatticePoint::Coord, kMaxDim> hi_{};
};

struct FiniteHorizon {
  std::uint64_t steps = 0;
};
// Infinite horizon approximated by stopping at the first exit from the Euclidean ball
// of radius stop_radius.
struct TruncatedInfinite {
  std::int64_t stop_radius = 1;
};
using Horizon = std::variant<FiniteHorizon, TruncatedInfinite>;

// Sparse visit counts l(z); sites never visited are absent.
class LocalTimeField {
 public:
  using Map = absl::flat_hash_map<LatticePoint, std::uint64_t>;

  LocalTimeField(int dim, Horizon horizon, bool origin_included);

  void add_visit(const LatticePoint& z, std::uint64_t count = 1);
  std::uint64_t at(const LatticePoint& z) const;

  int dim() const noexcept { return dim_; }
  const Horizon& horizon() const noexcept { return horizon_; }
  bool origin_included() const noexcept { return origin_included_; }
  const Map& counts() const noexcept { return counts_; }
  std::size_t size() const noexcept { return counts_.size(); }
  std::uint64_t total() const noexcept { return total_; }
  // Number of walk steps simulated to produce the field.
  std::uint64_t steps() const noexcept { return steps_; }
  void set_steps(std::uint64_t steps) noexcept { steps_ = steps; }

  // Range, sorted.
  SiteList sites() const;

 private:
  int dim_;
  Horizon horizon_;
  bool origin_included_;
  Map counts_;
  std::uint64_t total_ = 0;
  std::uint64_t steps_ = 0;
};

struct SimulationOptions {
  bool origin_included = true;
  std::uint64_t replica = 0;
};

// l_n(z) = sum_{k=0}^n 1{S_k = z} for a walk from the origin (k = 0 dropped when
// origin_included is false). TruncatedInfinite requires dim >= 3.
LocalTimeField simulate_local_times(int dim, std::uint64_t seed, const Horizon& horizon,
                                    const SimulationOptions& options = {});

struct TruncationCertificate {
  std::int64_t stop_radius = 0;
  SiteList target_set;
  // Upper bound on E[sum_{z in target} (l_inf(z) - l_truncated(z))], in visits.
  double bias_bound = 0.0;
};

// Bounds the visits to target_set missed by stopping at the first exit from B(0, R):
// max over exit points y of sum_z G(y - z), with G bounded by the oracle's radial
// envelope at distance R - ||z||. Requires target_set inside B(0, R/2).
TruncationCertificate truncation_bias_bound(std::int64_t stop_radius, const SiteList& target_set,
                                            const GreenOracle& oracle);

struct AtLeast {
  double xi = 1.0;
};
struct Exactly {
  std::uint64_t n = 1;
};
using LevelMode = std::variant<AtLeast, Exactly>;

// D(xi) = {z : l(z) >= xi} or L(n) = {z : l(z) = n}, sorted.
SiteList level_set(const LocalTimeField& field, const LevelMode& mode);

}  // namespace iltlab
