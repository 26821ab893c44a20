#include "iltlab/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

#include "iltlab/error.hpp"
#include "iltlab/green.hpp"

namespace iltlab {

WalkState start_walk(const LatticePoint& start, std::uint64_t seed, std::uint64_t replica) {
  if (start.dim() < 1) throw InvalidInput("walk needs dim >= 1");
  return WalkState{start, 0, StreamRng(seed, replica)};
}

WalkState step_walk(WalkState state) {
  advance(state);
  return state;
}

SiteIndex::SiteIndex(const SiteList& sites) {
  lo_.fill(std::numeric_limits<LatticePoint::Coord>::max());
  hi_.fill(std::numeric_limits<LatticePoint::Coord>::min());
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const auto& z = sites[k];
    if (!index_.emplace(z, static_cast<int>(k)).second) throw InvalidInput("duplicate site " + z.to_string());
    for (int i = 0; i < z.dim(); ++i) {
      lo_[static_cast<std::size_t>(i)] = std::min(lo_[static_cast<std::size_t>(i)], z[i]);
      hi_[static_cast<std::size_t>(i)] = std::max(hi_[static_cast<std::size_t>(i)], z[i]);
    }
  }
}

LocalTimeField::LocalTimeField(int dim, Horizon horizon, bool origin_included)
    : dim_(dim), horizon_(horizon), origin_included_(origin_included) {}

void LocalTimeField::add_visit(const LatticePoint& z, std::uint64_t count) {
  if (count == 0) return;
  counts_[z] += count;
  total_ += count;
}

std::uint64_t LocalTimeField::at(const LatticePoint& z) const {
  const auto it = counts_.find(z);
  return it == counts_.end() ? 0 : it->second;
}

SiteList LocalTimeField::sites() const {
  SiteList out;
  out.reserve(counts_.size());
  for (const auto& [z, c] : counts_) out.push_back(z);
  std::sort(out.begin(), out.end());
  return out;
}

LocalTimeField simulate_local_times(int dim, std::uint64_t seed, const Horizon& horizon,
                                    const SimulationOptions& options) {
  LocalTimeField field(dim, horizon, options.origin_included);
  WalkState walk = start_walk(dim, seed, options.replica);

  if (const auto* finite = std::get_if<FiniteHorizon>(&horizon)) {
    if (options.origin_included) field.add_visit(walk.position);
    for (std::uint64_t k = 0; k < finite->steps; ++k) {
      advance(walk);
      field.add_visit(walk.position);
    }
  } else {
    const auto& trunc = std::get<TruncatedInfinite>(horizon);
    if (dim <= 2) throw InvalidInput("nonterminating truncation: dimension " + std::to_string(dim) + " is recurrent");
    if (trunc.stop_radius < 1) throw InvalidInput("stop radius must be >= 1");
    bool first = true;
    walk_in_ball(walk, trunc.stop_radius, [&](const LatticePoint& z) {
      if (!first || options.origin_included) field.add_visit(z);
      first = false;
      return true;
    });
  }
  field.set_steps(walk.step_count);
  return field;
}

TruncationCertificate truncation_bias_bound(std::int64_t stop_radius, const SiteList& target_set,
                                            const GreenOracle& oracle) {
  TruncationCertificate cert{stop_radius, target_set, 0.0};
  const double radius = static_cast<double>(stop_radius);
  for (const auto& z : target_set) {
    if (2.0 * z.norm() > radius) {
      throw InvalidInput("radius too small: site " + z.to_string() + " lies outside B(0, R/2) for R = " +
                         std::to_string(stop_radius));
    }
  }
  // Any exit point y has ||y|| > R, so ||y - z|| > R - ||z||.
  for (const auto& z : target_set) cert.bias_bound += oracle.radial_envelope(radius - z.norm());
  return cert;
}

SiteList level_set(const LocalTimeField& field, const LevelMode& mode) {
  SiteList out;
  for (const auto& [z, c] : field.counts()) {
    const bool keep = std::visit(
        [c](const auto& m) {
          if constexpr (std::is_same_v<std::decay_t<decltype(m)>, AtLeast>) {
            return static_cast<double>(c) >= m.xi;
          } else {
            return c == m.n;
          }
        },
        mode);
    if (keep) out.push_back(z);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace iltlab
