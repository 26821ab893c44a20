#include "iltlab/sampler.hpp"

#include <cmath>
#include <string>

#include "iltlab/error.hpp"

namespace iltlab {

void validate(const TiltConfig& cfg) {
  if (!(cfg.theta >= 0.0 && cfg.theta < 1.0)) throw InvalidInput("tilt: theta must lie in [0, 1)");
  if (cfg.return_target < 1) throw InvalidInput("tilt: return_target must be >= 1");
  if (cfg.stop_radius < 1) throw InvalidInput("tilt: stop radius must be >= 1");
  if (cfg.max_steps < 1) throw InvalidInput("tilt: max_steps must be >= 1");
}

TiltedWalk forced_return_walk(int dim, const TiltConfig& cfg, const GreenOracle& oracle, std::uint64_t seed,
                              std::uint64_t stream) {
  if (dim <= 2) throw InvalidInput("recurrent dimension");
  if (oracle.dim() != dim) throw InvalidInput("tilt: oracle dimension differs from walk");
  validate(cfg);
  TiltedWalk out{LocalTimeField(dim, TruncatedInfinite{cfg.stop_radius}, true), 0.0, true, 0};
  WalkState w = start_walk(dim, seed, stream);
  const auto moves = lazy_moves(dim);
  const std::size_t k = moves.size();
  const double log_k = std::log(static_cast<double>(k));
  std::vector<double> h(k);
  const std::int64_t r2 = cfg.stop_radius * cfg.stop_radius;
  const double scale = cfg.theta / oracle.at_origin();
  std::uint64_t origin_visits = 0;
  while (w.position.squared_norm() <= r2) {
    out.field.add_visit(w.position);
    if (w.position.is_origin()) ++origin_visits;
    if (w.step_count >= cfg.max_steps) {
      out.valid = false;
      break;
    }
    if (cfg.theta == 0.0 || origin_visits >= cfg.return_target || 2 * w.position.linf_norm() > oracle.radius()) {
      advance(w);
      continue;
    }
    double total = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
      h[m] = 1.0 - cfg.theta + scale * oracle.envelope(w.position + moves[m]);
      total += h[m];
    }
    double u = w.rng.uniform() * total;
    std::size_t pick = 0;
    while (pick + 1 < k && u >= h[pick]) u -= h[pick++];
    out.log_weight += std::log(total) - log_k - std::log(h[pick]);
    w.position += moves[pick];
    ++w.step_count;
    ++out.tilted_steps;
  }
  out.field.set_steps(w.step_count);
  if (!std::isfinite(out.log_weight)) out.valid = false;
  return out;
}

}  // namespace iltlab
