#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "iltlab/green.hpp"
#include "iltlab/parallel.hpp"
#include "iltlab/walk.hpp"

namespace iltlab {

// zeta(q) = sum_z l(z) lt(z)^{q-1} over the common support.
struct InterpolatedIntersection {
  double q = 2.0;
  double value = 0.0;
  std::size_t common_sites = 0;
  // False when q is outside (d/(d-2), 2]; the value is still computed.
  bool in_range = true;
};

InterpolatedIntersection zeta(const LocalTimeField& field, const LocalTimeField& field_tilde, double q);

// Two independent truncated walks for pair index p (streams 2p and 2p+1).
std::pair<LocalTimeField, LocalTimeField> simulate_pair(int dim, std::int64_t stop_radius, std::uint64_t seed,
                                                        std::uint64_t pair);

// sum over orderings pi of prod_i G(z_{pi(i-1)}, z_{pi(i)}), z_{pi(0)} = 0. n <= 10.
double permutation_moment_bound(const SiteList& sites, const GreenOracle& oracle);

struct HolderShell {
  std::int64_t radius = 0;  // l1 shell |z| = radius
  std::uint64_t sites = 0;
  double increment = 0.0;
};

struct HolderSeries {
  double q = 0.0;
  int dim = 0;
  double partial_sum = 0.0;
  std::vector<HolderShell> shells;
  // q (d - 2) > d.
  bool convergent = false;
};

// sum_{|z| <= radius} (1 + ||z||)^{q (2 - d)} by l1 shells.
HolderSeries holder_series(double q, int dim, std::int64_t radius);

// Upper bound on sum_{|z| > radius} (1 + ||z||)^{q (2 - d)}: the shell count
// 2^d C(k+d-1, d-1) and ||z|| >= |z| / sqrt(d), summed by an integral. Infinite when
// the series diverges.
double holder_tail_bound(double q, int dim, std::int64_t radius);

struct HolderChain {
  double lhs = 0.0;     // sum_z (sum_pi prod G)^q
  double middle = 0.0;  // (n!)^{q-1} sum_z sum_pi prod G^q
  double rhs = 0.0;     // (n!)^q sum_z prod G(z_{i-1}, z_i)^q
};

// Both sides of the Hoelder step, with every z_i ranging over the box ||z||_inf <= box.
HolderChain holder_chain(double q, int n, int box, const GreenOracle& oracle);

struct MomentRow {
  int n = 0;
  double estimate = 0.0;
  double standard_error = 0.0;
  // (n!)^q C^n with the fitted C.
  double envelope = 0.0;
};

struct MomentTable {
  double q = 2.0;
  std::uint64_t replicas = 0;
  std::vector<MomentRow> rows;
  // Smallest C with E[zeta^n] <= C^n (n!)^q on the sampled range.
  double constant = 0.0;
};

// Monte Carlo moments E[zeta(q)^n], n = 1..n_max (n_max <= 4), from `replicas`
// truncated walk pairs.
MomentTable moment_bound_constant(double q, int dim, int n_max, std::uint64_t replicas, std::int64_t stop_radius,
                                  std::uint64_t seed, const ParallelConfig& parallel = {});

// Per-pair zeta(q) samples, in pair order.
std::vector<double> zeta_samples(double q, int dim, std::uint64_t replicas, std::int64_t stop_radius,
                                 std::uint64_t seed, const ParallelConfig& parallel = {});

struct TailRow {
  double threshold = 0.0;
  double survival = 0.0;
  double standard_error = 0.0;
  std::uint64_t exceedances = 0;
};

struct TailEstimate {
  std::vector<TailRow> rows;
  std::uint64_t n_samples = 0;
  double kappa = 0.0;
  double alpha = 0.0;
  double r_squared = 0.0;
  double intercept = 0.0;
  // R^2 per grid exponent, in grid order.
  std::vector<std::pair<double, double>> grid_r_squared;
};

std::vector<double> default_exponent_grid();

// Fits log P(X > t) = b - kappa t^alpha over the exponent grid, keeping the alpha with
// the largest R^2. Thresholds are spaced evenly in log survival from 1/2 down to the
// last level with at least 10 exceedances. Optional log weights give self-normalised
// survival estimates.
TailEstimate tail_fit(std::span<const double> samples, std::span<const double> exponent_grid,
                      std::span<const double> log_weights = {});

std::string tail_csv(const TailEstimate& tail);
nlohmann::json tail_json(const TailEstimate& tail);

}  // namespace iltlab
