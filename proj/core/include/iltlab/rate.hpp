#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "iltlab/green.hpp"
#include "iltlab/lattice.hpp"
#include "iltlab/parallel.hpp"

namespace iltlab {

// Nonnegative h on a finite support.
struct ProfileFunction {
  SiteList support;
  std::vector<double> values;
  double l2_norm = 0.0;

  static ProfileFunction make(SiteList support, std::vector<double> values);
  ProfileFunction scaled(double c) const;
};

struct NormResult {
  double value = 0.0;
  int iterations = 0;
  bool fallback = false;
  Eigen::VectorXd vector;
};

// Largest eigenvalue of a symmetric nonnegative kernel by power iteration, stopped when
// the Rayleigh quotient moves by at most tol (relative). Falls back to a dense
// eigensolver after max_iterations. `start` warm-starts the iteration.
NormResult operator_norm(const Eigen::MatrixXd& kernel, double tol = 1e-10, int max_iterations = 20000,
                         const Eigen::VectorXd& start = {});

// sqrt(e^h - 1) (G - delta_0) sqrt(e^h - 1) on the support.
struct IntersectionOperator {
  Eigen::MatrixXd kernel;
  double norm = 0.0;
  int iterations = 0;
  bool fallback = false;
};

// (G - delta_0)(x - y) on a site list.
Eigen::MatrixXd reduced_green_matrix(const SiteList& sites, const GreenOracle& oracle);

IntersectionOperator build_operator(const ProfileFunction& h, const GreenOracle& oracle, double tol = 1e-10);

struct Calibration {
  ProfileFunction profile;
  double scale = 0.0;
  double norm = 0.0;
  int evaluations = 0;
};

// c * direction with ||U_{c direction}|| in [1, 1 + tol].
Calibration calibrate_scale(const ProfileFunction& direction, const GreenOracle& oracle, double tol = 1e-6);

struct OptimizerConfig {
  double calibration_tol = 1e-6;
  double power_tol = 1e-10;
  // Relative improvement a move must achieve to be accepted.
  double improvement_floor = 1e-5;
  double initial_step = 0.5;
  double min_step = 1e-4;
  int max_sweeps = 400;
  // Tie values within orbits of the lattice symmetries preserving L.
  bool use_symmetry = true;
  // Extra starting directions; support sites outside L are ignored, missing ones get 0.
  std::vector<ProfileFunction> initial_profiles;
  ParallelConfig parallel;
};

struct TraceEntry {
  int restart = 0;
  int sweep = 0;
  double value = 0.0;
  double step = 0.0;
};

struct RateResult {
  SiteList lambda_set;
  double value = 0.0;
  ProfileFunction argmin_profile;
  double norm = 0.0;  // ||U_h|| at the returned profile
  double baseline = 0.0;
  // No start beat the one-site baseline by more than the improvement floor.
  bool stalled = false;
  int best_restart = -1;
  std::vector<std::string> restart_names;
  std::vector<TraceEntry> trace;
};

// Orbits of the hyperoctahedral symmetries mapping L onto itself; block index per site.
std::vector<int> symmetry_blocks(const SiteList& lambda);

RateResult minimize_rate(const SiteList& lambda, const GreenOracle& oracle, const OptimizerConfig& config = {});

struct RatePrediction {
  double xi = 0.0;
  double self_intersection_slope = 0.0;  // -I sqrt(xi)
  double intersection_slope = 0.0;       // -2 I
};

std::vector<RatePrediction> rate_predictions(const RateResult& rate, const std::vector<double>& xi_grid);

nlohmann::json to_json(const RateResult& rate);

}  // namespace iltlab
