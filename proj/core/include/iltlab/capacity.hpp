#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "iltlab/green.hpp"
#include "iltlab/lattice.hpp"
#include "iltlab/parallel.hpp"

namespace iltlab {

enum class CapacityMethod { EscapeMC, EquilibriumSolve, VariationalBound };

const char* to_string(CapacityMethod m) noexcept;

// cap(L) = sum_{z in L} P_z(T_L = inf), T_L = inf{n > 0 : S_n in L}.
struct EquilibriumSolution {
  SiteList sites;
  // EscapeMC: escape frequencies; EquilibriumSolve: e(z); VariationalBound: mu(z).
  std::vector<double> measure;
  double capacity = 0.0;
  CapacityMethod method = CapacityMethod::EquilibriumSolve;
  // Standard error (EscapeMC) or max |G e - 1| residual (EquilibriumSolve).
  double error = 0.0;
  // EscapeMC only: upper bound on the upward bias from truncation.
  double bias_bound = 0.0;
  std::uint64_t replicas = 0;
  // EquilibriumSolve only.
  double min_weight = 0.0;
  bool negative_weights = false;
};

// Escape-frequency estimate. A walk leaving B(0, stop_radius) before re-entering L
// counts as escaped; L must lie in B(0, stop_radius / 2).
EquilibriumSolution capacity_mc(const SiteList& sites, std::uint64_t replicas, std::int64_t stop_radius,
                                std::uint64_t seed, const GreenOracle& oracle,
                                const ParallelConfig& parallel = {});

// Solves sum_{z'} G(z - z') e(z') = 1 on L. The oracle must cover every pairwise
// difference padded by 2.
EquilibriumSolution equilibrium_solve(const SiteList& sites, const GreenOracle& oracle);

struct VariationalBound {
  double bound = 0.0;
  // max_z sum_{z'} G(z - z') mu(z'), mu = |L|^{-2/d}.
  double max_potential = 0.0;
  // bound / |L|^{1 - 2/d}.
  double kappa_hat = 0.0;
};

// sum mu / max potential for the flat test measure mu = |L|^{-2/d} 1_L.
VariationalBound variational_lower_bound(const SiteList& sites, const GreenOracle& oracle);

// Green matrix G(z_i - z_j) on L; throws when the oracle is too small.
Eigen::MatrixXd green_matrix(const SiteList& sites, const GreenOracle& oracle);

// Transition data of the walk watched on L. Rows 0..|L|-1: q(x, y) = P_x(T_L < inf,
// S_{T_L} = y) for x in L. Last row: the entrance law P_0(H_L < inf, S_{H_L} = y) of
// a walk from the origin, H_L counting time 0 (a unit row when 0 is in L).
// escape(i) = 1 - sum_y q(i, y).
struct HarmonicMeasure {
  SiteList sites;
  Eigen::MatrixXd q;  // (|L| + 1) x |L|
  Eigen::VectorXd escape;  // |L| + 1
  // Standard errors (zero for the oracle version).
  Eigen::MatrixXd q_se;
  Eigen::VectorXd escape_se;
};

HarmonicMeasure harmonic_measure(const SiteList& sites, const GreenOracle& oracle);

// Monte Carlo version; walks stopped at stop_radius count as escaped.
HarmonicMeasure harmonic_measure_mc(const SiteList& sites, std::uint64_t replicas, std::int64_t stop_radius,
                                    std::uint64_t seed, const ParallelConfig& parallel = {});

}  // namespace iltlab
