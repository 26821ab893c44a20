#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "iltlab/lattice.hpp"
#include "iltlab/parallel.hpp"

namespace iltlab {

// Region on which the lazy walk is killed on exit. Both shapes are invariant under
// the hyperoctahedral group, which lets the solver work on orbit representatives.
enum class DomainShape { Box, Ball };

struct GreenSolveOptions {
  double tolerance = 1e-12;
  int max_iterations = 50000;
  // Also solve at half the radius and record the change at the origin.
  bool boundary_error = true;
};

// Lazy-walk Green's function G(z) = E_0[l_inf(z)], solved from (I - P) G = delta_0 with
// zero exterior on the box {||z||_inf <= B} (or the Euclidean ball ||z|| <= R).
// Immutable after construction; safe for concurrent reads.
class GreenOracle {
  friend struct GreenOracleBuilder;

 public:
  static GreenOracle solve_box(int dim, int box_radius, const GreenSolveOptions& options = {});
  static GreenOracle solve_ball(int dim, int radius, const GreenSolveOptions& options = {});

  // Binary table: header (magic, dim, shape, radius, tolerance, residual, iterations,
  // boundary error, decay constant, count) followed by values in representative order.
  void save(const std::filesystem::path& path) const;
  static GreenOracle load(const std::filesystem::path& path);
  // Loads path when it holds a matching box table, otherwise solves and saves.
  static GreenOracle cached_box(int dim, int box_radius, const std::filesystem::path& path);

  int dim() const noexcept { return dim_; }
  DomainShape shape() const noexcept { return shape_; }
  int radius() const noexcept { return radius_; }
  int box_radius() const noexcept { return radius_; }
  double tolerance() const noexcept { return tolerance_; }
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }
  // |G_R(0) - G_{R/2}(0)|; the change from doubling R is expected to be smaller.
  double boundary_error_bound() const noexcept { return boundary_error_; }

  bool contains(const LatticePoint& z) const noexcept;
  // Throws InvalidInput("oracle box too small") outside the domain.
  double operator()(const LatticePoint& z) const;
  double value(const LatticePoint& x, const LatticePoint& y) const { return (*this)(y - x); }
  double at_origin() const noexcept { return values_.front(); }

  // max ||x||^{d-2} G(x) over tabled x != 0 with ||x||_inf <= R/2: the constant of
  // the envelope G(x) <= c ||x||^{2-d}.
  double decay_constant() const noexcept { return decay_constant_; }
  // min(G(0), c r^{2-d}); bounds G(x) for every ||x|| >= r.
  double radial_envelope(double r) const noexcept;
  // Table value inside the domain, radial envelope outside.
  double envelope(const LatticePoint& z) const noexcept;

  // sum_z G(z)^2 over the whole domain.
  double square_sum() const noexcept;

  // Orbit representatives (sorted absolute coordinates) in table order.
  std::size_t table_size() const noexcept { return values_.size(); }
  LatticePoint representative(std::size_t i) const;
  double table_value(std::size_t i) const noexcept { return values_[i]; }
  std::uint64_t table_weight(std::size_t i) const noexcept { return weights_[i]; }

 private:
  GreenOracle() = default;
  std::int64_t find(const LatticePoint& z) const noexcept;
  void finalize();

  int dim_ = 0;
  DomainShape shape_ = DomainShape::Box;
  int radius_ = 0;
  double tolerance_ = 0.0;
  double residual_ = 0.0;
  int iterations_ = 0;
  double boundary_error_ = 0.0;
  double decay_constant_ = 0.0;
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint32_t> weights_;
  std::vector<double> values_;
};

struct GreenEstimate {
  LatticePoint site;
  double mean = 0.0;
  double standard_error = 0.0;
  // Upper bound on the visits missed by truncation.
  double bias_bound = 0.0;
  std::uint64_t replicas = 0;
};

// Monte Carlo E_0[l_inf(z)] for every site in `sites` from one ensemble of walks
// truncated at stop_radius. Replica r uses stream (seed, r).
std::vector<GreenEstimate> green_mc(int dim, const SiteList& sites, std::uint64_t replicas,
                                    std::int64_t stop_radius, std::uint64_t seed,
                                    const GreenOracle& oracle, const ParallelConfig& parallel = {});

GreenEstimate green_mc(int dim, const LatticePoint& z, std::uint64_t replicas, std::int64_t stop_radius,
                       std::uint64_t seed, const GreenOracle& oracle, const ParallelConfig& parallel = {});

struct HittingProbability {
  double probability = 1.0;
  // probability * ||z1 - z2||^{d-2}; 0 when z1 == z2.
  double scaled = 0.0;
};

// P_{z1}(H(z2) < inf) = G(z2 - z1) / G(0), with H the first time >= 0 at z2.
HittingProbability hitting_probability(const LatticePoint& z1, const LatticePoint& z2,
                                       const GreenOracle& oracle);

}  // namespace iltlab
