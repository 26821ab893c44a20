#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "iltlab/error.hpp"
#include "iltlab/green.hpp"
#include "iltlab/parallel.hpp"
#include "iltlab/sampler.hpp"

namespace iltlab {

enum class ExperimentKind { IntersectionDecomposition, LevelSetGeometry, RangeIntersection, IntersectionTail };

const char* to_string(ExperimentKind kind) noexcept;

// Rejected configuration; the message names the offending field.
class ConfigError : public InvalidInput {
 public:
  ConfigError(const std::string& field, const std::string& what) : InvalidInput("config." + field + ": " + what) {}
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::IntersectionTail;
  int dim = 5;
  std::uint64_t seed = 1;
  std::uint64_t replicas = 1000;
  std::int64_t stop_radius = 40;
  int oracle_box = 24;
  std::uint64_t chunk = 256;
  double theta = 0.0;
  std::uint64_t return_target = 1;
  // intersection-decomposition
  double t = 0.0;
  std::vector<double> a_grid;
  // level-set-geometry / range-intersection
  int n = 1;
  int m = 1;
  int L = 1;
  double epsilon = 0.2;
  double capacity_bin = 0.25;
  bool include_start = true;
  // intersection-tail
  double q = 2.0;
  std::vector<double> exponent_grid;

  // Validates every field before anything runs; throws ConfigError.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  TiltConfig tilt() const;
};

struct ExperimentOutput {
  // (file name, contents) in write order.
  std::vector<std::pair<std::string, std::string>> files;
  nlohmann::json summary;
};

ExperimentOutput run_intersection_decomposition(const ExperimentConfig& cfg, const GreenOracle& oracle,
                                                const ParallelConfig& parallel);
ExperimentOutput run_level_set_geometry(const ExperimentConfig& cfg, const GreenOracle& oracle,
                                        const ParallelConfig& parallel);
ExperimentOutput run_range_intersection(const ExperimentConfig& cfg, const GreenOracle& oracle,
                                        const ParallelConfig& parallel);
ExperimentOutput run_intersection_tail(const ExperimentConfig& cfg, const GreenOracle& oracle,
                                       const ParallelConfig& parallel);
ExperimentOutput run_experiment(const ExperimentConfig& cfg, const GreenOracle& oracle, const ParallelConfig& parallel);

// sum_z l(z) lt(z).
double intersection(const LocalTimeField& a, const LocalTimeField& b);

// Below this self-normalised effective sample size estimates are refused.
inline constexpr double kMinEffectiveSampleSize = 50.0;

}  // namespace iltlab
