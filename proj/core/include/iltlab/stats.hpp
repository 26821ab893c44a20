#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace iltlab {

// Mean/variance accumulator with Chan's pairwise merge.
class MomentAccumulator {
 public:
  void add(double x) noexcept;
  void merge(const MomentAccumulator& other) noexcept;

  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  // Unbiased sample variance (0 for fewer than two samples).
  double variance() const noexcept;
  double standard_error() const noexcept;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Self-normalised importance-sampling summary of (log weight, value) pairs.
struct WeightedSummary {
  double mean = 0.0;
  double standard_error = 0.0;
  double effective_sample_size = 0.0;
  // Plain average of the weights, log scale; close to 0 when the proposal is sane.
  double log_mean_weight = 0.0;
  std::uint64_t count = 0;
};

WeightedSummary summarize_weighted(std::span<const double> log_weights, std::span<const double> values);

// Normalised weights w_i / sum w (computed stably from log weights).
std::vector<double> normalized_weights(std::span<const double> log_weights);

// Weighted quantile: smallest value v with cumulative normalised weight >= p.
double weighted_quantile(std::span<const double> values, std::span<const double> weights, double p);

struct TwoSampleTest {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov p-value.
TwoSampleTest ks_two_sample(std::vector<double> a, std::vector<double> b);

// Shortest round-trip text form used in every CSV ("%.17g").
std::string format_double(double x);

}  // namespace iltlab
