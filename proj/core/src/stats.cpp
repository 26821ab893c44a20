#include "iltlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "iltlab/error.hpp"

namespace iltlab {

void MomentAccumulator::add(double x) noexcept {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void MomentAccumulator::merge(const MomentAccumulator& other) noexcept {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double delta = other.mean_ - mean_;
  const double n = na + nb;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  n_ += other.n_;
}

double MomentAccumulator::variance() const noexcept {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double MomentAccumulator::standard_error() const noexcept {
  return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

std::vector<double> normalized_weights(std::span<const double> log_weights) {
  std::vector<double> w(log_weights.size());
  if (w.empty()) return w;
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(log_weights[i] - top);
    total += w[i];
  }
  for (auto& x : w) x /= total;
  return w;
}

WeightedSummary summarize_weighted(std::span<const double> log_weights, std::span<const double> values) {
  if (log_weights.size() != values.size()) throw InvalidInput("weights and values differ in length");
  WeightedSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  const std::vector<double> w = normalized_weights(log_weights);
  double mean = 0.0;
  double w2 = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    mean += w[i] * values[i];
    w2 += w[i] * w[i];
  }
  double var = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double r = values[i] - mean;
    var += w[i] * w[i] * r * r;
  }
  s.mean = mean;
  s.standard_error = std::sqrt(var);
  s.effective_sample_size = 1.0 / w2;
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  double acc = 0.0;
  for (double lw : log_weights) acc += std::exp(lw - top);
  s.log_mean_weight = top + std::log(acc / static_cast<double>(values.size()));
  return s;
}

double weighted_quantile(std::span<const double> values, std::span<const double> weights, double p) {
  if (values.empty() || values.size() != weights.size()) throw InvalidInput("weighted_quantile: bad input");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double acc = 0.0;
  for (auto i : order) {
    acc += weights[i];
    if (acc >= p * total) return values[i];
  }
  return values[order.back()];
}

namespace {

double kolmogorov_survival(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

TwoSampleTest ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidInput("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  return {d, kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d)};
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace iltlab
