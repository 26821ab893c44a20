#include "iltlab/moments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "iltlab/error.hpp"
#include "iltlab/stats.hpp"

namespace iltlab {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

InterpolatedIntersection zeta(const LocalTimeField& field, const LocalTimeField& field_tilde, double q) {
  if (field.dim() != field_tilde.dim()) throw InvalidInput("zeta: fields differ in dimension");
  InterpolatedIntersection out;
  out.q = q;
  const double d = field.dim();
  out.in_range = d > 2.0 && q > d / (d - 2.0) && q <= 2.0;
  const bool small_first = field.size() <= field_tilde.size();
  const auto& a = small_first ? field.counts() : field_tilde.counts();
  const auto& b = small_first ? field_tilde.counts() : field.counts();
  // Hash-map order varies between processes, so terms are summed in sorted order.
  std::vector<double> terms;
  for (const auto& [z, ca] : a) {
    const auto it = b.find(z);
    if (it == b.end()) continue;
    const double l = static_cast<double>(small_first ? ca : it->second);
    const double lt = static_cast<double>(small_first ? it->second : ca);
    terms.push_back(q == 2.0 ? l * lt : l * std::pow(lt, q - 1.0));
  }
  std::sort(terms.begin(), terms.end());
  for (double t : terms) out.value += t;
  out.common_sites = terms.size();
  return out;
}

std::pair<LocalTimeField, LocalTimeField> simulate_pair(int dim, std::int64_t stop_radius, std::uint64_t seed,
                                                        std::uint64_t pair) {
  const Horizon h = TruncatedInfinite{stop_radius};
  return {simulate_local_times(dim, seed, h, {true, 2 * pair}),
          simulate_local_times(dim, seed, h, {true, 2 * pair + 1})};
}

double permutation_moment_bound(const SiteList& sites, const GreenOracle& oracle) {
  const std::size_t n = sites.size();
  if (n == 0) return 1.0;
  if (n > 10) throw InvalidInput("permutation_moment_bound: at most 10 sites");
  const LatticePoint origin(oracle.dim());
  std::vector<std::vector<double>> g(n, std::vector<double>(n));
  std::vector<double> from_origin(n);
  for (std::size_t i = 0; i < n; ++i) {
    from_origin[i] = oracle(sites[i] - origin);
    for (std::size_t j = 0; j < n; ++j) g[i][j] = oracle(sites[j] - sites[i]);
  }
  // Sum over orderings by dynamic programming over (visited set, last site).
  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<double> dp((full + 1) * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) dp[(std::size_t{1} << i) * n + i] = from_origin[i];
  for (std::size_t mask = 1; mask <= full; ++mask) {
    for (std::size_t last = 0; last < n; ++last) {
      const double v = dp[mask * n + last];
      if (v == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (mask >> j & 1) continue;
        dp[(mask | std::size_t{1} << j) * n + j] += v * g[last][j];
      }
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += dp[full * n + i];
  return total;
}

HolderSeries holder_series(double q, int dim, std::int64_t radius) {
  if (radius < 1) throw InvalidInput("holder_series: radius must be >= 1");
  if (dim < 1 || dim > kMaxDim) throw InvalidInput("holder_series: bad dimension");
  HolderSeries out;
  out.q = q;
  out.dim = dim;
  out.convergent = q * (dim - 2) > dim;
  const double p = q * (2.0 - dim);
  out.shells.resize(static_cast<std::size_t>(radius) + 1);
  for (std::int64_t k = 0; k <= radius; ++k) out.shells[static_cast<std::size_t>(k)].radius = k;

  // Orbit representatives (sorted absolute values) with l1 norm <= radius.
  LatticePoint c(dim);
  auto rec = [&](auto&& self, int pos, int lo, std::int64_t sum) -> void {
    if (pos == dim) {
      auto& shell = out.shells[static_cast<std::size_t>(sum)];
      const std::uint64_t w = orbit_size(c);
      shell.sites += w;
      shell.increment += static_cast<double>(w) * std::pow(1.0 + c.norm(), p);
      return;
    }
    for (int v = lo; sum + static_cast<std::int64_t>(v) * (dim - pos) <= radius; ++v) {
      c[pos] = v;
      self(self, pos + 1, v, sum + v);
    }
    c[pos] = 0;
  };
  rec(rec, 0, 0, 0);
  for (const auto& s : out.shells) out.partial_sum += s.increment;
  return out;
}

double holder_tail_bound(double q, int dim, std::int64_t radius) {
  const double p = q * (dim - 2.0);
  if (!(p > dim)) return std::numeric_limits<double>::infinity();
  const double d = dim;
  const double scale = std::pow(2.0, d) / factorial(dim - 1);
  const double sd = std::sqrt(d);
  auto f = [&](double x) { return scale * std::exp((d - 1.0) * std::log(x + d) - p * std::log1p(x / sd)); };
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(f, static_cast<double>(radius), std::numeric_limits<double>::infinity());
}

HolderChain holder_chain(double q, int n, int box, const GreenOracle& oracle) {
  if (n < 1 || n > 4) throw InvalidInput("holder_chain: n must be in [1, 4]");
  if (box < 0) throw InvalidInput("holder_chain: box must be >= 0");
  const int dim = oracle.dim();
  SiteList sites;
  LatticePoint c(dim);
  auto rec = [&](auto&& self, int pos) -> void {
    if (pos == dim) {
      sites.push_back(c);
      return;
    }
    for (int v = -box; v <= box; ++v) {
      c[pos] = v;
      self(self, pos + 1);
    }
  };
  rec(rec, 0);
  const std::size_t m = sites.size();
  const LatticePoint origin(dim);
  const std::size_t origin_idx = m;  // extra index for the origin
  std::vector<double> g((m + 1) * (m + 1));
  auto at = [&](std::size_t i) -> const LatticePoint& { return i == origin_idx ? origin : sites[i]; };
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = 0; j <= m; ++j) g[i * (m + 1) + j] = oracle(at(j) - at(i));
  }

  std::vector<int> perm(static_cast<std::size_t>(n));
  std::vector<std::size_t> tuple(static_cast<std::size_t>(n));
  const double nf = factorial(n);
  HolderChain out;
  auto visit = [&]() {
    double plain = 0.0, powered = 0.0;
    std::iota(perm.begin(), perm.end(), 0);
    do {
      double prod = 1.0;
      std::size_t prev = origin_idx;
      for (int i : perm) {
        prod *= g[prev * (m + 1) + tuple[static_cast<std::size_t>(i)]];
        prev = tuple[static_cast<std::size_t>(i)];
      }
      plain += prod;
      powered += std::pow(prod, q);
    } while (std::next_permutation(perm.begin(), perm.end()));
    out.lhs += std::pow(plain, q);
    out.middle += std::pow(nf, q - 1.0) * powered;
    double chain = 1.0;
    std::size_t prev = origin_idx;
    for (auto t : tuple) {
      chain *= g[prev * (m + 1) + t];
      prev = t;
    }
    out.rhs += std::pow(nf, q) * std::pow(chain, q);
  };
  auto loop = [&](auto&& self, int pos) -> void {
    if (pos == n) {
      visit();
      return;
    }
    for (std::size_t i = 0; i < m; ++i) {
      tuple[static_cast<std::size_t>(pos)] = i;
      self(self, pos + 1);
    }
  };
  loop(loop, 0);
  return out;
}

std::vector<double> zeta_samples(double q, int dim, std::uint64_t replicas, std::int64_t stop_radius,
                                 std::uint64_t seed, const ParallelConfig& parallel) {
  if (replicas < 1) throw InvalidInput("zeta_samples: replicas must be >= 1");
  auto parts = map_chunks(replicas, parallel, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<double> v;
    v.reserve(end - begin);
    for (std::uint64_t p = begin; p < end; ++p) {
      const auto [a, b] = simulate_pair(dim, stop_radius, seed, p);
      v.push_back(zeta(a, b, q).value);
    }
    return v;
  });
  std::vector<double> out;
  out.reserve(replicas);
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

MomentTable moment_bound_constant(double q, int dim, int n_max, std::uint64_t replicas, std::int64_t stop_radius,
                                  std::uint64_t seed, const ParallelConfig& parallel) {
  if (n_max < 1 || n_max > 4) throw InvalidInput("moment_bound_constant: n_max must be in [1, 4]");
  const std::vector<double> samples = zeta_samples(q, dim, replicas, stop_radius, seed, parallel);
  MomentTable out;
  out.q = q;
  out.replicas = replicas;
  for (int n = 1; n <= n_max; ++n) {
    MomentAccumulator acc;
    for (double x : samples) acc.add(std::pow(x, n));
    MomentRow row;
    row.n = n;
    row.estimate = acc.mean();
    row.standard_error = acc.standard_error();
    out.constant = std::max(out.constant, std::pow(row.estimate / std::pow(factorial(n), q), 1.0 / n));
    out.rows.push_back(row);
  }
  for (auto& row : out.rows) row.envelope = std::pow(out.constant, row.n) * std::pow(factorial(row.n), q);
  return out;
}

std::vector<double> default_exponent_grid() {
  std::vector<double> grid;
  for (int k = 0; k <= 10; ++k) grid.push_back(0.30 + 0.05 * k);
  return grid;
}

TailEstimate tail_fit(std::span<const double> samples, std::span<const double> exponent_grid,
                      std::span<const double> log_weights) {
  constexpr std::size_t kMinSamples = 10000;
  constexpr std::uint64_t kMinExceed = 10;
  constexpr int kLevels = 20;
  if (samples.size() < kMinSamples) {
    throw InvalidInput("tail_fit: need at least " + std::to_string(kMinSamples) + " samples, got " +
                       std::to_string(samples.size()));
  }
  if (!log_weights.empty() && log_weights.size() != samples.size()) {
    throw InvalidInput("tail_fit: weights and samples differ in length");
  }
  if (exponent_grid.empty()) throw InvalidInput("tail_fit: empty exponent grid");
  const std::size_t n = samples.size();
  std::vector<double> w = log_weights.empty() ? std::vector<double>(n, 1.0 / static_cast<double>(n))
                                              : normalized_weights(log_weights);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return samples[a] < samples[b]; });
  std::vector<double> x(n), wx(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = samples[order[i]];
    wx[i] = w[order[i]];
  }
  // tail[i] = weight of samples at sorted positions >= i.
  std::vector<double> tail(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) tail[i] = tail[i + 1] + wx[i];
  // Survival and exceedance count at threshold t: samples strictly above t.
  auto above = [&](double t) {
    const auto pos = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin());
    return std::pair<double, std::uint64_t>{tail[pos], n - pos};
  };

  TailEstimate out;
  out.n_samples = n;
  const double top = 0.5;
  const double floor_level = above(x[n - kMinExceed - 1]).first;
  auto refuse = [] { return NumericFailure("moments", "insufficient tail resolution"); };
  if (!(floor_level > 0.0) || floor_level >= top) throw refuse();

  std::vector<double> thresholds;
  for (int k = 0; k < kLevels; ++k) {
    const double level = top * std::pow(floor_level / top, static_cast<double>(k) / (kLevels - 1));
    // Smallest sample value with survival <= level.
    const auto it = std::partition_point(x.begin(), x.end(), [&](double v) { return above(v).first > level; });
    if (it == x.end()) continue;
    const double t = *it;
    const auto [s, count] = above(t);
    if (count < kMinExceed || !(s > 0.0)) continue;
    if (thresholds.empty() || t > thresholds.back()) thresholds.push_back(t);
  }
  for (double t : thresholds) {
    const auto [s, count] = above(t);
    TailRow row{t, s, 0.0, count};
    if (log_weights.empty()) {
      row.standard_error = std::sqrt(s * (1.0 - s) / static_cast<double>(n));
    } else {
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double r = (x[i] > t ? 1.0 : 0.0) - s;
        v += wx[i] * wx[i] * r * r;
      }
      row.standard_error = std::sqrt(v);
    }
    out.rows.push_back(row);
  }

  std::vector<const TailRow*> usable;
  for (const auto& r : out.rows) {
    if (r.threshold > 0.0) usable.push_back(&r);
  }
  if (usable.size() < 5) throw refuse();

  out.r_squared = -std::numeric_limits<double>::infinity();
  for (double alpha : exponent_grid) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double m = static_cast<double>(usable.size());
    for (const auto* r : usable) {
      const double u = std::pow(r->threshold, alpha);
      const double v = std::log(r->survival);
      sx += u;
      sy += v;
      sxx += u * u;
      sxy += u * v;
      syy += v * v;
    }
    const double cxx = sxx - sx * sx / m;
    const double cxy = sxy - sx * sy / m;
    const double cyy = syy - sy * sy / m;
    if (!(cxx > 0.0)) continue;
    const double slope = cxy / cxx;
    const double r2 = cyy > 0.0 ? cxy * cxy / (cxx * cyy) : 1.0;
    out.grid_r_squared.emplace_back(alpha, r2);
    if (r2 > out.r_squared) {
      out.r_squared = r2;
      out.alpha = alpha;
      out.kappa = -slope;
      out.intercept = (sy - slope * sx) / m;
    }
  }
  if (out.grid_r_squared.empty()) throw refuse();
  return out;
}

std::string tail_csv(const TailEstimate& tail) {
  std::string s = "# schema: tail/v1\nthreshold,survival,se,n_samples\n";
  for (const auto& r : tail.rows) {
    s += format_double(r.threshold) + ',' + format_double(r.survival) + ',' + format_double(r.standard_error) + ',' +
         std::to_string(tail.n_samples) + '\n';
  }
  return s;
}

nlohmann::json tail_json(const TailEstimate& tail) {
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& [a, r2] : tail.grid_r_squared) grid.push_back({{"alpha", a}, {"r_squared", r2}});
  return {{"kappa", tail.kappa},
          {"alpha", tail.alpha},
          {"r_squared", tail.r_squared},
          {"intercept", tail.intercept},
          {"n_samples", tail.n_samples},
          {"thresholds", tail.rows.size()},
          {"grid", grid}};
}

}  // namespace iltlab
