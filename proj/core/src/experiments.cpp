#include "iltlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "iltlab/capacity.hpp"
#include "iltlab/moments.hpp"
#include "iltlab/stats.hpp"

namespace iltlab {

const char* to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::IntersectionDecomposition:
      return "intersection-decomposition";
    case ExperimentKind::LevelSetGeometry:
      return "level-set-geometry";
    case ExperimentKind::RangeIntersection:
      return "range-intersection";
    case ExperimentKind::IntersectionTail:
      return "intersection-tail";
  }
  return "?";
}

namespace {

using nlohmann::json;

const std::set<std::string> kKnownFields = {
    "kind", "dim", "seed", "replicas", "stop_radius", "oracle_box", "chunk", "theta", "return_target", "t", "A",
    "n", "m", "L", "epsilon", "capacity_bin", "include_start", "q", "grid"};

template <typename Int>
Int read_int(const json& j, const char* key, Int fallback, Int lo, Int hi) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(key, "must be an integer");
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(hi)) throw ConfigError(key, "must be <= " + std::to_string(hi));
    if (static_cast<Int>(u) < lo) throw ConfigError(key, "must be >= " + std::to_string(lo));
    return static_cast<Int>(u);
  }
  const auto s = v.get<std::int64_t>();
  if (s < static_cast<std::int64_t>(lo)) throw ConfigError(key, "must be >= " + std::to_string(lo));
  if (s > static_cast<std::int64_t>(hi) && hi <= static_cast<Int>(std::numeric_limits<std::int64_t>::max())) {
    throw ConfigError(key, "must be <= " + std::to_string(hi));
  }
  return static_cast<Int>(s);
}

double read_double(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(key, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(key, "must be finite");
  return x;
}

std::vector<double> read_list(const json& j, const char* key) {
  if (!j.contains(key)) return {};
  const auto& v = j.at(key);
  if (!v.is_array()) throw ConfigError(key, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(key, "must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

void require(const json& j, const char* key, ExperimentKind kind) {
  if (!j.contains(key)) throw ConfigError(key, std::string("required for ") + to_string(kind));
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKnownFields.contains(key)) throw ConfigError(key, "unknown field");
  }
  ExperimentConfig c;
  if (!j.contains("kind") || !j.at("kind").is_string()) throw ConfigError("kind", "required string");
  const auto kind = j.at("kind").get<std::string>();
  bool found = false;
  for (auto k : {ExperimentKind::IntersectionDecomposition, ExperimentKind::LevelSetGeometry,
                 ExperimentKind::RangeIntersection, ExperimentKind::IntersectionTail}) {
    if (kind == to_string(k)) {
      c.kind = k;
      found = true;
    }
  }
  if (!found) throw ConfigError("kind", "unknown experiment kind '" + kind + "'");

  c.dim = read_int<int>(j, "dim", c.dim, 3, kMaxDim);
  c.seed = read_int<std::uint64_t>(j, "seed", c.seed, 0, std::numeric_limits<std::uint64_t>::max());
  c.replicas = read_int<std::uint64_t>(j, "replicas", c.replicas, 1, std::uint64_t{1} << 40);
  c.stop_radius = read_int<std::int64_t>(j, "stop_radius", c.stop_radius, 2, 100000);
  c.oracle_box = read_int<int>(j, "oracle_box", c.oracle_box, 4, 64);
  c.chunk = read_int<std::uint64_t>(j, "chunk", c.chunk, 1, std::uint64_t{1} << 32);
  c.theta = read_double(j, "theta", c.theta);
  if (!(c.theta >= 0.0 && c.theta < 1.0)) throw ConfigError("theta", "must lie in [0, 1)");
  c.return_target = read_int<std::uint64_t>(j, "return_target", c.return_target, 1, std::uint64_t{1} << 32);
  c.t = read_double(j, "t", c.t);
  c.a_grid = read_list(j, "A");
  c.n = read_int<int>(j, "n", c.n, 1, 1 << 30);
  c.m = read_int<int>(j, "m", c.m, 1, 1 << 30);
  c.L = read_int<int>(j, "L", c.L, 1, 1 << 30);
  c.epsilon = read_double(j, "epsilon", c.epsilon);
  c.capacity_bin = read_double(j, "capacity_bin", c.capacity_bin);
  if (!(c.capacity_bin > 0.0)) throw ConfigError("capacity_bin", "must be positive");
  if (j.contains("include_start")) {
    if (!j.at("include_start").is_boolean()) throw ConfigError("include_start", "must be a boolean");
    c.include_start = j.at("include_start").get<bool>();
  }
  c.q = read_double(j, "q", c.q);
  c.exponent_grid = j.contains("grid") ? read_list(j, "grid") : default_exponent_grid();
  if (c.exponent_grid.empty()) throw ConfigError("grid", "must not be empty");
  for (double a : c.exponent_grid) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("grid", "exponents must lie in (0, 1)");
  }

  switch (c.kind) {
    case ExperimentKind::IntersectionDecomposition:
      require(j, "t", c.kind);
      require(j, "A", c.kind);
      if (!(c.t > 0.0)) throw ConfigError("t", "must be positive");
      if (c.a_grid.empty()) throw ConfigError("A", "must not be empty");
      for (double a : c.a_grid) {
        if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("A", "entries must be positive and finite");
      }
      std::sort(c.a_grid.begin(), c.a_grid.end());
      break;
    case ExperimentKind::LevelSetGeometry:
      for (const char* k : {"n", "m", "L", "epsilon"}) require(j, k, c.kind);
      if (!(c.epsilon > 0.0 && c.epsilon < 2.0 / c.dim)) throw ConfigError("epsilon", "must lie in (0, 2/d)");
      break;
    case ExperimentKind::RangeIntersection:
      require(j, "L", c.kind);
      if (!(c.epsilon > 0.0)) throw ConfigError("epsilon", "must be positive");
      if (c.replicas < 10000) throw ConfigError("replicas", "tail fits need >= 10000 samples");
      break;
    case ExperimentKind::IntersectionTail:
      if (!(c.q > 1.0 && c.q <= 2.0)) throw ConfigError("q", "must lie in (1, 2]");
      if (c.replicas < 10000) throw ConfigError("replicas", "tail fits need >= 10000 samples");
      break;
  }
  return c;
}

json ExperimentConfig::to_json() const {
  return {{"kind", to_string(kind)},
          {"dim", dim},
          {"seed", seed},
          {"replicas", replicas},
          {"stop_radius", stop_radius},
          {"oracle_box", oracle_box},
          {"chunk", chunk},
          {"theta", theta},
          {"return_target", return_target},
          {"t", t},
          {"A", a_grid},
          {"n", n},
          {"m", m},
          {"L", L},
          {"epsilon", epsilon},
          {"capacity_bin", capacity_bin},
          {"include_start", include_start},
          {"q", q},
          {"grid", exponent_grid}};
}

TiltConfig ExperimentConfig::tilt() const {
  TiltConfig t;
  t.theta = theta;
  t.return_target = return_target;
  t.stop_radius = stop_radius;
  return t;
}

double intersection(const LocalTimeField& a, const LocalTimeField& b) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  double s = 0.0;
  for (const auto& [z, c] : small.counts()) {
    const auto other = large.at(z);
    if (other > 0) s += static_cast<double>(c) * static_cast<double>(other);
  }
  return s;
}

namespace {

ParallelConfig with_chunk(ParallelConfig p, const ExperimentConfig& cfg) {
  p.chunk = cfg.chunk;
  return p;
}

struct Weighted {
  std::vector<double> log_weights;
  std::vector<std::size_t> index;  // sample positions
};

Weighted valid_samples(const std::vector<WeightedSample>& samples) {
  Weighted w;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].valid) {
      w.log_weights.push_back(samples[i].log_weight);
      w.index.push_back(i);
    }
  }
  if (w.index.empty()) throw NumericFailure("experiments", "effective sample size too small");
  return w;
}

void require_ess(double ess) {
  if (!(ess >= kMinEffectiveSampleSize)) throw NumericFailure("experiments", "effective sample size too small");
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) s += ',';
    s += c;
    first = false;
  }
  return s + '\n';
}

std::string fmt(double x) { return format_double(x); }
std::string fmt(std::uint64_t x) { return std::to_string(x); }

std::size_t excluded(const std::vector<WeightedSample>& samples) {
  return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(), [](const auto& s) { return !s.valid; }));
}

// Weighted mean of an indicator over the valid samples, with its standard error.
WeightedSummary indicator_summary(const std::vector<WeightedSample>& samples, const Weighted& w,
                                  const std::function<bool(const WeightedSample&)>& event) {
  std::vector<double> v;
  for (auto i : w.index) v.push_back(event(samples[i]) ? 1.0 : 0.0);
  return summarize_weighted(w.log_weights, v);
}

}  // namespace

ExperimentOutput run_intersection_decomposition(const ExperimentConfig& cfg, const GreenOracle& oracle,
                                                const ParallelConfig& parallel) {
  std::vector<double> thresholds;
  for (double a : cfg.a_grid) thresholds.push_back(std::sqrt(cfg.t) / a);
  thresholds.push_back(0.0);  // A = infinity
  const std::size_t k = thresholds.size();

  auto samples = forced_return_pairs(
      cfg.dim, cfg.tilt(), oracle, cfg.seed, cfg.replicas,
      [&](const LocalTimeField& a, const LocalTimeField& b) {
        std::vector<double> v(k + 1, 0.0);
        for (const auto& [z, la] : a.counts()) {
          const auto lb = b.at(z);
          if (lb == 0) continue;
          const double prod = static_cast<double>(la) * static_cast<double>(lb);
          v[0] += prod;
          for (std::size_t i = 0; i < k; ++i) {
            if (static_cast<double>(la) >= thresholds[i] && static_cast<double>(lb) >= thresholds[i]) v[i + 1] += prod;
          }
        }
        return v;
      },
      with_chunk(parallel, cfg));

  auto a_label = [&](std::size_t i) { return i + 1 < k ? fmt(cfg.a_grid[i]) : std::string("inf"); };
  std::string pairs = "# schema: decomposition-pairs/v1\npair,log_weight,valid,intersection";
  for (std::size_t i = 0; i < k; ++i) pairs += ",outside_A" + a_label(i);
  pairs += '\n';
  for (const auto& s : samples) {
    pairs += fmt(s.replica) + ',' + fmt(s.log_weight) + ',' + (s.valid ? "1" : "0");
    if (s.valid) {
      pairs += ',' + fmt(s.values[0]);
      for (std::size_t i = 0; i < k; ++i) pairs += ',' + fmt(s.values[0] - s.values[i + 1]);
    } else {
      pairs += ',';
      for (std::size_t i = 0; i < k; ++i) pairs += ',';
    }
    pairs += '\n';
  }

  const Weighted w = valid_samples(samples);
  const auto event = indicator_summary(samples, w, [&](const auto& s) { return s.values[0] > cfg.t; });
  std::vector<double> cond_lw;
  std::vector<std::size_t> cond;
  for (std::size_t j = 0; j < w.index.size(); ++j) {
    if (samples[w.index[j]].values[0] > cfg.t) {
      cond_lw.push_back(w.log_weights[j]);
      cond.push_back(w.index[j]);
    }
  }
  if (cond.empty()) throw NumericFailure("experiments", "effective sample size too small");
  const std::vector<double> cond_w = normalized_weights(cond_lw);
  std::string summary =
      "# schema: decomposition/v1\nA,threshold,event_probability,event_se,ess,mean_outside_fraction,"
      "mean_outside_se,median_outside_fraction\n";
  json rows = json::array();
  double ess = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> frac;
    for (auto idx : cond) frac.push_back((samples[idx].values[0] - samples[idx].values[i + 1]) / samples[idx].values[0]);
    const auto s = summarize_weighted(cond_lw, frac);
    ess = s.effective_sample_size;
    const double median = weighted_quantile(frac, cond_w, 0.5);
    summary += csv_row({a_label(i), fmt(thresholds[i]), fmt(event.mean), fmt(event.standard_error),
                        fmt(s.effective_sample_size), fmt(s.mean), fmt(s.standard_error), fmt(median)});
    rows.push_back({{"A", a_label(i)}, {"mean_outside_fraction", s.mean}, {"median_outside_fraction", median}});
  }
  require_ess(ess);

  ExperimentOutput out;
  out.files = {{"pairs.csv", pairs}, {"summary.csv", summary}};
  out.summary = {{"event_probability", event.mean},
                 {"event_se", event.standard_error},
                 {"conditional_ess", ess},
                 {"excluded", excluded(samples)},
                 {"rows", rows}};
  return out;
}

ExperimentOutput run_level_set_geometry(const ExperimentConfig& cfg, const GreenOracle& oracle,
                                        const ParallelConfig& parallel) {
  const double threshold = std::pow(static_cast<double>(cfg.L), 1.0 - 2.0 / cfg.dim + cfg.epsilon);
  const double per_site = 1.0 / oracle.at_origin();
  // values: volume, capacity (NaN when not computed), covered by the oracle.
  auto samples = forced_return_pairs(
      cfg.dim, cfg.tilt(), oracle, cfg.seed, cfg.replicas,
      [&](const LocalTimeField& a, const LocalTimeField& b) {
        const SiteList la = level_set(a, Exactly{static_cast<std::uint64_t>(cfg.n)});
        const SiteList lb = level_set(b, Exactly{static_cast<std::uint64_t>(cfg.m)});
        SiteList both;
        std::set_intersection(la.begin(), la.end(), lb.begin(), lb.end(), std::back_inserter(both));
        std::vector<double> v{static_cast<double>(both.size()), std::numeric_limits<double>::quiet_NaN(), 1.0};
        if (static_cast<int>(both.size()) >= cfg.L) {
          try {
            v[1] = equilibrium_solve(both, oracle).capacity;
          } catch (const InvalidInput&) {
            v[2] = 0.0;
          }
        }
        return v;
      },
      with_chunk(parallel, cfg));

  std::string pairs = "# schema: level-set-pairs/v1\npair,log_weight,valid,volume,capacity,capacity_bound,below_threshold\n";
  for (const auto& s : samples) {
    pairs += fmt(s.replica) + ',' + fmt(s.log_weight) + ',' + (s.valid ? "1" : "0") + ',';
    if (s.valid) {
      pairs += fmt(static_cast<std::uint64_t>(s.values[0])) + ',';
      if (!std::isnan(s.values[1])) {
        pairs += fmt(s.values[1]) + ',' + fmt(per_site * s.values[0]) + ',' + (s.values[1] < threshold ? "1" : "0");
      } else {
        pairs += ",,";
      }
    } else {
      pairs += ",,,";
    }
    pairs += '\n';
  }

  const Weighted w = valid_samples(samples);
  const auto event = indicator_summary(samples, w, [&](const auto& s) { return s.values[0] >= cfg.L; });
  std::vector<double> cond_lw, caps;
  std::uint64_t uncovered = 0;
  for (std::size_t j = 0; j < w.index.size(); ++j) {
    const auto& s = samples[w.index[j]];
    if (s.values[0] < cfg.L) continue;
    if (std::isnan(s.values[1])) {
      ++uncovered;
      continue;
    }
    cond_lw.push_back(w.log_weights[j]);
    caps.push_back(s.values[1]);
  }
  if (caps.empty()) throw NumericFailure("experiments", "effective sample size too small");
  const auto cap_summary = summarize_weighted(cond_lw, caps);
  require_ess(cap_summary.effective_sample_size);
  const auto cw = normalized_weights(cond_lw);
  std::vector<double> below(caps.size());
  for (std::size_t i = 0; i < caps.size(); ++i) below[i] = caps[i] < threshold ? 1.0 : 0.0;
  const auto below_summary = summarize_weighted(cond_lw, below);

  const double top = *std::max_element(caps.begin(), caps.end());
  const auto bins = static_cast<std::size_t>(std::floor(top / cfg.capacity_bin)) + 1;
  std::vector<double> hist(bins, 0.0);
  for (std::size_t i = 0; i < caps.size(); ++i) hist[static_cast<std::size_t>(std::floor(caps[i] / cfg.capacity_bin))] += cw[i];
  std::string histogram = "# schema: capacity-histogram/v1\nbin_lo,bin_hi,weight\n";
  for (std::size_t b = 0; b < bins; ++b) {
    histogram += csv_row({fmt(b * cfg.capacity_bin), fmt((b + 1) * cfg.capacity_bin), fmt(hist[b])});
  }
  const double q10 = weighted_quantile(caps, cw, 0.1);
  const double q50 = weighted_quantile(caps, cw, 0.5);
  const double q90 = weighted_quantile(caps, cw, 0.9);
  std::string summary =
      "# schema: level-set/v1\nn,m,L,epsilon,threshold,volume_probability,volume_se,ess,capacity_q10,capacity_q50,"
      "capacity_q90,below_threshold_fraction,below_threshold_se,uncovered\n";
  summary += csv_row({std::to_string(cfg.n), std::to_string(cfg.m), std::to_string(cfg.L), fmt(cfg.epsilon),
                      fmt(threshold), fmt(event.mean), fmt(event.standard_error), fmt(cap_summary.effective_sample_size),
                      fmt(q10), fmt(q50), fmt(q90), fmt(below_summary.mean), fmt(below_summary.standard_error),
                      fmt(uncovered)});

  ExperimentOutput out;
  out.files = {{"pairs.csv", pairs}, {"histogram.csv", histogram}, {"summary.csv", summary}};
  out.summary = {{"threshold", threshold},
                 {"volume_probability", event.mean},
                 {"conditional_ess", cap_summary.effective_sample_size},
                 {"capacity_median", q50},
                 {"below_threshold_fraction", below_summary.mean},
                 {"uncovered", uncovered},
                 {"excluded", excluded(samples)}};
  return out;
}

ExperimentOutput run_range_intersection(const ExperimentConfig& cfg, const GreenOracle& oracle,
                                        const ParallelConfig& parallel) {
  auto in_range = [&](const LatticePoint& z, std::uint64_t c) {
    return cfg.include_start || !z.is_origin() || c > 1;
  };
  // values: volume, met (an independent early-exit scan).
  auto samples = forced_return_pairs(
      cfg.dim, cfg.tilt(), oracle, cfg.seed, cfg.replicas,
      [&](const LocalTimeField& a, const LocalTimeField& b) {
        double volume = 0.0;
        for (const auto& [z, c] : a.counts()) {
          if (in_range(z, c) && in_range(z, b.at(z)) && b.at(z) > 0) volume += 1.0;
        }
        bool met = false;
        for (const auto& [z, c] : b.counts()) {
          if (!in_range(z, c)) continue;
          const auto ca = a.at(z);
          if (ca > 0 && in_range(z, ca)) {
            met = true;
            break;
          }
        }
        return std::vector<double>{volume, met ? 1.0 : 0.0};
      },
      with_chunk(parallel, cfg));

  std::string pairs = "# schema: range-pairs/v1\npair,log_weight,valid,volume,met\n";
  for (const auto& s : samples) {
    pairs += fmt(s.replica) + ',' + fmt(s.log_weight) + ',' + (s.valid ? "1" : "0") + ',';
    pairs += s.valid ? fmt(static_cast<std::uint64_t>(s.values[0])) + ',' + (s.values[1] > 0 ? "1" : "0") : std::string(",");
    pairs += '\n';
  }
  const Weighted w = valid_samples(samples);
  std::vector<double> volumes;
  for (auto i : w.index) volumes.push_back(samples[i].values[0]);
  const auto all = summarize_weighted(w.log_weights, volumes);
  require_ess(all.effective_sample_size);
  const auto at_least_one = indicator_summary(samples, w, [](const auto& s) { return s.values[0] >= 1.0; });
  const auto never = indicator_summary(samples, w, [](const auto& s) { return s.values[1] == 0.0; });
  const auto at_least_l = indicator_summary(samples, w, [&](const auto& s) { return s.values[0] >= cfg.L; });
  const TailEstimate tail = tail_fit(volumes, cfg.exponent_grid,
                                     cfg.theta > 0.0 ? std::span<const double>(w.log_weights) : std::span<const double>{});
  const double centre = 1.0 - 2.0 / cfg.dim;
  const bool in_window = tail.alpha >= centre - cfg.epsilon && tail.alpha <= centre + cfg.epsilon;
  std::string summary =
      "# schema: range/v1\nL,volume_at_least_L,volume_at_least_L_se,volume_at_least_1,never_meet,alpha,kappa,"
      "r_squared,window_lo,window_hi,in_window\n";
  summary += csv_row({std::to_string(cfg.L), fmt(at_least_l.mean), fmt(at_least_l.standard_error),
                      fmt(at_least_one.mean), fmt(never.mean), fmt(tail.alpha), fmt(tail.kappa), fmt(tail.r_squared),
                      fmt(centre - cfg.epsilon), fmt(centre + cfg.epsilon), in_window ? "1" : "0"});

  ExperimentOutput out;
  out.files = {{"pairs.csv", pairs}, {"tail.csv", tail_csv(tail)}, {"summary.csv", summary}};
  out.summary = {{"volume_at_least_L", at_least_l.mean},
                 {"volume_at_least_1", at_least_one.mean},
                 {"never_meet", never.mean},
                 {"tail", tail_json(tail)},
                 {"window", {centre - cfg.epsilon, centre + cfg.epsilon}},
                 {"in_window", in_window},
                 {"ess", all.effective_sample_size},
                 {"excluded", excluded(samples)}};
  return out;
}

ExperimentOutput run_intersection_tail(const ExperimentConfig& cfg, const GreenOracle& oracle,
                                       const ParallelConfig& parallel) {
  auto samples = forced_return_pairs(
      cfg.dim, cfg.tilt(), oracle, cfg.seed, cfg.replicas,
      [&](const LocalTimeField& a, const LocalTimeField& b) { return std::vector<double>{zeta(a, b, cfg.q).value}; },
      with_chunk(parallel, cfg));
  std::string rows = "# schema: zeta-samples/v1\npair,log_weight,valid,zeta\n";
  for (const auto& s : samples) {
    rows += fmt(s.replica) + ',' + fmt(s.log_weight) + ',' + (s.valid ? "1" : "0") + ',' +
            (s.valid ? fmt(s.values[0]) : std::string()) + '\n';
  }
  const Weighted w = valid_samples(samples);
  std::vector<double> values;
  for (auto i : w.index) values.push_back(samples[i].values[0]);
  const auto mean = summarize_weighted(w.log_weights, values);
  require_ess(mean.effective_sample_size);
  const TailEstimate tail = tail_fit(values, cfg.exponent_grid,
                                     cfg.theta > 0.0 ? std::span<const double>(w.log_weights) : std::span<const double>{});
  ExperimentOutput out;
  out.files = {{"samples.csv", rows}, {"tail.csv", tail_csv(tail)}};
  out.summary = {{"q", cfg.q},
                 {"mean", mean.mean},
                 {"mean_se", mean.standard_error},
                 {"ess", mean.effective_sample_size},
                 {"tail", tail_json(tail)},
                 {"excluded", excluded(samples)}};
  return out;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg, const GreenOracle& oracle, const ParallelConfig& parallel) {
  if (oracle.dim() != cfg.dim) throw InvalidInput("experiment: oracle dimension differs from config");
  switch (cfg.kind) {
    case ExperimentKind::IntersectionDecomposition:
      return run_intersection_decomposition(cfg, oracle, parallel);
    case ExperimentKind::LevelSetGeometry:
      return run_level_set_geometry(cfg, oracle, parallel);
    case ExperimentKind::RangeIntersection:
      return run_range_intersection(cfg, oracle, parallel);
    case ExperimentKind::IntersectionTail:
      return run_intersection_tail(cfg, oracle, parallel);
  }
  throw InvalidInput("experiment: unknown kind");
}

}  // namespace iltlab
