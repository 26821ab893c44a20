#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "iltlab/capacity.hpp"
#include "iltlab/error.hpp"
#include "iltlab/experiments.hpp"
#include "iltlab/green.hpp"
#include "iltlab/lattice.hpp"
#include "iltlab/moments.hpp"
#include "iltlab/parallel.hpp"
#include "iltlab/rate.hpp"
#include "iltlab/rng.hpp"
#include "iltlab/stats.hpp"
#include "iltlab/trail.hpp"
#include "iltlab/walk.hpp"
#include "support.hpp"

#ifdef ILTLAB_HAVE_CLI
#include "cli.hpp"
#endif

using namespace iltlab;

namespace {

constexpr int kDim = 5;
constexpr int kBox = 40;

ParallelConfig g_parallel{1, 256};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const GreenOracle& oracle() { return test::oracle(kDim, kBox); }

// Visit counts of one walk on a fixed site list; time 0 included.
std::vector<std::uint32_t> visit_counts(const SiteIndex& index, std::int64_t radius, std::uint64_t seed,
                                        std::uint64_t replica) {
  std::vector<std::uint32_t> c(index.size(), 0);
  WalkState w = start_walk(kDim, seed, replica);
  walk_in_ball(w, radius, [&](const LatticePoint& z) {
    const int i = index.find(z);
    if (i >= 0) ++c[static_cast<std::size_t>(i)];
    return true;
  });
  return c;
}

Outcome green_consistency() {
  const auto& g = oracle();
  constexpr int r = 3;
  constexpr int side = 2 * r + 1;
  constexpr std::int64_t radius = 60;
  constexpr std::uint64_t replicas = 1'000'000;
  constexpr std::uint64_t seed = 101;

  std::map<LatticePoint, int> orbit_of;
  std::vector<LatticePoint> reps;
  std::vector<int> cell(static_cast<std::size_t>(std::pow(side, kDim)));
  SiteList cube;
  for (std::size_t k = 0; k < cell.size(); ++k) {
    LatticePoint z(kDim);
    std::size_t rest = k;
    for (int i = 0; i < kDim; ++i) {
      z[i] = static_cast<LatticePoint::Coord>(static_cast<int>(rest % side) - r);
      rest /= side;
    }
    const auto c = canonical(z);
    auto [it, fresh] = orbit_of.emplace(c, static_cast<int>(reps.size()));
    if (fresh) reps.push_back(c);
    cell[k] = it->second;
    cube.push_back(z);
  }
  const std::size_t n_orbits = reps.size();
  std::vector<double> members(n_orbits);
  for (std::size_t o = 0; o < n_orbits; ++o) members[o] = static_cast<double>(orbit_size(reps[o]));

  auto partials = map_chunks(replicas, g_parallel, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<MomentAccumulator> acc(n_orbits);
    std::vector<std::uint32_t> counts(n_orbits);
    for (std::uint64_t rep = begin; rep < end; ++rep) {
      std::fill(counts.begin(), counts.end(), 0);
      WalkState w = start_walk(kDim, seed, rep);
      walk_in_ball(w, radius, [&](const LatticePoint& z) {
        std::size_t k = 0;
        for (int i = kDim - 1; i >= 0; --i) {
          const int x = z[i];
          if (x < -r || x > r) return true;
          k = k * side + static_cast<std::size_t>(x + r);
        }
        ++counts[static_cast<std::size_t>(cell[k])];
        return true;
      });
      for (std::size_t o = 0; o < n_orbits; ++o) acc[o].add(counts[o] / members[o]);
    }
    return acc;
  });
  std::vector<MomentAccumulator> acc(n_orbits);
  for (const auto& p : partials) {
    for (std::size_t o = 0; o < n_orbits; ++o) acc[o].merge(p[o]);
  }

  const double bias = truncation_bias_bound(radius, cube, g).bias_bound;
  int bad = 0;
  double worst = 0.0;
  for (std::size_t o = 0; o < n_orbits; ++o) {
    const double se = acc[o].standard_error();
    const double diff = std::abs(acc[o].mean() - g(reps[o]));
    const double tol = 3.0 * se + bias + g.boundary_error_bound();
    worst = std::max(worst, diff / tol);
    if (diff > tol) {
      ++bad;
      std::printf("    orbit %s: mc %.6f table %.6f se %.2e\n", reps[o].to_string().c_str(), acc[o].mean(), g(reps[o]), se);
    }
  }
  return {bad == 0, fmt("%zu orbits (%zu sites), %llu walks, R=%lld, bias %.2e, worst |diff|/tol %.3f", n_orbits,
                        cube.size(), static_cast<unsigned long long>(replicas), static_cast<long long>(radius), bias, worst)};
}

Outcome intersection_mean() {
  const auto& g = oracle();
  constexpr std::int64_t radius = 40;
  constexpr std::uint64_t pairs = 100'000;
  constexpr std::uint64_t seed = 202;
  const auto ball = GreenOracle::solve_ball(kDim, static_cast<int>(radius));

  auto partials = map_chunks(pairs, g_parallel, [&](std::uint64_t begin, std::uint64_t end) {
    MomentAccumulator acc;
    for (std::uint64_t p = begin; p < end; ++p) {
      const auto [a, b] = simulate_pair(kDim, radius, seed, p);
      acc.add(intersection(a, b));
    }
    return acc;
  });
  MomentAccumulator acc;
  for (const auto& p : partials) acc.merge(p);

  const double target = g.square_sum();
  // The truncated walks estimate the killed-ball series exactly; the gap to the box
  // series is the bias certificate.
  const double bias = std::abs(target - ball.square_sum());
  const double diff = std::abs(acc.mean() - target);
  const double tol = 3.0 * acc.standard_error() + bias;
  return {diff <= tol, fmt("mean %.5f se %.5f vs sum G^2 %.5f (ball %.5f), |diff| %.5f <= %.5f", acc.mean(),
                           acc.standard_error(), target, ball.square_sum(), diff, tol)};
}

double capacity_of(const SiteList& s, const GreenOracle& g) {
  return s.empty() ? 0.0 : equilibrium_solve(s, g).capacity;
}

SiteList translated(const SiteList& s, const LatticePoint& v) {
  SiteList out;
  for (const auto& z : s) {
    LatticePoint y = z;
    for (int i = 0; i < kDim; ++i) y[i] = static_cast<LatticePoint::Coord>(y[i] + v[i]);
    out.push_back(y);
  }
  return normalized(out);
}

Outcome capacity_triple() {
  const auto& g = oracle();
  StreamRng rng(303, 0);
  constexpr std::uint64_t per_site = 2000;
  constexpr std::int64_t radius = 40;
  int bad = 0;
  double worst = 0.0;
  for (int k = 0; k < 25; ++k) {
    const std::size_t size = 1 + rng.below(32);
    const auto s = test::random_connected_set(kDim, size, rng);
    const auto eq = equilibrium_solve(s, g);
    const auto mc = capacity_mc(s, per_site, radius, 3030 + k, g, g_parallel);
    const auto var = variational_lower_bound(s, g);
    const double tol = 3.0 * mc.error + mc.bias_bound + eq.error;
    const double diff = std::abs(mc.capacity - eq.capacity);
    worst = std::max(worst, diff / tol);
    const bool ok = diff <= tol && eq.capacity >= var.bound - 1e-9 && mc.capacity + 3.0 * mc.error >= var.bound;
    if (!ok) {
      ++bad;
      std::printf("    |L|=%zu: mc %.5f se %.2e eq %.5f var %.5f\n", s.size(), mc.capacity, mc.error, eq.capacity, var.bound);
    }
  }

  int order_bad = 0;
  for (int k = 0; k < 50; ++k) {
    const auto a = test::random_connected_set(kDim, 1 + rng.below(16), rng);
    LatticePoint shift(kDim);
    for (int i = 0; i < kDim; ++i) shift[i] = static_cast<LatticePoint::Coord>(static_cast<int>(rng.below(7)) - 3);
    const auto b = translated(test::random_connected_set(kDim, 1 + rng.below(16), rng), shift);
    SiteList both = a, common;
    both.insert(both.end(), b.begin(), b.end());
    both = normalized(both);
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    const double ca = capacity_of(a, g), cb = capacity_of(b, g), cu = capacity_of(both, g), ci = capacity_of(common, g);
    const bool ok = ca <= cu + 1e-8 && cb <= cu + 1e-8 && ci <= std::min(ca, cb) + 1e-8 && cu + ci <= ca + cb + 1e-8;
    if (!ok) {
      ++order_bad;
      std::printf("    cap A %.6f B %.6f AuB %.6f AnB %.6f\n", ca, cb, cu, ci);
    }
  }
  return {bad == 0 && order_bad == 0,
          fmt("25 sets: %d outside 3 SE + bias (worst ratio %.3f); 50 monotone/subadditive instances: %d violations", bad,
              worst, order_bad)};
}

Outcome capacity_scaling() {
  const auto& g = oracle();
  StreamRng rng(404, 0);
  double lo = 1e300, hi = 0.0, kappa_min = 1e300;
  std::string rows;
  for (std::size_t size : {8, 27, 64}) {
    for (int k = 0; k < 10; ++k) {
      const auto s = test::random_connected_set(kDim, size, rng);
      const auto var = variational_lower_bound(s, g);
      const double ratio = equilibrium_solve(s, g).capacity / std::pow(static_cast<double>(size), 0.6);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      kappa_min = std::min(kappa_min, var.kappa_hat);
    }
  }
  return {kappa_min > 0.0 && hi <= 3.0 * lo,
          fmt("min kappa_hat %.4f; cap/|L|^0.6 in [%.4f, %.4f], spread %.3f (<= 3)", kappa_min, lo, hi, hi / lo)};
}

bool trail_ok(const EdgeOccupation& e) {
  if (!occupation_consistent(e)) return false;
  const auto ts = extract_trail_stock(e);
  if (!ts.holds) return false;
  for (const auto& l : ts.levels) {
    if (!l.holds) return false;
  }
  return loop_transfer_check(e, ts).holds;
}

Outcome trail_certificate() {
  std::uint64_t exhaustive = 0, failures = 0;
  for (int d : {3, 5}) {
    for (const auto& s : enumerate_small_sets(d, 2, 4, true, true)) {
      enumerate_visit_sequences(avoiding_costs(s, 8), 8, true, [&](const std::vector<int>& v) {
        ++exhaustive;
        if (!trail_ok(occupation_from_visits(s, v))) ++failures;
      });
    }
  }

  // Visit sequences of the walk watched on L, conditioned to cover L.
  const auto& g = oracle();
  StreamRng rng(505, 0);
  std::uint64_t sampled = 0;
  for (int set = 0; set < 200; ++set) {
    const auto s = test::random_connected_set(kDim, 8, rng);
    const auto h = harmonic_measure(s, g);
    const int n = static_cast<int>(s.size());
    auto draw = [&](int row) {
      double total = 0.0;
      for (int y = 0; y < n; ++y) total += h.q(row, y);
      double u = rng.uniform() * total;
      for (int y = 0; y < n; ++y) {
        u -= h.q(row, y);
        if (u < 0.0) return y;
      }
      return n - 1;
    };
    for (int k = 0; k < 50; ++k) {
      std::vector<int> v{draw(n)};
      std::vector<bool> seen(static_cast<std::size_t>(n), false);
      seen[static_cast<std::size_t>(v[0])] = true;
      int covered = 1;
      while (covered < n || rng.uniform() >= h.escape(v.back())) {
        v.push_back(draw(v.back()));
        if (!seen[static_cast<std::size_t>(v.back())]) {
          seen[static_cast<std::size_t>(v.back())] = true;
          ++covered;
        }
      }
      ++sampled;
      if (!trail_ok(occupation_from_visits(s, v))) ++failures;
    }
  }
  return {failures == 0 && exhaustive > 0,
          fmt("%llu exhaustive + %llu sampled occupations (|L| = 8), %llu failures",
              static_cast<unsigned long long>(exhaustive), static_cast<unsigned long long>(sampled),
              static_cast<unsigned long long>(failures))};
}

Outcome multinomial_domination() {
  std::uint64_t classes = 0, sequences = 0, bad = 0, unrealizable = 0;
  for (const auto& s : enumerate_small_sets(kDim, 2, 3, true, true)) {
    const auto costs = avoiding_costs(s, 12);
    const int n = static_cast<int>(s.size());
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) unrealizable += costs.at(x, y) < 0;
    }
    for (int t = 1; t <= 6; ++t) {
      std::map<EdgeOccupation, std::uint64_t> count;
      std::vector<int> v(static_cast<std::size_t>(t), 0);
      while (true) {
        ++count[occupation_from_visits(s, v)];
        ++sequences;
        int i = t - 1;
        while (i >= 0 && ++v[static_cast<std::size_t>(i)] == n) v[static_cast<std::size_t>(i--)] = 0;
        if (i < 0) break;
      }
      for (const auto& [e, c] : count) {
        ++classes;
        if (BigInt(c) > multinomial_count_bound(e)) ++bad;
      }
    }
  }
  return {bad == 0 && unrealizable == 0,
          fmt("%llu sequences in %llu occupation classes, %llu above the multinomial bound, %llu unrealizable steps",
              static_cast<unsigned long long>(sequences), static_cast<unsigned long long>(classes),
              static_cast<unsigned long long>(bad), static_cast<unsigned long long>(unrealizable))};
}

Outcome moment_domination() {
  const auto& g = oracle();
  StreamRng rng(606, 0);
  std::vector<SiteList> tuples;
  SiteList all;
  for (int k = 0; k < 20; ++k) {
    SiteList t;
    for (int i = 0; i < 1 + k % 3; ++i) {
      LatticePoint z(kDim);
      for (int a = 0; a < kDim; ++a) z[a] = static_cast<LatticePoint::Coord>(static_cast<int>(rng.below(5)) - 2);
      t.push_back(z);
    }
    all.insert(all.end(), t.begin(), t.end());
    tuples.push_back(t);
  }
  all = normalized(all);
  const SiteIndex index(all);
  std::vector<std::vector<std::size_t>> slot(tuples.size());
  for (std::size_t k = 0; k < tuples.size(); ++k) {
    for (const auto& z : tuples[k]) slot[k].push_back(static_cast<std::size_t>(index.find(z)));
  }

  constexpr std::uint64_t replicas = 200'000;
  constexpr std::int64_t radius = 40;
  auto partials = map_chunks(replicas, g_parallel, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<MomentAccumulator> acc(tuples.size());
    for (std::uint64_t r = begin; r < end; ++r) {
      const auto c = visit_counts(index, radius, 607, r);
      for (std::size_t k = 0; k < tuples.size(); ++k) {
        double prod = 1.0;
        for (auto i : slot[k]) prod *= c[i];
        acc[k].add(prod);
      }
    }
    return acc;
  });
  std::vector<MomentAccumulator> acc(tuples.size());
  for (const auto& p : partials) {
    for (std::size_t k = 0; k < tuples.size(); ++k) acc[k].merge(p[k]);
  }

  int bad = 0;
  for (std::size_t k = 0; k < tuples.size(); ++k) {
    const double bound = permutation_moment_bound(tuples[k], g);
    const double se = acc[k].standard_error();
    bool ok = acc[k].mean() <= bound + 3.0 * se;
    if (tuples[k].size() == 1) {
      const double bias = truncation_bias_bound(radius, tuples[k], g).bias_bound;
      ok = ok && std::abs(acc[k].mean() - g(tuples[k][0])) <= 3.0 * se + bias + g.boundary_error_bound();
    }
    if (!ok) {
      ++bad;
      std::printf("    tuple %zu (n=%zu): mc %.5f se %.2e bound %.5f\n", k, tuples[k].size(), acc[k].mean(), se, bound);
    }
  }
  return {bad == 0, fmt("20 tuples (n <= 3), %llu walks: %d violations", static_cast<unsigned long long>(replicas), bad)};
}

Outcome rate_solver() {
  const auto& g = oracle();
  const double closed = std::log1p(1.0 / (g.at_origin() - 1.0));
  const auto single = minimize_rate({LatticePoint(kDim)}, g);
  const double singleton_err = std::abs(single.value - closed);

  StreamRng rng(808, 0);
  double power_err = 0.0;
  for (int k = 0; k < 10; ++k) {
    const auto s = test::random_connected_set(kDim, 27, rng);
    std::vector<double> v(s.size());
    for (auto& x : v) x = 0.05 + 0.5 * rng.uniform();
    const auto op = build_operator(ProfileFunction::make(s, v), g, 1e-12);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.kernel);
    const double dense = es.eigenvalues().cwiseAbs().maxCoeff();
    power_err = std::max(power_err, std::abs(op.norm - dense) / dense);
  }

  std::vector<double> values;
  bool feasible = single.norm >= 1.0 - 1e-12 && single.norm <= 1.0 + 1e-6;
  for (int r = 1; r <= 3; ++r) {
    const auto res = minimize_rate(l1_ball(kDim, r), g);
    values.push_back(res.value);
    feasible = feasible && res.norm >= 1.0 - 1e-12 && res.norm <= 1.0 + 1e-6;
  }
  const bool monotone = values[1] <= values[0] && values[2] <= values[1] && values[0] <= single.value;
  return {singleton_err <= 1e-6 && power_err <= 1e-8 && monotone && feasible,
          fmt("singleton |I - log(G0/(G0-1))| %.2e; power vs dense %.2e; I(B1..B3) %.6f %.6f %.6f; feasible %s",
              singleton_err, power_err, values[0], values[1], values[2], feasible ? "yes" : "no")};
}

Outcome tail_exponent() {
  StreamRng rng(909, 0);
  std::vector<double> x(40000);
  for (auto& v : x) {
    const double y = -std::log1p(-rng.uniform());
    v = y * y;
  }
  const auto synth = tail_fit(x, default_exponent_grid());
  const bool synth_ok = std::abs(synth.alpha - 0.5) <= 0.05 + 1e-12;

  ExperimentConfig cfg = ExperimentConfig::from_json({{"kind", "intersection-tail"},
                                                      {"dim", kDim},
                                                      {"seed", 4},
                                                      {"replicas", 10000},
                                                      {"stop_radius", 40},
                                                      {"oracle_box", 24},
                                                      {"theta", 0.9},
                                                      {"return_target", 12},
                                                      {"q", 2}});
  const auto out = run_experiment(cfg, test::oracle(kDim, 24), g_parallel);
  const double alpha = out.summary.at("tail").at("alpha").get<double>();
  const double r2 = out.summary.at("tail").at("r_squared").get<double>();
  const bool fit_ok = alpha >= 0.35 && alpha <= 0.65 && r2 >= 0.9;
  return {synth_ok && fit_ok, fmt("synthetic alpha %.3f (true 0.5); zeta_2 importance-sampled alpha %.3f, R^2 %.4f, ESS %.0f",
                                  synth.alpha, alpha, r2, out.summary.at("ess").get<double>())};
}

Outcome decomposition_identity() {
  const auto& g = oracle();
  constexpr std::uint64_t replicas = 200'000;
  constexpr std::int64_t radius = 40;
  int bad = 0, checked = 0;
  for (const SiteList& lambda : {SiteList{LatticePoint::axis(kDim, 0)},
                                 SiteList{LatticePoint::axis(kDim, 0), LatticePoint::axis(kDim, 0, 2)}}) {
    const auto h = harmonic_measure(lambda, g);
    const SiteIndex index(lambda);
    std::vector<std::vector<int>> profiles;
    if (lambda.size() == 1) {
      for (int a = 0; a <= 4; ++a) profiles.push_back({a});
    } else {
      for (int a = 0; a <= 4; ++a) {
        for (int b = 0; a + b <= 4; ++b) profiles.push_back({a, b});
      }
    }
    auto partials = map_chunks(replicas, g_parallel, [&](std::uint64_t begin, std::uint64_t end) {
      std::vector<std::uint64_t> hits(profiles.size(), 0);
      for (std::uint64_t r = begin; r < end; ++r) {
        const auto c = visit_counts(index, radius, 1010 + lambda.size(), r);
        for (std::size_t p = 0; p < profiles.size(); ++p) {
          bool eq = true;
          for (std::size_t i = 0; i < c.size(); ++i) eq = eq && static_cast<int>(c[i]) == profiles[p][i];
          if (eq) ++hits[p];
        }
      }
      return hits;
    });
    std::vector<std::uint64_t> hits(profiles.size(), 0);
    for (const auto& p : partials) {
      for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += p[i];
    }
    const double bias = truncation_bias_bound(radius, lambda, g).bias_bound;
    for (std::size_t p = 0; p < profiles.size(); ++p) {
      const double mc = static_cast<double>(hits[p]) / replicas;
      const double se = std::sqrt(std::max(mc * (1.0 - mc), 1.0 / replicas) / replicas);
      const double exact = profile_probability(h, profiles[p]);
      ++checked;
      if (std::abs(mc - exact) > 3.0 * se + bias + g.boundary_error_bound()) {
        ++bad;
        std::printf("    |L|=%zu profile %zu: mc %.6f exact %.6f se %.2e\n", lambda.size(), p, mc, exact, se);
      }
    }
  }
  return {bad == 0, fmt("%d visit profiles (t <= 4) on {e1} and {e1, 2e1}: %d outside 3 SE + bias", checked, bad)};
}

#ifdef ILTLAB_HAVE_CLI
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> output_files(const std::filesystem::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() != "manifest.json") out.push_back(e.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path base = test::scratch_dir("acceptance-determinism");
  const std::string cache = test::cache_dir().string();
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"green", "green.json"},         {"capacity", "capacity.json"},      {"moments", "moments.json"},
      {"trail-check", "trail.json"},   {"rate", "box3.json"},              {"simulate", "simulate.json"},
      {"experiment", "decomposition.json"}, {"experiment", "level-sets.json"}, {"experiment", "range.json"},
      {"experiment", "tail.json"}};
  int bad = 0, files = 0;
  for (const auto& [command, config] : runs) {
    const std::string cfg = (fs::path(ILTLAB_CONFIG_DIR) / config).string();
    const std::string stem = fs::path(config).stem().string();
    const fs::path a = base / (stem + "-1"), b = base / (stem + "-8"), c = base / (stem + "-replay");
    const int ra = cli::run({"iltlab", command, "--config", cfg, "--out", a.string(), "--threads", "1", "--cache-dir", cache});
    const int rb = cli::run({"iltlab", command, "--config", cfg, "--out", b.string(), "--threads", "8", "--cache-dir", cache});
    const int rc = cli::run({"iltlab", "replay", "--manifest", (a / "manifest.json").string(), "--out", c.string(),
                             "--threads", std::to_string(g_parallel.threads), "--cache-dir", cache});
    if (ra != 0 || rb != 0 || rc != 0) {
      ++bad;
      std::printf("    %s %s: exit codes %d %d %d\n", command.c_str(), config.c_str(), ra, rb, rc);
      continue;
    }
    const auto names = output_files(a);
    if (names != output_files(b) || names != output_files(c)) ++bad;
    for (const auto& f : names) {
      ++files;
      if (slurp(a / f) != slurp(b / f) || slurp(a / f) != slurp(c / f)) {
        ++bad;
        std::printf("    %s %s: %s differs\n", command.c_str(), config.c_str(), f.c_str());
      }
    }
  }
  return {bad == 0, fmt("%zu configs, %d output files byte-identical at 1 and 8 threads and on replay; %d mismatches",
                        runs.size(), files, bad)};
}
#else
Outcome determinism() { return {false, "command-line tool not built"}; }
#endif

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--threads") g_parallel.threads = std::max(1, std::atoi(argv[i + 1]));
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"green function consistency", green_consistency},
      {"intersection mean", intersection_mean},
      {"capacity triple", capacity_triple},
      {"capacity scaling", capacity_scaling},
      {"trail/stock certificate", trail_certificate},
      {"multinomial domination", multinomial_domination},
      {"moment-bound domination", moment_domination},
      {"rate solver", rate_solver},
      {"tail exponent", tail_exponent},
      {"decomposition identity", decomposition_identity},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
