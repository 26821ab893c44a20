#include "iltlab/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <absl/container/flat_hash_map.h>

#include "iltlab/error.hpp"

namespace iltlab {

ProfileFunction ProfileFunction::make(SiteList support, std::vector<double> values) {
  if (support.size() != values.size()) throw InvalidInput("profile: one value per site required");
  ProfileFunction h;
  double s = 0.0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("profile: values must be finite and nonnegative");
    s += v * v;
  }
  h.support = std::move(support);
  h.values = std::move(values);
  h.l2_norm = std::sqrt(s);
  return h;
}

ProfileFunction ProfileFunction::scaled(double c) const {
  std::vector<double> v = values;
  for (double& x : v) x *= c;
  return make(support, std::move(v));
}

NormResult operator_norm(const Eigen::MatrixXd& kernel, double tol, int max_iterations, const Eigen::VectorXd& start) {
  NormResult out;
  const Eigen::Index n = kernel.rows();
  if (kernel.cols() != n) throw InvalidInput("operator_norm: kernel must be square");
  if (n == 0 || kernel.cwiseAbs().maxCoeff() == 0.0) {
    out.vector = Eigen::VectorXd::Zero(n);
    return out;
  }
  Eigen::VectorXd x = start.size() == n && start.norm() > 0.0 ? Eigen::VectorXd(start.cwiseAbs()) : Eigen::VectorXd::Ones(n);
  x.array() += 1e-12 * x.maxCoeff();
  x.normalize();
  double lambda = 0.0;
  double prev_diff = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const Eigen::VectorXd y = kernel * x;
    const double next = x.dot(y);
    const double ny = y.norm();
    if (ny == 0.0) {
      out.value = 0.0;
      out.iterations = it;
      out.vector = x;
      return out;
    }
    x = y / ny;
    const double diff = std::abs(next - lambda);
    lambda = next;
    if (it > 2) {
      // Geometric convergence: the remaining error is about diff / (1 - ratio).
      const double ratio = prev_diff > 0.0 ? std::min(diff / prev_diff, 0.999) : 0.0;
      if (diff / (1.0 - ratio) <= tol * std::abs(lambda)) {
        out.value = x.dot(kernel * x);
        out.iterations = it;
        out.vector = x;
        return out;
      }
    }
    prev_diff = diff;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kernel);
  if (eig.info() != Eigen::Success) throw NumericFailure("rate", "no convergence");
  Eigen::Index top = 0;
  eig.eigenvalues().maxCoeff(&top);
  out.value = eig.eigenvalues()(top);
  out.vector = eig.eigenvectors().col(top).cwiseAbs();
  out.iterations = max_iterations;
  out.fallback = true;
  return out;
}

Eigen::MatrixXd reduced_green_matrix(const SiteList& sites, const GreenOracle& oracle) {
  const auto n = static_cast<Eigen::Index>(sites.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = oracle.at_origin() - 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      k(i, j) = k(j, i) = oracle(sites[static_cast<std::size_t>(j)] - sites[static_cast<std::size_t>(i)]);
    }
  }
  return k;
}

namespace {

Eigen::MatrixXd scaled_kernel(const Eigen::MatrixXd& reduced, const std::vector<double>& h) {
  const auto n = static_cast<Eigen::Index>(h.size());
  Eigen::VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = std::sqrt(std::expm1(h[static_cast<std::size_t>(i)]));
  return s.asDiagonal() * reduced * s.asDiagonal();
}

// Scale search for one fixed reduced Green matrix, with the Perron vector carried
// between calls.
class ScaleSolver {
 public:
  ScaleSolver(const Eigen::MatrixXd& reduced, double tol, double power_tol)
      : reduced_(reduced), tol_(tol), power_tol_(power_tol), warm_(Eigen::VectorXd::Ones(reduced.rows())) {}

  struct Point {
    double scale = 0.0;
    double norm = 0.0;
    double dlog = 0.0;  // d log ||U|| / d scale
  };

  Point evaluate(const std::vector<double>& v, double c) {
    ++evaluations_;
    std::vector<Eigen::Index> active;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] > 0.0) active.push_back(static_cast<Eigen::Index>(i));
    }
    const auto m = static_cast<Eigen::Index>(active.size());
    Eigen::VectorXd s(m), start(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      s(a) = std::sqrt(std::expm1(c * v[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])]));
      start(a) = warm_(active[static_cast<std::size_t>(a)]);
    }
    const Eigen::MatrixXd k = s.asDiagonal() * reduced_(active, active) * s.asDiagonal();
    const NormResult r = operator_norm(k, power_tol_, 20000, start);
    Point p{c, r.value, 0.0};
    for (Eigen::Index a = 0; a < m; ++a) {
      const double x = r.vector(a);
      const double cv = c * v[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])];
      p.dlog += x * x * (v[static_cast<std::size_t>(active[static_cast<std::size_t>(a)])] * std::exp(cv) / std::expm1(cv));
      warm_(active[static_cast<std::size_t>(a)]) = x;
    }
    return p;
  }

  // Safeguarded Newton on log ||U_{c v}|| aimed inside [1, 1 + tol].
  Point solve(const std::vector<double>& v, double guess) {
    const double vmax = *std::max_element(v.begin(), v.end());
    if (!(vmax > 0.0)) throw NumericFailure("rate", "direction degenerate");
    const double cmax = 700.0 / vmax;
    double c = guess > 0.0 && guess < cmax ? guess : 1.0 / vmax;
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    const double target = std::log1p(0.5 * tol_);
    for (int it = 0; it < 200; ++it) {
      const Point p = evaluate(v, c);
      if (p.norm >= 1.0 && p.norm <= 1.0 + tol_) return p;
      if (p.norm < 1.0) {
        lo = c;
      } else {
        hi = c;
      }
      double next = p.norm > 0.0 && p.dlog > 0.0 ? c - (std::log(p.norm) - target) / p.dlog : 2.0 * c;
      if (!(next > lo && next < hi)) next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * c;
      if (next >= cmax) {
        if (lo >= cmax * 0.999) throw NumericFailure("rate", "direction degenerate");
        next = 0.5 * (lo + cmax);
      }
      if (std::isfinite(hi) && hi - lo <= 1e-15 * hi) return evaluate(v, hi);
      c = next;
    }
    throw NumericFailure("rate", "scale calibration did not converge");
  }

  int evaluations() const noexcept { return evaluations_; }

 private:
  const Eigen::MatrixXd& reduced_;
  double tol_;
  double power_tol_;
  Eigen::VectorXd warm_;
  int evaluations_ = 0;
};

}  // namespace

IntersectionOperator build_operator(const ProfileFunction& h, const GreenOracle& oracle, double tol) {
  IntersectionOperator op;
  op.kernel = scaled_kernel(reduced_green_matrix(h.support, oracle), h.values);
  const NormResult r = operator_norm(op.kernel, tol);
  op.norm = r.value;
  op.iterations = r.iterations;
  op.fallback = r.fallback;
  return op;
}

Calibration calibrate_scale(const ProfileFunction& direction, const GreenOracle& oracle, double tol) {
  if (!(tol > 0.0)) throw InvalidInput("calibrate_scale: tolerance must be positive");
  const Eigen::MatrixXd reduced = reduced_green_matrix(direction.support, oracle);
  ScaleSolver solver(reduced, tol, 1e-12);
  const auto p = solver.solve(direction.values, 0.0);
  Calibration out;
  out.scale = p.scale;
  out.norm = p.norm;
  out.profile = direction.scaled(p.scale);
  out.evaluations = solver.evaluations();
  return out;
}

std::vector<int> symmetry_blocks(const SiteList& lambda) {
  if (lambda.empty()) return {};
  absl::flat_hash_map<LatticePoint, int> index;
  for (std::size_t i = 0; i < lambda.size(); ++i) index[lambda[i]] = static_cast<int>(i);
  std::vector<SignedPermutation> stabilizer;
  for (const auto& g : hyperoctahedral_group(lambda.front().dim())) {
    if (std::all_of(lambda.begin(), lambda.end(), [&](const LatticePoint& z) { return index.contains(g.apply(z)); })) {
      stabilizer.push_back(g);
    }
  }
  std::vector<int> block(lambda.size(), -1);
  int next = 0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (block[i] >= 0) continue;
    for (const auto& g : stabilizer) block[static_cast<std::size_t>(index.at(g.apply(lambda[i])))] = next;
    ++next;
  }
  return block;
}

namespace {

struct Start {
  std::string name;
  std::vector<double> block_values;
};

struct RestartOutcome {
  double value = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  double norm = 0.0;
  std::vector<double> direction;
  std::vector<TraceEntry> trace;
};

std::vector<double> expand(const std::vector<double>& w, const std::vector<int>& block) {
  std::vector<double> v(block.size());
  for (std::size_t i = 0; i < block.size(); ++i) v[i] = w[static_cast<std::size_t>(block[i])];
  return v;
}

double l2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

RestartOutcome search(const Start& start, int restart, const std::vector<int>& block, const Eigen::MatrixXd& reduced,
                      const OptimizerConfig& cfg) {
  ScaleSolver solver(reduced, cfg.calibration_tol, cfg.power_tol);
  std::vector<double> w = start.block_values;
  double scale_guess = 0.0;
  RestartOutcome best;
  auto value_of = [&](const std::vector<double>& wb, ScaleSolver::Point& point) {
    const auto v = expand(wb, block);
    point = solver.solve(v, scale_guess * l2(expand(w, block)) / l2(v));
    return point.scale * l2(v);
  };
  ScaleSolver::Point point;
  best.value = value_of(w, point);
  best.scale = point.scale;
  best.norm = point.norm;
  scale_guess = point.scale;
  double step = cfg.initial_step;
  for (int sweep = 0; sweep < cfg.max_sweeps && step >= cfg.min_step; ++sweep) {
    bool improved = false;
    for (std::size_t b = 0; b < w.size(); ++b) {
      const double wmax = *std::max_element(w.begin(), w.end());
      const double up = w[b] + step * std::max(w[b], 0.01 * wmax);
      const double down = w[b] / (1.0 + step);
      for (double trial : {up, down}) {
        std::vector<double> cand = w;
        cand[b] = trial;
        if (!(*std::max_element(cand.begin(), cand.end()) > 0.0)) continue;
        ScaleSolver::Point p;
        const double f = value_of(cand, p);
        if (f < best.value * (1.0 - cfg.improvement_floor)) {
          w = std::move(cand);
          best.value = f;
          best.scale = p.scale;
          best.norm = p.norm;
          scale_guess = p.scale;
          improved = true;
          break;
        }
      }
    }
    best.trace.push_back({restart, sweep, best.value, step});
    if (!improved) step *= 0.5;
  }
  best.direction = expand(w, block);
  return best;
}

}  // namespace

RateResult minimize_rate(const SiteList& lambda, const GreenOracle& oracle, const OptimizerConfig& cfg) {
  if (lambda.empty()) throw InvalidInput("minimize_rate: empty set");
  const SiteList sites = normalized(lambda);
  if (sites.size() != lambda.size()) throw InvalidInput("minimize_rate: duplicate sites");
  const Eigen::MatrixXd reduced = reduced_green_matrix(sites, oracle);
  const std::size_t n = sites.size();

  std::vector<int> block(n);
  if (cfg.use_symmetry) {
    block = symmetry_blocks(sites);
  } else {
    std::iota(block.begin(), block.end(), 0);
  }
  const auto n_blocks = static_cast<std::size_t>(*std::max_element(block.begin(), block.end()) + 1);
  auto to_blocks = [&](const std::vector<double>& v) {
    std::vector<double> w(n_blocks, 0.0), count(n_blocks, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      w[static_cast<std::size_t>(block[i])] += v[i];
      count[static_cast<std::size_t>(block[i])] += 1.0;
    }
    for (std::size_t b = 0; b < n_blocks; ++b) w[b] /= count[b];
    return w;
  };

  // One-site baseline: the origin when present.
  const LatticePoint origin(sites.front().dim());
  const auto it = std::lower_bound(sites.begin(), sites.end(), origin);
  const std::size_t anchor = it != sites.end() && *it == origin ? static_cast<std::size_t>(it - sites.begin()) : 0;
  std::vector<double> unit(n, 0.0);
  unit[anchor] = 1.0;
  ScaleSolver base_solver(reduced, cfg.calibration_tol, cfg.power_tol);
  const auto base = base_solver.solve(unit, 0.0);

  std::vector<Start> starts;
  starts.push_back({"uniform", std::vector<double>(n_blocks, 1.0)});
  {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced);
    Eigen::Index top = 0;
    eig.eigenvalues().maxCoeff(&top);
    const Eigen::VectorXd vec = eig.eigenvectors().col(top).cwiseAbs();
    starts.push_back({"top-eigenvector", to_blocks(std::vector<double>(vec.data(), vec.data() + vec.size()))});
  }
  {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = oracle(sites[i]);
    starts.push_back({"green", to_blocks(g)});
  }
  for (std::size_t k = 0; k < cfg.initial_profiles.size(); ++k) {
    const auto& p = cfg.initial_profiles[k];
    std::vector<double> v(n, 0.0);
    for (std::size_t j = 0; j < p.support.size(); ++j) {
      const auto pos = std::lower_bound(sites.begin(), sites.end(), p.support[j]);
      if (pos != sites.end() && *pos == p.support[j]) v[static_cast<std::size_t>(pos - sites.begin())] = p.values[j];
    }
    const auto w = to_blocks(v);
    if (*std::max_element(w.begin(), w.end()) > 0.0) starts.push_back({"initial-" + std::to_string(k), w});
  }

  ParallelConfig par = cfg.parallel;
  par.chunk = 1;
  auto outcomes = map_chunks(starts.size(), par, [&](std::uint64_t b, std::uint64_t) {
    return search(starts[b], static_cast<int>(b), block, reduced, cfg);
  });

  RateResult out;
  out.lambda_set = sites;
  out.baseline = base.scale;
  for (const auto& s : starts) out.restart_names.push_back(s.name);
  std::size_t best = 0;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    out.trace.insert(out.trace.end(), outcomes[k].trace.begin(), outcomes[k].trace.end());
    const auto& o = outcomes[k];
    const auto& b = outcomes[best];
    if (o.value < b.value || (o.value == b.value && o.direction < b.direction)) best = k;
  }
  const auto& win = outcomes[best];
  out.stalled = !(win.value < base.scale * (1.0 - cfg.improvement_floor));
  if (out.stalled && !(win.value < base.scale)) {
    out.value = base.scale;
    out.norm = base.norm;
    std::vector<double> h(n, 0.0);
    h[anchor] = base.scale;
    out.argmin_profile = ProfileFunction::make(sites, std::move(h));
  } else {
    out.best_restart = static_cast<int>(best);
    out.norm = win.norm;
    out.argmin_profile = ProfileFunction::make(sites, win.direction).scaled(win.scale);
    out.value = out.argmin_profile.l2_norm;
  }
  return out;
}

std::vector<RatePrediction> rate_predictions(const RateResult& rate, const std::vector<double>& xi_grid) {
  std::vector<RatePrediction> out;
  for (double xi : xi_grid) {
    if (!(xi > 0.0)) throw InvalidInput("rate_predictions: xi must be positive");
    out.push_back({xi, -rate.value * std::sqrt(xi), -2.0 * rate.value});
  }
  return out;
}

nlohmann::json to_json(const RateResult& rate) {
  auto coords = [](const LatticePoint& z) { return std::vector<int>(z.coords().begin(), z.coords().end()); };
  nlohmann::json lambda = nlohmann::json::array();
  nlohmann::json profile = nlohmann::json::array();
  for (std::size_t i = 0; i < rate.lambda_set.size(); ++i) {
    lambda.push_back(coords(rate.lambda_set[i]));
    profile.push_back({{"site", coords(rate.argmin_profile.support[i])}, {"h", rate.argmin_profile.values[i]}});
  }
  nlohmann::json restarts = nlohmann::json::array();
  for (std::size_t k = 0; k < rate.restart_names.size(); ++k) {
    double last = 0.0;
    int sweeps = 0;
    for (const auto& t : rate.trace) {
      if (t.restart == static_cast<int>(k)) {
        last = t.value;
        ++sweeps;
      }
    }
    restarts.push_back({{"name", rate.restart_names[k]}, {"value", last}, {"sweeps", sweeps}});
  }
  return {{"lambda", lambda},
          {"value", rate.value},
          {"l2_norm", rate.argmin_profile.l2_norm},
          {"feasibility", rate.norm},
          {"baseline", rate.baseline},
          {"stalled", rate.stalled},
          {"best_restart", rate.best_restart},
          {"profile", profile},
          {"restarts", restarts}};
}

}  // namespace iltlab
