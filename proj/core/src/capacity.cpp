#include "iltlab/capacity.hpp"

#include <algorithm>
#include <cmath>

#include "iltlab/error.hpp"
#include "iltlab/walk.hpp"

namespace iltlab {

const char* to_string(CapacityMethod m) noexcept {
  switch (m) {
    case CapacityMethod::EscapeMC:
      return "escape-mc";
    case CapacityMethod::EquilibriumSolve:
      return "equilibrium-solve";
    case CapacityMethod::VariationalBound:
      return "variational-bound";
  }
  return "?";
}

namespace {

void check_sites(const SiteList& sites, const GreenOracle& oracle) {
  if (sites.empty()) throw InvalidInput("capacity: empty site set");
  for (const auto& z : sites) {
    if (z.dim() != oracle.dim()) throw InvalidInput("capacity: site dimension differs from oracle");
  }
  if (normalized(sites).size() != sites.size()) throw InvalidInput("capacity: duplicate sites");
}

// Every pairwise difference, padded by `pad` in each direction, must be tabled.
void require_cover(const SiteList& sites, const GreenOracle& oracle, int pad) {
  double worst = 0.0;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t j = i + 1; j < sites.size(); ++j) {
      const LatticePoint diff = sites[i] - sites[j];
      worst = std::max(worst, oracle.shape() == DomainShape::Box ? static_cast<double>(diff.linf_norm())
                                                                 : diff.norm());
    }
  }
  if (worst + pad > oracle.radius()) {
    throw InvalidInput("oracle box too small: set spread " + std::to_string(worst) + " plus padding " +
                       std::to_string(pad) + " exceeds radius " + std::to_string(oracle.radius()));
  }
}

}  // namespace

Eigen::MatrixXd green_matrix(const SiteList& sites, const GreenOracle& oracle) {
  const auto n = static_cast<Eigen::Index>(sites.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = oracle.at_origin();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      g(i, j) = g(j, i) = oracle(sites[static_cast<std::size_t>(j)] - sites[static_cast<std::size_t>(i)]);
    }
  }
  return g;
}

EquilibriumSolution capacity_mc(const SiteList& sites, std::uint64_t replicas, std::int64_t stop_radius,
                                std::uint64_t seed, const GreenOracle& oracle, const ParallelConfig& parallel) {
  if (oracle.dim() <= 2) throw InvalidInput("recurrent dimension");
  check_sites(sites, oracle);
  if (replicas < 1) throw InvalidInput("capacity_mc: replicas must be >= 1");
  const TruncationCertificate cert = truncation_bias_bound(stop_radius, sites, oracle);
  const SiteIndex index(sites);
  const std::size_t n_sites = sites.size();

  auto partials = map_chunks(n_sites * replicas, parallel, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<std::uint64_t> escaped(n_sites, 0);
    for (std::uint64_t job = begin; job < end; ++job) {
      const std::size_t site = job / replicas;
      WalkState w = start_walk(sites[site], seed, job);
      bool start = true;
      const bool left = walk_in_ball(w, stop_radius, [&](const LatticePoint& z) {
        if (start) {
          start = false;
          return true;
        }
        return index.find(z) < 0;
      });
      if (left) ++escaped[site];
    }
    return escaped;
  });

  EquilibriumSolution out;
  out.sites = sites;
  out.method = CapacityMethod::EscapeMC;
  out.replicas = replicas;
  out.measure.assign(n_sites, 0.0);
  std::vector<std::uint64_t> escaped(n_sites, 0);
  for (const auto& p : partials) {
    for (std::size_t i = 0; i < n_sites; ++i) escaped[i] += p[i];
  }
  double var = 0.0;
  const auto n = static_cast<double>(replicas);
  for (std::size_t i = 0; i < n_sites; ++i) {
    const double p = static_cast<double>(escaped[i]) / n;
    out.measure[i] = p;
    out.capacity += p;
    var += replicas > 1 ? p * (1.0 - p) / (n - 1.0) : 0.0;
  }
  out.error = std::sqrt(var);
  // A walk that exits and comes back is miscounted; the return probability is below the
  // expected number of post-exit visits to L.
  out.bias_bound = static_cast<double>(n_sites) * std::min(1.0, cert.bias_bound);
  return out;
}

EquilibriumSolution equilibrium_solve(const SiteList& sites, const GreenOracle& oracle) {
  check_sites(sites, oracle);
  require_cover(sites, oracle, 2);
  const Eigen::MatrixXd g = green_matrix(sites, oracle);
  const Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-12)) {
    throw NumericFailure("capacity", "singular Gram matrix");
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.rows());
  const Eigen::VectorXd e = llt.solve(ones);

  EquilibriumSolution out;
  out.sites = sites;
  out.method = CapacityMethod::EquilibriumSolve;
  out.measure.assign(e.data(), e.data() + e.size());
  out.capacity = e.sum();
  out.error = (g * e - ones).cwiseAbs().maxCoeff();
  out.min_weight = e.minCoeff();
  out.negative_weights = out.min_weight < 0.0;
  return out;
}

VariationalBound variational_lower_bound(const SiteList& sites, const GreenOracle& oracle) {
  check_sites(sites, oracle);
  const double size = static_cast<double>(sites.size());
  const double d = oracle.dim();
  const double mu = std::pow(size, -2.0 / d);
  const Eigen::MatrixXd g = green_matrix(sites, oracle);
  VariationalBound out;
  out.max_potential = g.rowwise().sum().maxCoeff() * mu;
  out.bound = size * mu / out.max_potential;
  out.kappa_hat = out.bound / std::pow(size, 1.0 - 2.0 / d);
  return out;
}

HarmonicMeasure harmonic_measure(const SiteList& sites, const GreenOracle& oracle) {
  check_sites(sites, oracle);
  SiteList with_origin = sites;
  if (std::find(sites.begin(), sites.end(), LatticePoint(oracle.dim())) == sites.end()) {
    with_origin.push_back(LatticePoint(oracle.dim()));
  }
  require_cover(with_origin, oracle, 2);
  const Eigen::MatrixXd g = green_matrix(sites, oracle);
  const Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-12)) {
    throw NumericFailure("capacity", "singular Gram matrix");
  }
  const auto n = static_cast<Eigen::Index>(sites.size());
  // Hitting law from w (time 0 counted): G(w - L) G_L^{-1}.
  auto hitting = [&](const LatticePoint& w) {
    Eigen::VectorXd row(n);
    for (Eigen::Index j = 0; j < n; ++j) row(j) = oracle(sites[static_cast<std::size_t>(j)] - w);
    return Eigen::RowVectorXd(llt.solve(row).transpose());
  };

  HarmonicMeasure out;
  out.sites = sites;
  out.q = Eigen::MatrixXd::Zero(n + 1, n);
  const auto moves = lazy_moves(oracle.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const auto& m : moves) out.q.row(i) += hitting(sites[static_cast<std::size_t>(i)] + m);
    out.q.row(i) /= static_cast<double>(moves.size());
  }
  out.q.row(n) = hitting(LatticePoint(oracle.dim()));
  out.escape = Eigen::VectorXd::Ones(n + 1) - out.q.rowwise().sum();
  out.q_se = Eigen::MatrixXd::Zero(n + 1, n);
  out.escape_se = Eigen::VectorXd::Zero(n + 1);
  return out;
}

HarmonicMeasure harmonic_measure_mc(const SiteList& sites, std::uint64_t replicas, std::int64_t stop_radius,
                                    std::uint64_t seed, const ParallelConfig& parallel) {
  if (sites.empty()) throw InvalidInput("capacity: empty site set");
  if (replicas < 1) throw InvalidInput("harmonic_measure_mc: replicas must be >= 1");
  const int dim = sites.front().dim();
  if (dim <= 2) throw InvalidInput("recurrent dimension");
  const SiteIndex index(sites);
  const std::size_t n = sites.size();
  const std::size_t rows = n + 1;

  // Counts per (start row, target column); column n means escape.
  auto partials = map_chunks(rows * replicas, parallel, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<std::uint64_t> counts(rows * (n + 1), 0);
    for (std::uint64_t job = begin; job < end; ++job) {
      const std::size_t row = job / replicas;
      const LatticePoint start = row < n ? sites[row] : LatticePoint(dim);
      WalkState w = start_walk(start, seed, job);
      bool first = row < n;
      int hit = -1;
      walk_in_ball(w, stop_radius, [&](const LatticePoint& z) {
        if (first) {
          first = false;
          return true;
        }
        hit = index.find(z);
        return hit < 0;
      });
      counts[row * (n + 1) + (hit < 0 ? n : static_cast<std::size_t>(hit))]++;
    }
    return counts;
  });
  std::vector<std::uint64_t> counts(rows * (n + 1), 0);
  for (const auto& p : partials) {
    for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += p[k];
  }

  HarmonicMeasure out;
  out.sites = sites;
  const auto nn = static_cast<Eigen::Index>(n);
  out.q.resize(nn + 1, nn);
  out.q_se.resize(nn + 1, nn);
  out.escape.resize(nn + 1);
  out.escape_se.resize(nn + 1);
  const auto reps = static_cast<double>(replicas);
  auto se = [&](double p) { return replicas > 1 ? std::sqrt(p * (1.0 - p) / (reps - 1.0)) : 0.0; };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c <= n; ++c) {
      const double p = static_cast<double>(counts[r * (n + 1) + c]) / reps;
      const auto ri = static_cast<Eigen::Index>(r);
      if (c < n) {
        out.q(ri, static_cast<Eigen::Index>(c)) = p;
        out.q_se(ri, static_cast<Eigen::Index>(c)) = se(p);
      } else {
        out.escape(ri) = p;
        out.escape_se(ri) = se(p);
      }
    }
  }
  return out;
}

}  // namespace iltlab
