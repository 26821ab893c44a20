#include "iltlab/green.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <absl/container/flat_hash_map.h>

#include "iltlab/error.hpp"
#include "iltlab/walk.hpp"

namespace iltlab {

namespace {

constexpr char kMagic[8] = {'I', 'L', 'T', 'G', 'R', 'N', '0', '1'};

int key_bits(int dim) { return std::min(21, 64 / dim); }

std::uint64_t pack(const LatticePoint& c) {
  const int bits = key_bits(c.dim());
  std::uint64_t key = 0;
  for (int i = 0; i < c.dim(); ++i) key = (key << bits) | static_cast<std::uint64_t>(c[i]);
  return key;
}

LatticePoint unpack(std::uint64_t key, int dim) {
  const int bits = key_bits(dim);
  const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
  LatticePoint c(dim);
  for (int i = dim - 1; i >= 0; --i) {
    c[i] = static_cast<LatticePoint::Coord>(key & mask);
    key >>= bits;
  }
  return c;
}

bool inside(DomainShape shape, int radius, const LatticePoint& c) {
  if (shape == DomainShape::Box) return c.linf_norm() <= radius;
  return c.squared_norm() <= static_cast<std::int64_t>(radius) * radius;
}

// Sorted nonnegative tuples inside the domain, in lexicographic (= key) order.
void enumerate_representatives(int dim, DomainShape shape, int radius, std::vector<std::uint64_t>& keys) {
  LatticePoint c(dim);
  const std::int64_t r2 = static_cast<std::int64_t>(radius) * radius;
  auto rec = [&](auto&& self, int pos, int lo, std::int64_t sumsq) -> void {
    if (pos == dim) {
      keys.push_back(pack(c));
      return;
    }
    for (int v = lo; v <= radius; ++v) {
      if (shape == DomainShape::Ball &&
          sumsq + static_cast<std::int64_t>(dim - pos) * v * v > r2) {
        break;
      }
      c[pos] = v;
      self(self, pos + 1, v, sumsq + static_cast<std::int64_t>(v) * v);
    }
    c[pos] = 0;
  };
  rec(rec, 0, 0, 0);
}

// Orbit-reduced operator (I - P) on the representatives.
struct ReducedSystem {
  int dim = 0;
  int moves = 0;  // 2d
  std::vector<std::uint64_t> keys;
  std::vector<std::uint32_t> weights;
  std::vector<std::int32_t> neighbours;  // keys.size() * moves, -1 = killed

  std::int64_t find(std::uint64_t key) const {
    const auto it = std::lower_bound(keys.begin(), keys.end(), key);
    if (it == keys.end() || *it != key) return -1;
    return it - keys.begin();
  }

  // y = W (I - P) x
  void apply_weighted(std::span<const double> x, std::span<double> y) const {
    const double inv = 1.0 / (moves + 1);
    const std::size_t n = keys.size();
    for (std::size_t i = 0; i < n; ++i) {
      double s = x[i];
      const std::int32_t* nb = &neighbours[i * static_cast<std::size_t>(moves)];
      for (int m = 0; m < moves; ++m) {
        if (nb[m] >= 0) s += x[static_cast<std::size_t>(nb[m])];
      }
      y[i] = weights[i] * (x[i] - s * inv);
    }
  }

  double max_residual(std::span<const double> x) const {
    const double inv = 1.0 / (moves + 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      double s = x[i];
      const std::int32_t* nb = &neighbours[i * static_cast<std::size_t>(moves)];
      for (int m = 0; m < moves; ++m) {
        if (nb[m] >= 0) s += x[static_cast<std::size_t>(nb[m])];
      }
      const double res = x[i] - s * inv - (i == 0 ? 1.0 : 0.0);
      worst = std::max(worst, std::abs(res));
    }
    return worst;
  }
};

ReducedSystem build_system(int dim, DomainShape shape, int radius) {
  if ((std::uint64_t{1} << key_bits(dim)) <= static_cast<std::uint64_t>(radius) + 1) {
    throw InvalidInput("green: radius too large for dimension " + std::to_string(dim));
  }
  ReducedSystem sys;
  sys.dim = dim;
  sys.moves = 2 * dim;
  enumerate_representatives(dim, shape, radius, sys.keys);
  const std::size_t n = sys.keys.size();
  sys.weights.resize(n);
  sys.neighbours.resize(n * static_cast<std::size_t>(sys.moves));
  for (std::size_t i = 0; i < n; ++i) {
    const LatticePoint c = unpack(sys.keys[i], dim);
    sys.weights[i] = static_cast<std::uint32_t>(orbit_size(c));
    for (int axis = 0; axis < dim; ++axis) {
      for (int sgn = 0; sgn < 2; ++sgn) {
        LatticePoint y = c;
        y[axis] += sgn == 0 ? 1 : -1;
        const LatticePoint cy = canonical(y);
        const std::int64_t j = inside(shape, radius, cy) ? sys.find(pack(cy)) : -1;
        sys.neighbours[i * static_cast<std::size_t>(sys.moves) + static_cast<std::size_t>(2 * axis + sgn)] =
            static_cast<std::int32_t>(j);
      }
    }
  }
  return sys;
}

struct SolveResult {
  std::vector<double> values;
  double residual = 0.0;
  int iterations = 0;
};

// Jacobi-preconditioned CG on the symmetric system W (I - P) G = e_0.
SolveResult conjugate_gradient(const ReducedSystem& sys, const GreenSolveOptions& opt) {
  const std::size_t n = sys.keys.size();
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    int self = 0;
    for (int m = 0; m < sys.moves; ++m) {
      self += sys.neighbours[i * static_cast<std::size_t>(sys.moves) + static_cast<std::size_t>(m)] ==
              static_cast<std::int32_t>(i);
    }
    diag[i] = sys.weights[i] * (1.0 - (1.0 + self) / (sys.moves + 1));
  }

  std::vector<double> x(n, 0.0), r(n, 0.0), z(n), p(n), ap(n);
  SolveResult out;
  int total = 0;
  // Restarts recompute the residual from scratch to shed recurrence drift.
  for (int restart = 0; restart < 8; ++restart) {
    sys.apply_weighted(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = (i == 0 ? 1.0 : 0.0) - ap[i];
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    p = z;
    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];

    while (total < opt.max_iterations) {
      sys.apply_weighted(p, ap);
      double pap = 0.0;
      for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
      if (!(pap > 0.0)) break;
      const double alpha = rz / pap;
      double worst = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
        worst = std::max(worst, std::abs(r[i]) / sys.weights[i]);
      }
      ++total;
      if (worst <= 0.25 * opt.tolerance) break;
      double rz_new = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        z[i] = r[i] / diag[i];
        rz_new += r[i] * z[i];
      }
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    out.residual = sys.max_residual(x);
    if (out.residual <= opt.tolerance || total >= opt.max_iterations) break;
  }
  out.iterations = total;
  if (!(out.residual <= opt.tolerance)) {
    throw NumericFailure("green", "ill-conditioned: residual " + std::to_string(out.residual) +
                                      " above tolerance after " + std::to_string(total) + " iterations");
  }
  out.values = std::move(x);
  return out;
}

template <typename T>
void write_pod(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw InvalidInput("green table truncated");
  return v;
}

GreenOracle solve_shape(int dim, DomainShape shape, int radius, const GreenSolveOptions& opt);

}  // namespace

// The factory functions need private access; route them through a helper struct.
struct GreenOracleBuilder {
  static GreenOracle make(int dim, DomainShape shape, int radius, const GreenSolveOptions& opt) {
    if (dim < 3) throw InvalidInput("green: dimension must be >= 3 (transient), got " + std::to_string(dim));
    if (radius < 1) throw InvalidInput("green: radius must be >= 1");
    const ReducedSystem sys = build_system(dim, shape, radius);
    SolveResult res = conjugate_gradient(sys, opt);
    GreenOracle g;
    g.dim_ = dim;
    g.shape_ = shape;
    g.radius_ = radius;
    g.tolerance_ = opt.tolerance;
    g.residual_ = res.residual;
    g.iterations_ = res.iterations;
    g.keys_ = sys.keys;
    g.weights_ = sys.weights;
    g.values_ = std::move(res.values);
    if (opt.boundary_error && radius >= 2) {
      GreenSolveOptions half = opt;
      half.boundary_error = false;
      const GreenOracle coarse = make(dim, shape, radius / 2, half);
      g.boundary_error_ = std::abs(g.at_origin() - coarse.at_origin());
    }
    g.finalize();
    return g;
  }

  static GreenOracle read(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidInput("cannot open green table " + path.string());
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0) throw InvalidInput("not a green table: " + path.string());
    GreenOracle g;
    g.dim_ = read_pod<std::int32_t>(is);
    g.shape_ = read_pod<std::int32_t>(is) == 0 ? DomainShape::Box : DomainShape::Ball;
    g.radius_ = read_pod<std::int32_t>(is);
    g.tolerance_ = read_pod<double>(is);
    g.residual_ = read_pod<double>(is);
    g.iterations_ = read_pod<std::int32_t>(is);
    g.boundary_error_ = read_pod<double>(is);
    g.decay_constant_ = read_pod<double>(is);
    const auto count = read_pod<std::uint64_t>(is);
    if (g.dim_ < 3 || g.dim_ > kMaxDim) throw InvalidInput("green table: bad dimension");
    enumerate_representatives(g.dim_, g.shape_, g.radius_, g.keys_);
    if (g.keys_.size() != count) throw InvalidInput("green table: size does not match header");
    g.values_.resize(count);
    is.read(reinterpret_cast<char*>(g.values_.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!is) throw InvalidInput("green table truncated");
    g.weights_.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      g.weights_[i] = static_cast<std::uint32_t>(orbit_size(unpack(g.keys_[i], g.dim_)));
    }
    return g;
  }
};

namespace {
GreenOracle solve_shape(int dim, DomainShape shape, int radius, const GreenSolveOptions& opt) {
  return GreenOracleBuilder::make(dim, shape, radius, opt);
}
}  // namespace

GreenOracle GreenOracle::solve_box(int dim, int box_radius, const GreenSolveOptions& options) {
  if (box_radius < 4) throw InvalidInput("green_box_solve: box_radius must be >= 4");
  return solve_shape(dim, DomainShape::Box, box_radius, options);
}

GreenOracle GreenOracle::solve_ball(int dim, int radius, const GreenSolveOptions& options) {
  return solve_shape(dim, DomainShape::Ball, radius, options);
}

void GreenOracle::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InvalidInput("cannot write green table " + path.string());
  os.write(kMagic, 8);
  write_pod(os, static_cast<std::int32_t>(dim_));
  write_pod(os, static_cast<std::int32_t>(shape_ == DomainShape::Box ? 0 : 1));
  write_pod(os, static_cast<std::int32_t>(radius_));
  write_pod(os, tolerance_);
  write_pod(os, residual_);
  write_pod(os, static_cast<std::int32_t>(iterations_));
  write_pod(os, boundary_error_);
  write_pod(os, decay_constant_);
  write_pod(os, static_cast<std::uint64_t>(values_.size()));
  os.write(reinterpret_cast<const char*>(values_.data()),
           static_cast<std::streamsize>(values_.size() * sizeof(double)));
}

GreenOracle GreenOracle::load(const std::filesystem::path& path) { return GreenOracleBuilder::read(path); }

GreenOracle GreenOracle::cached_box(int dim, int box_radius, const std::filesystem::path& path) {
  if (std::filesystem::exists(path)) {
    try {
      GreenOracle g = load(path);
      if (g.dim() == dim && g.radius() == box_radius && g.shape() == DomainShape::Box) return g;
    } catch (const InvalidInput&) {
      // stale or foreign file: fall through and rebuild
    }
  }
  GreenOracle g = solve_box(dim, box_radius);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  g.save(path);
  return g;
}

std::int64_t GreenOracle::find(const LatticePoint& z) const noexcept {
  const LatticePoint c = canonical(z);
  if (!inside(shape_, radius_, c)) return -1;
  const std::uint64_t key = pack(c);
  const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return -1;
  return it - keys_.begin();
}

bool GreenOracle::contains(const LatticePoint& z) const noexcept {
  return z.dim() == dim_ && inside(shape_, radius_, canonical(z));
}

double GreenOracle::operator()(const LatticePoint& z) const {
  if (z.dim() != dim_) throw InvalidInput("green: dimension mismatch");
  const std::int64_t i = find(z);
  if (i < 0) {
    throw InvalidInput("oracle box too small: " + z.to_string() + " outside radius " + std::to_string(radius_));
  }
  return values_[static_cast<std::size_t>(i)];
}

double GreenOracle::radial_envelope(double r) const noexcept {
  if (r <= 1.0) return at_origin();
  return std::min(at_origin(), decay_constant_ * std::pow(r, 2.0 - dim_));
}

double GreenOracle::envelope(const LatticePoint& z) const noexcept {
  const std::int64_t i = find(z);
  if (i >= 0) return values_[static_cast<std::size_t>(i)];
  return radial_envelope(z.norm());
}

double GreenOracle::square_sum() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += weights_[i] * values_[i] * values_[i];
  return s;
}

LatticePoint GreenOracle::representative(std::size_t i) const { return unpack(keys_.at(i), dim_); }

void GreenOracle::finalize() {
  decay_constant_ = 0.0;
  for (std::size_t i = 1; i < keys_.size(); ++i) {
    const LatticePoint c = unpack(keys_[i], dim_);
    const bool trusted = shape_ == DomainShape::Box ? 2 * c.linf_norm() <= radius_ : 2.0 * c.norm() <= radius_;
    if (!trusted) continue;
    decay_constant_ = std::max(decay_constant_, values_[i] * std::pow(c.norm(), dim_ - 2.0));
  }
}

std::vector<GreenEstimate> green_mc(int dim, const SiteList& sites, std::uint64_t replicas,
                                    std::int64_t stop_radius, std::uint64_t seed, const GreenOracle& oracle,
                                    const ParallelConfig& parallel) {
  if (replicas < 1) throw InvalidInput("green_mc: replicas must be >= 1");
  if (dim <= 2) throw InvalidInput("nonterminating truncation: dimension " + std::to_string(dim) + " is recurrent");
  absl::flat_hash_map<LatticePoint, std::uint32_t> index;
  std::int64_t window = 0;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i].dim() != dim) throw InvalidInput("green_mc: site dimension mismatch");
    index.emplace(sites[i], static_cast<std::uint32_t>(i));
    window = std::max(window, sites[i].linf_norm());
  }
  const std::size_t n_sites = sites.size();

  struct Partial {
    std::vector<std::uint64_t> sum, sumsq;
  };
  auto partials = map_chunks(replicas, parallel, [&](std::uint64_t begin, std::uint64_t end) {
    Partial part{std::vector<std::uint64_t>(n_sites, 0), std::vector<std::uint64_t>(n_sites, 0)};
    std::vector<std::uint64_t> current(n_sites, 0);
    std::vector<std::uint32_t> touched;
    for (std::uint64_t rep = begin; rep < end; ++rep) {
      WalkState w = start_walk(dim, seed, rep);
      walk_in_ball(w, stop_radius, [&](const LatticePoint& z) {
        for (int i = 0; i < dim; ++i) {
          if (z[i] > window || z[i] < -window) return true;
        }
        const auto it = index.find(z);
        if (it != index.end()) {
          if (current[it->second]++ == 0) touched.push_back(it->second);
        }
        return true;
      });
      for (auto i : touched) {
        part.sum[i] += current[i];
        part.sumsq[i] += current[i] * current[i];
        current[i] = 0;
      }
      touched.clear();
    }
    return part;
  });

  std::vector<std::uint64_t> sum(n_sites, 0), sumsq(n_sites, 0);
  for (const auto& p : partials) {
    for (std::size_t i = 0; i < n_sites; ++i) {
      sum[i] += p.sum[i];
      sumsq[i] += p.sumsq[i];
    }
  }

  std::vector<GreenEstimate> out;
  out.reserve(n_sites);
  const auto n = static_cast<long double>(replicas);
  for (std::size_t i = 0; i < n_sites; ++i) {
    GreenEstimate e;
    e.site = sites[i];
    e.replicas = replicas;
    const long double mean = static_cast<long double>(sum[i]) / n;
    e.mean = static_cast<double>(mean);
    if (replicas > 1) {
      const long double var = (static_cast<long double>(sumsq[i]) - n * mean * mean) / (n - 1);
      e.standard_error = static_cast<double>(std::sqrt(std::max(0.0L, var) / n));
    }
    // Missed visits are at most G(z) itself, and at most the post-exit bound when
    // z is deep inside the ball.
    e.bias_bound = oracle.radial_envelope(sites[i].norm());
    if (2.0 * sites[i].norm() <= static_cast<double>(stop_radius)) {
      e.bias_bound = std::min(e.bias_bound, truncation_bias_bound(stop_radius, {sites[i]}, oracle).bias_bound);
    }
    out.push_back(e);
  }
  return out;
}

GreenEstimate green_mc(int dim, const LatticePoint& z, std::uint64_t replicas, std::int64_t stop_radius,
                       std::uint64_t seed, const GreenOracle& oracle, const ParallelConfig& parallel) {
  return green_mc(dim, SiteList{z}, replicas, stop_radius, seed, oracle, parallel).front();
}

HittingProbability hitting_probability(const LatticePoint& z1, const LatticePoint& z2, const GreenOracle& oracle) {
  if (z1 == z2) return {1.0, 0.0};
  const double p = oracle(z2 - z1) / oracle.at_origin();
  return {p, p * std::pow(distance(z1, z2), oracle.dim() - 2.0)};
}

}  // namespace iltlab
