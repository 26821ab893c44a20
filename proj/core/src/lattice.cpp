#include "iltlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "iltlab/error.hpp"

namespace iltlab {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw InvalidInput("dimension must lie in [1, " + std::to_string(kMaxDim) + "], got " +
                       std::to_string(dim));
  }
}

}  // namespace

LatticePoint::LatticePoint(int dim) {
  check_dim(dim);
  dim_ = static_cast<std::uint8_t>(dim);
}

LatticePoint::LatticePoint(std::initializer_list<Coord> coords) {
  check_dim(static_cast<int>(coords.size()));
  dim_ = static_cast<std::uint8_t>(coords.size());
  std::copy(coords.begin(), coords.end(), coords_.begin());
}

LatticePoint LatticePoint::from_coords(std::span<const Coord> coords) {
  LatticePoint p(static_cast<int>(coords.size()));
  std::copy(coords.begin(), coords.end(), p.coords_.begin());
  return p;
}

LatticePoint LatticePoint::axis(int dim, int axis, Coord length) {
  LatticePoint p(dim);
  if (axis < 0 || axis >= dim) throw InvalidInput("axis out of range");
  p[axis] = length;
  return p;
}

std::int64_t LatticePoint::l1_norm() const noexcept {
  std::int64_t s = 0;
  for (int i = 0; i < dim_; ++i) s += std::abs(static_cast<std::int64_t>(coords_[i]));
  return s;
}

std::int64_t LatticePoint::linf_norm() const noexcept {
  std::int64_t m = 0;
  for (int i = 0; i < dim_; ++i) m = std::max(m, std::abs(static_cast<std::int64_t>(coords_[i])));
  return m;
}

std::int64_t LatticePoint::squared_norm() const noexcept {
  std::int64_t s = 0;
  for (int i = 0; i < dim_; ++i) s += static_cast<std::int64_t>(coords_[i]) * coords_[i];
  return s;
}

double LatticePoint::norm() const noexcept { return std::sqrt(static_cast<double>(squared_norm())); }

bool LatticePoint::is_origin() const noexcept {
  return std::all_of(coords_.begin(), coords_.begin() + dim_, [](Coord c) { return c == 0; });
}

LatticePoint& LatticePoint::operator+=(const LatticePoint& other) noexcept {
  for (int i = 0; i < dim_; ++i) coords_[i] += other.coords_[i];
  return *this;
}

LatticePoint& LatticePoint::operator-=(const LatticePoint& other) noexcept {
  for (int i = 0; i < dim_; ++i) coords_[i] -= other.coords_[i];
  return *this;
}

LatticePoint LatticePoint::operator-() const noexcept {
  LatticePoint p = *this;
  for (int i = 0; i < dim_; ++i) p.coords_[i] = -p.coords_[i];
  return p;
}

std::string LatticePoint::to_string() const {
  std::string s = "(";
  for (int i = 0; i < dim_; ++i) {
    if (i) s += ",";
    s += std::to_string(coords_[i]);
  }
  return s + ")";
}

std::int64_t squared_distance(const LatticePoint& a, const LatticePoint& b) noexcept {
  return (a - b).squared_norm();
}

double distance(const LatticePoint& a, const LatticePoint& b) noexcept {
  return std::sqrt(static_cast<double>(squared_distance(a, b)));
}

LatticePoint canonical(const LatticePoint& z) noexcept {
  LatticePoint c = z;
  const int d = z.dim();
  for (int i = 0; i < d; ++i) c[i] = std::abs(c[i]);
  // Insertion sort; d <= 8.
  for (int i = 1; i < d; ++i) {
    const auto v = c[i];
    int j = i - 1;
    while (j >= 0 && c[j] > v) {
      c[j + 1] = c[j];
      --j;
    }
    c[j + 1] = v;
  }
  return c;
}

std::uint64_t orbit_size(const LatticePoint& z) {
  const LatticePoint c = canonical(z);
  const int d = c.dim();
  std::uint64_t perms = 1;
  for (int i = 2; i <= d; ++i) perms *= static_cast<std::uint64_t>(i);
  int run = 1;
  for (int i = 1; i <= d; ++i) {
    if (i < d && c[i] == c[i - 1]) {
      ++run;
    } else {
      for (int k = 2; k <= run; ++k) perms /= static_cast<std::uint64_t>(k);
      run = 1;
    }
  }
  int nonzero = 0;
  for (int i = 0; i < d; ++i) nonzero += c[i] != 0;
  return perms << nonzero;
}

LatticePoint SignedPermutation::apply(const LatticePoint& z) const noexcept {
  LatticePoint out(z.dim());
  for (int i = 0; i < dim; ++i) out[i] = sign[i] * z[source[i]];
  return out;
}

std::vector<SignedPermutation> hyperoctahedral_group(int dim) {
  check_dim(dim);
  std::vector<int> perm(static_cast<std::size_t>(dim));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<SignedPermutation> group;
  do {
    for (unsigned mask = 0; mask < (1u << dim); ++mask) {
      SignedPermutation g;
      g.dim = dim;
      for (int i = 0; i < dim; ++i) {
        g.source[i] = static_cast<std::int8_t>(perm[i]);
        g.sign[i] = (mask >> i) & 1u ? -1 : 1;
      }
      group.push_back(g);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return group;
}

SiteList normalized(SiteList sites) {
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  return sites;
}

std::vector<LatticePoint> lazy_moves(int dim) {
  std::vector<LatticePoint> moves;
  moves.reserve(static_cast<std::size_t>(2 * dim + 1));
  for (int i = 0; i < dim; ++i) {
    moves.push_back(LatticePoint::axis(dim, i, 1));
    moves.push_back(LatticePoint::axis(dim, i, -1));
  }
  moves.emplace_back(dim);
  return moves;
}

SiteList l1_ball(int dim, int radius) {
  SiteList out;
  LatticePoint z(dim);
  // Odometer over the cube [-radius, radius]^d, keeping the l1 ball.
  for (int i = 0; i < dim; ++i) z[i] = -radius;
  while (true) {
    if (z.l1_norm() <= radius) out.push_back(z);
    int i = dim - 1;
    while (i >= 0 && z[i] == radius) {
      z[i] = -radius;
      --i;
    }
    if (i < 0) break;
    ++z[i];
  }
  return out;
}

}  // namespace iltlab
