#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace iltlab {

inline constexpr int kMaxDim = 8;

// A site of Z^d, 1 <= d <= kMaxDim. Unused trailing coordinates are kept at zero so
// that the defaulted comparison and hashing only see meaningful data.
class LatticePoint {
 public:
  using Coord = std::int32_t;

  LatticePoint() = default;
  explicit LatticePoint(int dim);
  LatticePoint(std::initializer_list<Coord> coords);

  static LatticePoint from_coords(std::span<const Coord> coords);
  // length * e_axis in dimension dim.
  static LatticePoint axis(int dim, int axis, Coord length = 1);

  int dim() const noexcept { return dim_; }
  Coord operator[](int i) const noexcept { return coords_[static_cast<std::size_t>(i)]; }
  Coord& operator[](int i) noexcept { return coords_[static_cast<std::size_t>(i)]; }
  std::span<const Coord> coords() const noexcept {
    return {coords_.data(), static_cast<std::size_t>(dim_)};
  }

  // |z| = sum |z_i|, the norm defining the walk's neighbourhood.
  std::int64_t l1_norm() const noexcept;
  std::int64_t linf_norm() const noexcept;
  std::int64_t squared_norm() const noexcept;
  // Euclidean norm ||z||.
  double norm() const noexcept;
  bool is_origin() const noexcept;

  LatticePoint& operator+=(const LatticePoint& other) noexcept;
  LatticePoint& operator-=(const LatticePoint& other) noexcept;
  friend LatticePoint operator+(LatticePoint a, const LatticePoint& b) noexcept { return a += b; }
  friend LatticePoint operator-(LatticePoint a, const LatticePoint& b) noexcept { return a -= b; }
  LatticePoint operator-() const noexcept;

  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;

  template <typename H>
  friend H AbslHashValue(H h, const LatticePoint& p) {
    return H::combine(std::move(h), p.coords_, p.dim_);
  }

  std::string to_string() const;

 private:
  std::array<Coord, kMaxDim> coords_{};
  std::uint8_t dim_ = 0;
};

using SiteList = std::vector<LatticePoint>;

std::int64_t squared_distance(const LatticePoint& a, const LatticePoint& b) noexcept;
double distance(const LatticePoint& a, const LatticePoint& b) noexcept;

// Representative of the hyperoctahedral orbit of z: absolute values sorted ascending.
LatticePoint canonical(const LatticePoint& z) noexcept;
// Number of lattice points in the orbit of z under coordinate permutations and sign flips.
std::uint64_t orbit_size(const LatticePoint& z);

// A signed coordinate permutation, z -> (s_0 z_{p(0)}, ..., s_{d-1} z_{p(d-1)}).
struct SignedPermutation {
  std::array<std::int8_t, kMaxDim> source{};
  std::array<std::int8_t, kMaxDim> sign{};
  int dim = 0;

  LatticePoint apply(const LatticePoint& z) const noexcept;
};

// All 2^d d! elements of the hyperoctahedral group, identity first.
std::vector<SignedPermutation> hyperoctahedral_group(int dim);

// Sorted, duplicate-free copy.
SiteList normalized(SiteList sites);

// The 2d+1 lazy-walk moves: +e_0, -e_0, ..., +e_{d-1}, -e_{d-1}, then 0.
std::vector<LatticePoint> lazy_moves(int dim);

// Sites of the l1 ball {|z| <= radius} in lexicographic order.
SiteList l1_ball(int dim, int radius);

}  // namespace iltlab
