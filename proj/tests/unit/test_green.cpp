#include <doctest.h>

#include <cmath>
#include <fstream>

#include "iltlab/error.hpp"
#include "iltlab//green.hpp"
#include "iltlab/stats.hpp"
#include "iltlab/walk.hpp"
#include "support.hpp"

using namespace iltlab;

namespace {

// Lazy-walk Green's function from the Bessel integral
// G(z) = (2d+1)/(2d) int_0^inf prod_i e^{-t/d} I_{z_i}(t/d) dt, evaluated with scipy quad.
struct Reference {
  int dim;
  LatticePoint z;
  double value;
};

const Reference kBessel[] = {
    {5, LatticePoint{0, 0, 0, 0, 0}, 1.2719389373105212},
    {5, LatticePoint{1, 0, 0, 0, 0}, 0.17193893732150786},
    {5, LatticePoint{1, 1, 0, 0, 0}, 0.052149455649264376},
    {5, LatticePoint{2, 0, 0, 0, 0}, 0.030254790820293583},
    {5, LatticePoint{3, 0, 0, 0, 0}, 0.007589519163270322},
    {4, LatticePoint{0, 0, 0, 0}, 1.3944005109395645},
    {4, LatticePoint{1, 0, 0, 0}, 0.26940051207954185},
    {4, LatticePoint{1, 1, 0, 0}, 0.11443233507830923},
};

}  // namespace

TEST_CASE("box solve against the Bessel integral") {
  for (const auto& ref : kBessel) {
    const auto& g = test::oracle(ref.dim, ref.dim == 5 ? 24 : 32);
    CAPTURE(ref.z.to_string());
    // Killing at the box boundary can only remove visits.
    CHECK(g(ref.z) <= ref.value + 1e-9);
    CHECK(ref.value - g(ref.z) <= g.boundary_error_bound() + 1e-9);
  }
}

TEST_CASE("table invariants") {
  const auto& g = test::oracle(5, 24);
  CHECK(g.residual() <= 1e-10);
  double top = 0.0;
  for (std::size_t i = 0; i < g.table_size(); ++i) {
    CHECK(g.table_value(i) > 0.0);
    top = std::max(top, g.table_value(i));
  }
  CHECK(top == g.at_origin());
  const LatticePoint e1 = LatticePoint::axis(5, 0), e2 = LatticePoint::axis(5, 1);
  CHECK(g(e1) == g(-e1));
  CHECK(g(e1) == g(e2));
  const LatticePoint x{1, -2, 0, 3, 1};
  for (const auto& s : hyperoctahedral_group(5)) CHECK(g(s.apply(x)) == g(x));
  // Lazy-walk harmonicity at the origin: G(0) = 1 + (G(0) + 2d G(e1)) / (2d + 1).
  CHECK(g.at_origin() == doctest::Approx(1.0 + (g.at_origin() + 10.0 * g(e1)) / 11.0).epsilon(1e-10));
  CHECK_FALSE(g.contains(LatticePoint::axis(5, 0, 25)));
  CHECK_THROWS_AS(g(LatticePoint::axis(5, 0, 25)), InvalidInput);
  CHECK(g.envelope(LatticePoint::axis(5, 0, 100)) <= g.radial_envelope(99.0));
  CHECK_THROWS_AS(GreenOracle::solve_box(2, 10), InvalidInput);
}

TEST_CASE("doubling the box stays inside the boundary error bound") {
  const auto& small = test::oracle(5, 12);
  const auto& large = test::oracle(5, 24);
  CHECK(std::abs(large.at_origin() - small.at_origin()) < small.boundary_error_bound());
  CHECK(large.boundary_error_bound() < small.boundary_error_bound());
}

TEST_CASE("save and load round-trip") {
  const auto& g = test::oracle(4, 10);
  const auto path = test::scratch_dir("green-io") / "g.bin";
  g.save(path);
  const auto h = GreenOracle::load(path);
  CHECK(h.dim() == 4);
  CHECK(h.box_radius() == 10);
  CHECK(h.table_size() == g.table_size());
  for (std::size_t i = 0; i < g.table_size(); ++i) REQUIRE(h.table_value(i) == g.table_value(i));
  CHECK(h.boundary_error_bound() == g.boundary_error_bound());
  std::ofstream(path, std::ios::trunc) << "junk";
  CHECK_THROWS_AS(GreenOracle::load(path), InvalidInput);
}

TEST_CASE("ball domain agrees with the box in the interior") {
  const auto ball = GreenOracle::solve_ball(5, 16);
  const auto& box = test::oracle(5, 24);
  CHECK(std::abs(ball.at_origin() - box.at_origin()) <= ball.boundary_error_bound() + box.boundary_error_bound());
}

TEST_CASE("G(0) is the inverse escape probability") {
  const auto& g = test::oracle(5, 24);
  const std::uint64_t n = 20000;
  const std::int64_t R = 30;
  MomentAccumulator returned;
  for (std::uint64_t r = 0; r < n; ++r) {
    WalkState w = start_walk(5, 5, r);
    bool first = true, back = false;
    walk_in_ball(w, R, [&](const LatticePoint& z) {
      if (!first && z.is_origin()) back = true;
      first = false;
      return !back;
    });
    returned.add(back ? 1.0 : 0.0);
  }
  const double p = 1.0 - 1.0 / g.at_origin();
  const double bias = truncation_bias_bound(R, {LatticePoint(5)}, g).bias_bound;
  CHECK(std::abs(returned.mean() - p) <= 3.0 * returned.standard_error() + bias);
}

TEST_CASE("green_mc against the box solve") {
  const auto& g = test::oracle(5, 24);
  const SiteList sites{LatticePoint(5), LatticePoint::axis(5, 0), LatticePoint{1, 1, 0, 0, 0}};
  const auto est = green_mc(5, sites, 20000, 30, 3, g, {2, 1000});
  REQUIRE(est.size() == 3);
  for (const auto& e : est) {
    CAPTURE(e.site.to_string());
    CHECK(e.replicas == 20000);
    CHECK(std::abs(e.mean - g(e.site)) <= 3.0 * e.standard_error + e.bias_bound + g.boundary_error_bound());
  }
  const auto far = green_mc(5, LatticePoint::axis(5, 0, 12), 500, 10, 3, g);
  CHECK(far.mean == 0.0);
  CHECK(far.bias_bound >= g(LatticePoint::axis(5, 0, 12)));
}

TEST_CASE("hitting probabilities") {
  const auto& g = test::oracle(5, 40);
  const LatticePoint z{2, -1, 0, 3, 0};
  CHECK(hitting_probability(z, z, g).probability == 1.0);
  CHECK(hitting_probability(z, z, g).scaled == 0.0);
  double previous = 1.0;
  for (int k = 1; k <= 10; ++k) {
    const double p = hitting_probability(LatticePoint(5), LatticePoint::axis(5, 0, k), g).probability;
    CHECK(p > 0.0);
    CHECK(p < previous);
    previous = p;
  }
  const double s8 = hitting_probability(LatticePoint(5), LatticePoint::axis(5, 0, 8), g).scaled;
  const double s16 = hitting_probability(LatticePoint(5), LatticePoint::axis(5, 0, 16), g).scaled;
  CHECK(std::abs(s16 / s8 - 1.0) < 0.2);
}
