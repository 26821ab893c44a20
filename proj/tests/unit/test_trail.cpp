#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "iltlab/error.hpp"
#include "iltlab//capacity.hpp"
#include "iltlab/trail.hpp"
#include "iltlab/walk.hpp"
#include "support.hpp"

using namespace iltlab;

namespace {

const LatticePoint kO(3);
const LatticePoint kE1 = LatticePoint::axis(3, 0);
const LatticePoint kE2 = LatticePoint::axis(3, 1);

void check_trail_stock(const EdgeOccupation& e, const TrailStock& ts) {
  const auto n = static_cast<int>(e.size());
  REQUIRE(ts.trail.size() == e.size());
  CHECK(ts.trail.front() == e.first);
  CHECK(std::set<int>(ts.trail.begin(), ts.trail.end()).size() == e.size());
  const auto stock = ts.stock_edges();
  CHECK(static_cast<int>(stock.size()) == n - 1);
  std::set<int> tails;
  for (const auto& [a, b] : stock) {
    CHECK(a != b);
    CHECK(e.at(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) >= 1);
    CHECK(tails.insert(a).second);
  }
  CHECK(ts.holds);
  for (const auto& l : ts.levels) CHECK(l.holds);
}

}  // namespace

TEST_CASE("edge occupation from paths") {
  SUBCASE("single visit") {
    const auto e = edge_occupation({kE1}, {kO, kE1});
    CHECK(e.total_visits() == 1);
    CHECK(e.first == e.last);
    CHECK(e.sites[static_cast<std::size_t>(e.first)] == kE1);
    for (auto c : e.counts) CHECK(c == 0);
  }
  SUBCASE("alternating a, b, a, b") {
    const auto e = edge_occupation({kO, kE1, kO, kE1}, {kO, kE1});
    const int a = e.index_of(kO), b = e.index_of(kE1);
    CHECK(e.at(a, b) == 2);
    CHECK(e.at(b, a) == 1);
    CHECK(e.first == a);
    CHECK(e.last == b);
    CHECK(e.visits(static_cast<std::size_t>(a)) == 2);
    CHECK(e.visits(static_cast<std::size_t>(b)) == 2);
  }
  SUBCASE("positions outside L are skipped and loops kept") {
    const auto e = edge_occupation({kO, kE2, kO, kO, kE1, kE2, kE1}, {kO, kE1});
    const int a = e.index_of(kO), b = e.index_of(kE1);
    CHECK(e.at(a, a) == 2);
    CHECK(e.at(a, b) == 1);
    CHECK(e.at(b, b) == 1);
    CHECK(occupation_consistent(e));
  }
  CHECK_THROWS_AS(edge_occupation({kE2}, {kO}), InvalidInput);
}

TEST_CASE("site consistency reconstructs visit counts") {
  // n(z) = sum_x E(z, x) + 1{z = last}, checked on every lazy path of length <= 6.
  const SiteList lambda = normalized({kO, kE1, LatticePoint{1, 1, 0}});
  const auto moves = lazy_moves(3);
  std::vector<LatticePoint> path{kO};
  int checked = 0;
  auto rec = [&](auto&& self, int depth) -> void {
    std::map<LatticePoint, std::uint64_t> n;
    for (const auto& z : path) {
      if (std::binary_search(lambda.begin(), lambda.end(), z)) ++n[z];
    }
    const auto e = edge_occupation(path, lambda);
    for (std::size_t i = 0; i < e.size(); ++i) REQUIRE(e.visits(i) == n[e.sites[i]]);
    ++checked;
    if (depth == 6) return;
    for (const auto& m : moves) {
      path.push_back(path.back() + m);
      self(self, depth + 1);
      path.pop_back();
    }
  };
  rec(rec, 0);
  CHECK(checked == 137257);  // sum_{k<=6} 7^k
}

TEST_CASE("multinomial count bound") {
  const auto one = edge_occupation({kO, kE1, kO, kE1, kO}, {kO, kE1});
  CHECK(multinomial_count_bound(one) == 1);
  const auto two = edge_occupation({kO, kE1, kE1, kO, kE2}, {kO, kE1, kE2});
  // Out of 0: one edge to e1, one to e2 -> 2!/(1!1!); out of e1: loop and back -> 2.
  CHECK(multinomial_count_bound(two) == 4);
}

TEST_CASE("coalescence hierarchy") {
  SUBCASE("two sites") {
    const auto h = coalesce({kO, kE1});
    REQUIRE(h.levels.size() == 3);
    CHECK(h.levels[2].dist2(h.levels[2].a, h.levels[2].a_tilde) == 1);
    CHECK(h.merge_distance(2) == 1.0);
  }
  SUBCASE("collinear sites merge the close pair first") {
    const auto h = coalesce({kO, kE1, LatticePoint::axis(3, 0, 4)});
    const auto& top = h.levels[3];
    std::set<LatticePoint> merged{h.sites[static_cast<std::size_t>(top.clusters[static_cast<std::size_t>(top.a)][0])],
                                  h.sites[static_cast<std::size_t>(top.clusters[static_cast<std::size_t>(top.a_tilde)][0])]};
    CHECK(merged == std::set<LatticePoint>{kO, kE1});
    CHECK(h.merge_distance(3) == 1.0);
    CHECK(h.merge_distance(2) == 3.0);
  }
  SUBCASE("pseudo-distance is the minimum over representatives") {
    StreamRng rng(12, 0);
    for (int trial = 0; trial < 20; ++trial) {
      const auto s = test::random_connected_set(5, 3 + rng.below(8), rng);
      const auto h = coalesce(s);
      for (std::size_t k = 1; k < h.levels.size(); ++k) {
        const auto& lv = h.levels[k];
        REQUIRE(lv.size() == k);
        std::size_t total = 0;
        for (std::size_t c = 0; c < k; ++c) {
          total += lv.clusters[c].size();
          for (int i : lv.clusters[c]) CHECK(lv.cluster_of[static_cast<std::size_t>(i)] == static_cast<int>(c));
        }
        CHECK(total == s.size());
        for (std::size_t x = 0; x < k; ++x) {
          for (std::size_t y = 0; y < k; ++y) {
            if (x == y) continue;
            std::int64_t best = std::numeric_limits<std::int64_t>::max();
            for (int i : lv.clusters[x]) {
              for (int j : lv.clusters[y]) {
                best = std::min(best, squared_distance(h.sites[static_cast<std::size_t>(i)], h.sites[static_cast<std::size_t>(j)]));
              }
            }
            CHECK(lv.dist2(static_cast<int>(x), static_cast<int>(y)) == best);
          }
        }
      }
      for (int k = static_cast<int>(s.size()); k > 2; --k) CHECK(h.merge_distance(k) <= h.merge_distance(k - 1));
    }
  }
}

TEST_CASE("trail and stock") {
  SUBCASE("two sites") {
    const auto e = edge_occupation({kO, kE1}, {kO, kE1});
    const auto ts = extract_trail_stock(e);
    check_trail_stock(e, ts);
    CHECK(ts.trail_edges() == std::vector<std::pair<int, int>>{{e.index_of(kO), e.index_of(kE1)}});
    CHECK(ts.stock_edges() == ts.trail_edges());
    CHECK(ts.certificate_lhs == doctest::Approx(2.0));
    CHECK(ts.certificate_rhs == doctest::Approx(1.0));
  }
  SUBCASE("every covering sequence of short paths over small sets") {
    int cases = 0;
    for (const auto& s : enumerate_small_sets(3, 2, 3, true, true)) {
      const auto costs = avoiding_costs(s, 7);
      enumerate_visit_sequences(costs, 7, true, [&](const std::vector<int>& v) {
        const auto e = occupation_from_visits(s, v);
        const auto ts = extract_trail_stock(e);
        check_trail_stock(e, ts);
        const auto lt = loop_transfer_check(e, ts);
        CHECK(lt.holds);
        const auto es = stock_transfer(e, ts);
        CHECK(es.total_visits() == e.total_visits());
        ++cases;
      });
    }
    CHECK(cases > 1000);
  }
  SUBCASE("inconsistent occupation") {
    auto e = edge_occupation({kO, kE1, kO}, {kO, kE1});
    e.at(0, 1) += 3;
    CHECK_FALSE(occupation_consistent(e));
    CHECK_THROWS_AS(extract_trail_stock(e), InvalidInput);
  }
}

TEST_CASE("visit-sequence enumeration agrees with literal path enumeration") {
  for (const auto& s : enumerate_small_sets(3, 1, 3, false, false)) {
    if (s.size() > 2) continue;
    std::set<std::vector<int>> fast, literal;
    enumerate_visit_sequences(avoiding_costs(s, 5), 5, false, [&](const std::vector<int>& v) { fast.insert(v); });
    enumerate_visit_sequences_literal(s, 5, false, [&](const std::vector<int>& v) { literal.insert(v); });
    CHECK(fast == literal);
  }
}

TEST_CASE("small set enumeration") {
  // Brute force over the hyperoctahedral group (Python).
  CHECK(enumerate_small_sets(3, 1, 3, true, true).size() == 4);
  CHECK(enumerate_small_sets(3, 2, 4, true, true).size() == 98);
  CHECK(enumerate_small_sets(4, 2, 3, true, true).size() == 22);
  // sum_{k=1}^4 C(25, k).
  CHECK(enumerate_small_sets(3, 2, 4, false, false).size() == 15275);
}

TEST_CASE("visit profile probabilities") {
  const auto& g = test::oracle(5, 24);
  const LatticePoint e1 = LatticePoint::axis(5, 0);
  const auto h = harmonic_measure({e1, LatticePoint::axis(5, 0, 2)}, g);
  for (const auto& profile : std::vector<std::vector<int>>{{1, 0}, {0, 1}, {1, 1}, {2, 1}, {2, 2}, {3, 1}}) {
    CHECK(profile_probability(h, profile) == doctest::Approx(profile_probability_enumerated(h, profile)).epsilon(1e-12));
  }
  // One site: entrance * q^(n-1) * escape.
  const auto single = harmonic_measure({e1}, g);
  const double p = single.q(1, 0) * single.q(0, 0) * single.q(0, 0) * single.escape(0);
  CHECK(profile_probability(single, {3}) == doctest::Approx(p));
  CHECK(profile_probability(single, {0}) == doctest::Approx(1.0 - single.q(1, 0)));
}

TEST_CASE("level-set probability bound") {
  const auto& g = test::oracle(5, 24);
  const SiteList o{LatticePoint(5)};
  for (int n : {1, 5, 20}) {
    const auto b = level_set_prob_bound(o, {n}, g, 2.0);
    CHECK(b.bound() == doctest::Approx(2.0 * n * std::exp(-n / g.at_origin())));
  }
  const SiteList pair{LatticePoint(5), LatticePoint::axis(5, 0)};
  double previous = std::numeric_limits<double>::infinity();
  for (int nmin = 1; nmin <= 10; ++nmin) {
    const double b = level_set_prob_bound(pair, {nmin, 10}, g, 1.0).bound();
    CHECK(b <= previous);
    previous = b;
  }
  CHECK_THROWS_AS(level_set_prob_bound(pair, {1}, g, 1.0), InvalidInput);
}

TEST_CASE("intersection bound evaluators") {
  const IntersectionConstants c{2.0, 0.7, 0.2};
  const auto one = intersection_bound_evaluators(3, 4, 1, 5, c);
  CHECK(one.log_upper == doctest::Approx(std::log(2.0 * 12.0) - 0.7 * 7.0));
  double previous = std::numeric_limits<double>::infinity();
  for (int s = 2; s < 30; ++s) {
    const double u = intersection_bound_evaluators(s, s, 3, 5, c).log_upper;
    CHECK(u < previous);
    previous = u;
  }
  CHECK_THROWS_AS(intersection_bound_evaluators(1, 1, 1, 5, {1.0, 1.0, 0.5}), InvalidInput);
}

TEST_CASE("occupation json round-trip") {
  const auto e = edge_occupation({kO, kE1, kE1, kE2, kO}, {kO, kE1, kE2});
  CHECK(occupation_from_json(to_json(e)) == e);
  const auto j = to_json(extract_trail_stock(e));
  CHECK(j.contains("trail"));
}
