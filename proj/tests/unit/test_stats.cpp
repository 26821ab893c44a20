#include <doctest.h>

#include <cmath>
#include <vector>

#include "iltlab/error.hpp"
#include "iltlab/stats.hpp"

using namespace iltlab;

TEST_CASE("moment accumulator") {
  MomentAccumulator a, b, all;
  const std::vector<double> xs{1.0, 4.0, 2.5, -3.0, 7.0, 0.5};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    (i < 2 ? a : b).add(xs[i]);
    all.add(xs[i]);
  }
  a.merge(b);
  CHECK(a.count() == 6);
  CHECK(a.mean() == doctest::Approx(2.0));
  CHECK(a.variance() == doctest::Approx(all.variance()));
  CHECK(all.variance() == doctest::Approx(11.5));
  CHECK(all.standard_error() == doctest::Approx(std::sqrt(11.5 / 6.0)));
  MomentAccumulator one;
  one.add(3.0);
  CHECK(one.variance() == 0.0);
}

TEST_CASE("weighted summaries") {
  const std::vector<double> values{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> flat(4, -2.0);
  const auto s = summarize_weighted(flat, values);
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.effective_sample_size == doctest::Approx(4.0));
  const std::vector<double> skew{0.0, std::log(3.0), -1000.0, -1000.0};
  const auto t = summarize_weighted(skew, values);
  CHECK(t.mean == doctest::Approx(1.75));
  CHECK(t.effective_sample_size == doctest::Approx(16.0 / 10.0));
  const auto w = normalized_weights(skew);
  CHECK(w[0] == doctest::Approx(0.25));
  CHECK(w[1] == doctest::Approx(0.75));
  CHECK(weighted_quantile(values, std::vector<double>{0.25, 0.25, 0.25, 0.25}, 0.5) == 2.0);
  CHECK(weighted_quantile(values, std::vector<double>{0.1, 0.1, 0.1, 0.7}, 0.5) == 4.0);
}

TEST_CASE("two-sample KS test") {
  const std::vector<double> a{0.1, 0.4, 0.7, 1.2, 1.5, 1.9, 2.2, 3.0};
  const std::vector<double> b{0.3, 0.5, 0.9, 1.1, 2.0, 2.5, 3.5, 4.0, 4.4, 5.0};
  const auto r = ks_two_sample(a, b);
  // scipy.stats: ks_2samp statistic and kstwobign.sf of the corrected statistic.
  CHECK(r.statistic == doctest::Approx(0.4));
  CHECK(r.p_value == doctest::Approx(0.376181584779558).epsilon(1e-8));
  CHECK(ks_two_sample(a, a).p_value == doctest::Approx(1.0));
  CHECK_THROWS_AS(ks_two_sample({}, a), InvalidInput);
}

TEST_CASE("format_double round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5}) {
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(2.0) == "2");
}
