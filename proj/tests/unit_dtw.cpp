#include "pickauth/dtw.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dtw_oracle.hpp"
#include "pickauth/rng.hpp"

using namespace pickauth;
using pickauth::testing::enumerate_dtw;

namespace {

Series make_series(std::initializer_list<double> v) { return Series(std::vector<double>(v)); }

Series random_series(Rng& rng, std::size_t len, double lo, double hi) {
  std::vector<double> v(len);
  for (double& x : v) x = rng.uniform(lo, hi);
  return Series(std::move(v));
}

// Integer-valued series in [0, 3]: sums are exact, so cost ties are real ties.
Series random_int_series(Rng& rng, std::size_t len) {
  std::vector<double> v(len);
  for (double& x : v) x = static_cast<double>(rng.below(4));
  return Series(std::move(v));
}

MultiSeries random_multi(Rng& rng, std::size_t k, std::size_t len) {
  std::vector<Series> ch;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < k; ++i) {
    ch.push_back(random_series(rng, len, -2.0, 2.0));
    ids.push_back("ch-" + std::to_string(i));
  }
  return MultiSeries(std::move(ch), std::move(ids));
}

}  // namespace

TEST_CASE("local_distance is the absolute difference") {
  CHECK(dtw::local_distance(3.0, 3.0) == 0.0);
  CHECK(dtw::local_distance(1.0, 4.0) == 3.0);
  CHECK(dtw::local_distance(-2.0, 2.0) == 4.0);
}

TEST_CASE("series and weight invariants are enforced at construction") {
  CHECK_THROWS_AS(Series(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(Series({1.0, std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(Series({std::numeric_limits<double>::infinity()}), std::invalid_argument);

  CHECK_THROWS_AS(WeightVector({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(WeightVector({-0.1, 1.1}), std::invalid_argument);
  CHECK_NOTHROW(WeightVector({0.6, 0.4}));

  CHECK_THROWS_AS(MultiSeries({make_series({1.0}), make_series({1.0, 2.0})}, {"a", "b"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(MultiSeries({make_series({1.0}), make_series({2.0})}, {"a", "a"}),
                  std::invalid_argument);
}

TEST_CASE("dtw_1d on identical sequences is zero with the diagonal path") {
  const Series x = make_series({0.5, 1.0, 0.25});
  const auto r = dtw::dtw_1d(x, x, true);
  CHECK(r.distance == 0.0);
  REQUIRE(r.path.has_value());
  const WarpingPath expected{{{0, 0}, {1, 1}, {2, 2}}};
  CHECK(*r.path == expected);
}

TEST_CASE("dtw_1d on constant sequences of different length is zero") {
  const auto r = dtw::dtw_1d(make_series({7.0}), make_series({7.0, 7.0, 7.0}), true);
  CHECK(r.distance == 0.0);
  CHECK(r.path_length == 3);
  const WarpingPath expected{{{0, 0}, {0, 1}, {0, 2}}};
  CHECK(*r.path == expected);
}

TEST_CASE("dtw_1d normalizes cumulative cost by path length") {
  // Brute-force enumeration confirms the minimum cumulative cost is 1.0.
  const std::vector<double> x{1.0, 2.0, 3.0}, y{2.0, 2.0, 3.0};
  const auto oracle = enumerate_dtw(x, y);
  CHECK(oracle.cost == 1.0);
  CHECK(oracle.pairs.size() == 3);

  const auto r = dtw::dtw_1d(Series(x), Series(y));
  CHECK(r.cumulative_cost == 1.0);
  CHECK(r.path_length == 3);
  CHECK(r.distance == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("dtw_1d matches exhaustive enumeration on random small cases") {
  Rng rng(20240811);
  for (int iter = 0; iter < 300; ++iter) {
    const std::size_t n = 1 + rng.below(6), m = 1 + rng.below(6);
    const Series x = random_int_series(rng, n), y = random_int_series(rng, m);
    const auto oracle = enumerate_dtw(x.values(), y.values());
    const auto r = dtw::dtw_1d(x, y, true);
    REQUIRE(r.cumulative_cost == oracle.cost);
    REQUIRE(r.path_length == oracle.pairs.size());
    REQUIRE(r.path->pairs == oracle.pairs);
    REQUIRE(r.distance == oracle.cost / static_cast<double>(oracle.pairs.size()));
    REQUIRE(r.cells == n * m);
  }
}

TEST_CASE("dtw_1d distance-only and path-recovering kernels agree") {
  Rng rng(99);
  for (int iter = 0; iter < 200; ++iter) {
    const Series x = random_series(rng, 1 + rng.below(30), -2, 2);
    const Series y = random_series(rng, 1 + rng.below(30), -2, 2);
    const auto a = dtw::dtw_1d(x, y, false);
    const auto b = dtw::dtw_1d(x, y, true);
    REQUIRE(a.cumulative_cost == b.cumulative_cost);
    REQUIRE(a.path_length == b.path_length);
    REQUIRE(a.distance == b.distance);
    REQUIRE(b.path->pairs.size() == b.path_length);
  }
}

TEST_CASE("dtw_1d is non-negative, zero on equal input, and symmetric") {
  Rng rng(7);
  for (int iter = 0; iter < 200; ++iter) {
    const Series x = random_series(rng, 1 + rng.below(20), -3, 3);
    const Series y = random_series(rng, 1 + rng.below(20), -3, 3);
    const auto xy = dtw::dtw_1d(x, y);
    const auto yx = dtw::dtw_1d(y, x);
    REQUIRE(xy.distance >= 0.0);
    REQUIRE(xy.distance == doctest::Approx(yx.distance).epsilon(1e-12));
    REQUIRE(dtw::dtw_1d(x, x).distance == 0.0);
  }
}

TEST_CASE("symmetry regression: equal-cost paths of different length") {
  // Min cumulative cost 5 here is realized by a length-6 path in one order
  // and a length-5 path in the other; normalizing by the shortest minimizing
  // path keeps the distance identical in both orders.
  const Series x = make_series({2, 3, 1});
  const Series y = make_series({1, 1, 2, 1, 3});
  const auto xy = dtw::dtw_1d(x, y, true);
  const auto yx = dtw::dtw_1d(y, x, true);
  CHECK(xy.cumulative_cost == 5.0);
  CHECK(xy.path_length == 5);
  CHECK(yx.path_length == 5);
  CHECK(xy.distance == yx.distance);
}

TEST_CASE("dtw_1d stays symmetric when cost ties force different tie-breaks") {
  // Integer-valued inputs create exact ties between vertical and horizontal
  // predecessors; the shorter-path rule keeps the normalized distance equal
  // in both argument orders.
  Rng rng(1234);
  for (int iter = 0; iter < 500; ++iter) {
    const Series x = random_int_series(rng, 1 + rng.below(6));
    const Series y = random_int_series(rng, 1 + rng.below(6));
    const auto xy = dtw::dtw_1d(x, y);
    const auto yx = dtw::dtw_1d(y, x);
    REQUIRE(xy.cumulative_cost == yx.cumulative_cost);
    REQUIRE(xy.path_length == yx.path_length);
    REQUIRE(xy.distance == yx.distance);
  }
}

TEST_CASE("recovered path is valid and its normalized cost equals the distance") {
  Rng rng(31337);
  for (int iter = 0; iter < 200; ++iter) {
    const Series x = random_series(rng, 1 + rng.below(25), -2, 2);
    const Series y = random_series(rng, 1 + rng.below(25), -2, 2);
    const auto r = dtw::dtw_1d(x, y, true);
    REQUIRE(r.path->valid_for(x.size(), y.size()));
    double cost = 0.0;
    for (const auto& [i, j] : r.path->pairs) cost += std::abs(x[i] - y[j]);
    REQUIRE(cost / static_cast<double>(r.path->length()) == doctest::Approx(r.distance).epsilon(1e-12));
  }
}

TEST_CASE("align expands series along the path") {
  SUBCASE("diagonal path returns inputs unchanged") {
    const Series x = make_series({1.0, 2.0, 3.0});
    const WarpingPath diag{{{0, 0}, {1, 1}, {2, 2}}};
    const auto [xa, ya] = dtw::align(x, x, diag);
    CHECK(xa == x);
    CHECK(ya == x);
  }
  SUBCASE("path expansion by index lookup") {
    const Series x = make_series({1.0, 2.0});
    const Series y = make_series({1.0, 1.0, 2.0});
    const WarpingPath p{{{0, 0}, {0, 1}, {1, 2}}};
    const auto [xa, ya] = dtw::align(x, y, p);
    CHECK(xa == make_series({1.0, 1.0, 2.0}));
    CHECK(ya == make_series({1.0, 1.0, 2.0}));
  }
  SUBCASE("invalid path is rejected") {
    const Series x = make_series({1.0, 2.0});
    const WarpingPath bad{{{0, 0}, {1, 0}}};  // does not end at (1,1)
    CHECK_THROWS_AS(dtw::align(x, x, bad), std::invalid_argument);
  }
  SUBCASE("mean gap along a minimizing path equals the normalized distance") {
    Rng rng(555);
    for (int iter = 0; iter < 100; ++iter) {
      const Series x = random_series(rng, 2 + rng.below(15), -1, 1);
      const Series y = random_series(rng, 2 + rng.below(15), -1, 1);
      const auto r = dtw::dtw_1d(x, y, true);
      const auto [xa, ya] = dtw::align(x, y, *r.path);
      double mean = 0.0;
      for (std::size_t l = 0; l < xa.size(); ++l) mean += std::abs(xa[l] - ya[l]);
      mean /= static_cast<double>(xa.size());
      REQUIRE(mean == doctest::Approx(r.distance).epsilon(1e-12));
    }
  }
}

TEST_CASE("dtw_multi_baseline averages per-channel distances") {
  Rng rng(42);
  SUBCASE("identical signals give zero") {
    const MultiSeries x = random_multi(rng, 3, 12);
    CHECK(dtw::dtw_multi_baseline(x, x).distance == 0.0);
  }
  SUBCASE("two channels with distances 0.4 and 0.8 average to 0.6") {
    // Channel distances: constant offset pairs give exactly the offset.
    const MultiSeries x({Series({1.0, 1.0}), Series({2.0, 2.0})}, {"a", "b"});
    const MultiSeries y({Series({1.4, 1.4}), Series({2.8, 2.8})}, {"a", "b"});
    const auto r = dtw::dtw_multi_baseline(x, y);
    CHECK(r.per_channel[0] == doctest::Approx(0.4));
    CHECK(r.per_channel[1] == doctest::Approx(0.8));
    CHECK(r.distance == doctest::Approx(0.6));
  }
  SUBCASE("channel mismatch rejected") {
    const MultiSeries x({Series({1.0})}, {"a"});
    const MultiSeries y({Series({1.0})}, {"b"});
    CHECK_THROWS_AS(dtw::dtw_multi_baseline(x, y), std::invalid_argument);
  }
  SUBCASE("baseline equals weighted with uniform weights") {
    for (int iter = 0; iter < 50; ++iter) {
      const std::size_t k = 1 + rng.below(6);
      const MultiSeries x = random_multi(rng, k, 4 + rng.below(20));
      Rng rng2(rng.next_u64());
      const MultiSeries y = random_multi(rng2, k, 4 + rng2.below(20));
      const auto base = dtw::dtw_multi_baseline(x, y);
      const auto wtd = dtw::dtw_multi_weighted(x, y, WeightVector::uniform(k));
      REQUIRE(base.distance == doctest::Approx(wtd.distance).epsilon(1e-12));
    }
  }
}

TEST_CASE("dtw_multi_weighted combines channels by weight") {
  SUBCASE("self distance is zero for any valid weights") {
    Rng rng(17);
    const MultiSeries x = random_multi(rng, 4, 10);
    CHECK(dtw::dtw_multi_weighted(x, x, WeightVector({0.7, 0.1, 0.1, 0.1})).distance == 0.0);
  }
  SUBCASE("two channels, distances {1, 3}, weights {0.6, 0.4} give 1.8") {
    const MultiSeries x({Series({0.0, 0.0}), Series({0.0, 0.0})}, {"a", "b"});
    const MultiSeries y({Series({1.0, 1.0}), Series({3.0, 3.0})}, {"a", "b"});
    const auto r = dtw::dtw_multi_weighted(x, y, WeightVector({0.6, 0.4}));
    CHECK(r.distance == doctest::Approx(1.8));
    CHECK(r.per_channel == std::vector<double>{1.0, 3.0});
  }
  SUBCASE("weight arity mismatch rejected") {
    const MultiSeries x({Series({0.0})}, {"a"});
    CHECK_THROWS_AS(dtw::dtw_multi_weighted(x, x, WeightVector({0.5, 0.5})), std::invalid_argument);
  }
  SUBCASE("distance decomposes as the weighted sum of per_channel") {
    Rng rng(23);
    for (int iter = 0; iter < 50; ++iter) {
      const std::size_t k = 2 + rng.below(5);
      const MultiSeries x = random_multi(rng, k, 5 + rng.below(15));
      Rng rng2(rng.next_u64());
      const MultiSeries y = random_multi(rng2, k, 5 + rng2.below(15));
      std::vector<double> w(k, 0.0);
      double sum = 0.0;
      for (double& wi : w) {
        wi = rng.uniform(0.05, 1.0);
        sum += wi;
      }
      for (double& wi : w) wi /= sum;
      const auto r = dtw::dtw_multi_weighted(x, y, WeightVector(w));
      double manual = 0.0;
      for (std::size_t i = 0; i < k; ++i) manual += w[i] * r.per_channel[i];
      REQUIRE(r.distance == doctest::Approx(manual).epsilon(1e-12));
    }
  }
  SUBCASE("raising one weight never lowers that channel's contribution") {
    Rng rng(29);
    const MultiSeries x = random_multi(rng, 3, 12);
    Rng rng2(rng.next_u64());
    const MultiSeries y = random_multi(rng2, 3, 12);
    const auto base = dtw::dtw_multi_weighted(x, y, WeightVector::uniform(3));
    for (double boost : {0.4, 0.6, 0.9}) {
      const double rest = (1.0 - boost) / 2.0;
      const auto r = dtw::dtw_multi_weighted(x, y, WeightVector({boost, rest, rest}));
      REQUIRE(boost * r.per_channel[0] >= (1.0 / 3.0) * base.per_channel[0] - 1e-12);
    }
  }
}

TEST_CASE("band radius constrains the alignment") {
  Rng rng(61);
  const Series x = random_series(rng, 20, -1, 1);
  const Series y = random_series(rng, 20, -1, 1);

  SUBCASE("radius covering the whole matrix equals unconstrained") {
    dtw::Options wide{.band_radius = 25};
    CHECK(dtw::dtw_1d(x, y, false, wide).distance == dtw::dtw_1d(x, y).distance);
  }
  SUBCASE("radius zero on equal lengths forces the diagonal") {
    dtw::Options diag_only{.band_radius = 0};
    const auto r = dtw::dtw_1d(x, y, true, diag_only);
    double mean = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mean += std::abs(x[i] - y[i]);
    mean /= static_cast<double>(x.size());
    CHECK(r.distance == doctest::Approx(mean));
    CHECK(r.path_length == x.size());
    CHECK(r.cells == x.size());  // one cell per row
  }
  SUBCASE("banded distance upper-bounds unconstrained distance") {
    for (std::size_t radius : {1u, 3u, 5u}) {
      dtw::Options opt{.band_radius = radius};
      REQUIRE(dtw::dtw_1d(x, y, false, opt).cumulative_cost >=
              dtw::dtw_1d(x, y).cumulative_cost - 1e-12);
    }
  }
  SUBCASE("band widens to keep unequal lengths feasible") {
    const Series s = random_series(rng, 5, -1, 1);
    const Series t = random_series(rng, 17, -1, 1);
    dtw::Options opt{.band_radius = 0};
    const auto r = dtw::dtw_1d(s, t, true, opt);
    CHECK(r.path->valid_for(s.size(), t.size()));
  }
}
