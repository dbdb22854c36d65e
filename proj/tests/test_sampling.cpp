#include <algorithm>
#include <cmath>
#include <vector>

#include "dann/rng.hpp"
#include "dann/sampling.hpp"
#include "doctest.h"

namespace {

using dann::Box;
using dann::lhs_sample;
using dann::PointSet;

// Index of the stratum containing x on axis [lo, hi] split into n cells.
int stratum(double x, double lo, double hi, int n) {
  return static_cast<int>(std::floor((x - lo) / (hi - lo) * n));
}

}  // namespace

TEST_SUITE_BEGIN("sampling");

TEST_CASE("every axis places exactly one point per stratum") {
  Box box;
  box.axes = {{0.0, 1.0}, {-2.0, 5.0}, {10.0, 11.0}};
  for (int n : {1, 4, 100}) {
    PointSet ps = lhs_sample(box, n, 99);
    REQUIRE(ps.n == n);
    REQUIRE(ps.dim == 3);
    for (int axis = 0; axis < 3; ++axis) {
      const auto [lo, hi] = box.axes[static_cast<std::size_t>(axis)];
      std::vector<int> hits(static_cast<std::size_t>(n), 0);
      for (int i = 0; i < n; ++i) {
        const double x = ps.row(i)[static_cast<std::size_t>(axis)];
        CHECK(x > lo);
        CHECK(x < hi);
        const int s = stratum(x, lo, hi, n);
        REQUIRE(s >= 0);
        REQUIRE(s < n);
        ++hits[static_cast<std::size_t>(s)];
      }
      for (int c : hits) CHECK(c == 1);
    }
  }
}

TEST_CASE("samples are deterministic in the seed") {
  Box box;
  box.axes = {{0.0, 3.14}, {0.0, 3.14}};
  PointSet a = lhs_sample(box, 50, 7);
  PointSet b = lhs_sample(box, 50, 7);
  PointSet c = lhs_sample(box, 50, 8);
  CHECK(a.coords == b.coords);
  CHECK(a.coords != c.coords);
}

TEST_CASE("strata are permuted independently across axes") {
  // With one shared permutation the two coordinates would be comonotone;
  // check that sorting by axis 0 scrambles axis 1.
  Box box;
  box.axes = {{0.0, 1.0}, {0.0, 1.0}};
  PointSet ps = lhs_sample(box, 64, 3);
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < ps.n; ++i) pts.emplace_back(ps.row(i)[0], ps.row(i)[1]);
  std::sort(pts.begin(), pts.end());
  bool sorted_second = true;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].second < pts[i - 1].second) sorted_second = false;
  CHECK(!sorted_second);
}

TEST_CASE("uniform variates stay inside the open unit interval") {
  dann::Rng rng(12345);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(-3.0, 2.0);
    CHECK(u >= -3.0);
    CHECK(u <= 2.0);
  }
}

TEST_CASE("seed mixing separates adjacent streams") {
  const auto a = dann::mix_seed(1, 1);
  const auto b = dann::mix_seed(1, 2);
  const auto c = dann::mix_seed(2, 1);
  CHECK(a != b);
  CHECK(a != c);
  CHECK(b != c);
}

TEST_SUITE_END();
