#include "dann/sampling.hpp"

#include <numeric>

#include "dann/rng.hpp"

namespace dann {

PointSet lhs_sample(const Box& box, int n, std::uint64_t seed) {
  const int d = box.dim();
  PointSet ps;
  ps.n = n;
  ps.dim = d;
  ps.coords.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(d), 0.0);
  Rng rng(seed);
  std::vector<int> perm(static_cast<std::size_t>(n));
  // Axis draw order is part of the determinism contract: for each axis, first
  // the Fisher-Yates permutation, then the n in-stratum offsets.
  for (int a = 0; a < d; ++a) {
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i) + 1));
      std::swap(perm[static_cast<std::size_t>(i)], perm[j]);
    }
    const auto [lo, hi] = box.axes[static_cast<std::size_t>(a)];
    const double w = (hi - lo) / n;
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform01();
      ps.coords[static_cast<std::size_t>(i) * static_cast<std::size_t>(d) +
                static_cast<std::size_t>(a)] =
          lo + (perm[static_cast<std::size_t>(i)] + u) * w;
    }
  }
  return ps;
}

}  // namespace dann
