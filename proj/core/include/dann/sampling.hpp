#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace dann {

// Axis-aligned box; axes[k] = {lo, hi}.
struct Box {
  std::vector<std::pair<double, double>> axes;
  int dim() const { return static_cast<int>(axes.size()); }
};

// Row-major point cloud: n rows of dim coordinates each.
struct PointSet {
  int n = 0, dim = 0;
  std::vector<double> coords;

  std::span<const double> row(int i) const {
    return {coords.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
};

// Latin hypercube sample: every axis is split into n equal strata, each
// stratum receives exactly one point, and strata are matched across axes by an
// independent uniform permutation per axis. Points land strictly inside their
// strata (the in-stratum offset never hits 0 or 1), so samples avoid the box
// boundary. Deterministic for a given seed.
PointSet lhs_sample(const Box& box, int n, std::uint64_t seed);

}  // namespace dann
