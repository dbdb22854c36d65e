#include "dann/metrics.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dann {

double relative_l2(std::span<const double> approx, std::span<const double> exact) {
  assert(approx.size() == exact.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < approx.size(); ++i) {
    const double d = approx[i] - exact[i];
    num += d * d;
    den += exact[i] * exact[i];
  }
  if (den == 0.0)
    return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num) / std::sqrt(den);
}

double max_abs_diff(std::span<const double> approx, std::span<const double> exact) {
  assert(approx.size() == exact.size());
  double m = 0.0;
  for (std::size_t i = 0; i < approx.size(); ++i)
    m = std::max(m, std::abs(approx[i] - exact[i]));
  return m;
}

PointSet tensor_grid(const Box& box, std::span<const int> per_axis) {
  const int d = box.dim();
  if (static_cast<int>(per_axis.size()) != d)
    throw std::invalid_argument("per_axis size must match the box dimension");
  long long total = 1;
  for (int k = 0; k < d; ++k) {
    if (per_axis[static_cast<std::size_t>(k)] < 2)
      throw std::invalid_argument("tensor grids need at least 2 levels per axis");
    total *= per_axis[static_cast<std::size_t>(k)];
  }

  PointSet ps;
  ps.n = static_cast<int>(total);
  ps.dim = d;
  ps.coords.resize(static_cast<std::size_t>(total) * static_cast<std::size_t>(d));
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  for (long long r = 0; r < total; ++r) {
    double* out = ps.coords.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(d);
    for (int k = 0; k < d; ++k) {
      const auto [lo, hi] = box.axes[static_cast<std::size_t>(k)];
      const int n = per_axis[static_cast<std::size_t>(k)];
      out[k] = lo + (hi - lo) * (static_cast<double>(idx[static_cast<std::size_t>(k)]) /
                                 static_cast<double>(n - 1));
    }
    // row-major: last axis fastest
    for (int k = d - 1; k >= 0; --k) {
      if (++idx[static_cast<std::size_t>(k)] < per_axis[static_cast<std::size_t>(k)]) break;
      idx[static_cast<std::size_t>(k)] = 0;
    }
  }
  return ps;
}

namespace {
constexpr std::uint64_t kGridSeed = 424242;
}

PointSet default_grid(const DelayProblem& p) {
  const Box dom = p.domain();
  std::vector<int> levels;
  if (p.dim <= 2) {
    levels.assign(static_cast<std::size_t>(dom.dim()), 101);
  } else if (p.dim == 3) {
    levels.assign(static_cast<std::size_t>(dom.dim()), 11);
    levels[0] = 101;
  } else {
    return lhs_sample(dom, 10000, kGridSeed);
  }
  return tensor_grid(dom, levels);
}

PointSet lhs_cloud(const DelayProblem& p, int n) {
  return lhs_sample(p.domain(), n, kGridSeed);
}

ErrorStats field_errors(
    const DelayProblem& p,
    const std::function<double(double, std::span<const double>)>& field,
    const PointSet& pts) {
  if (!p.has_exact)
    throw std::invalid_argument("problem carries no exact solution");
  std::vector<double> a(static_cast<std::size_t>(pts.n));
  std::vector<double> e(static_cast<std::size_t>(pts.n));
  for (int i = 0; i < pts.n; ++i) {
    auto row = pts.row(i);
    auto xs = row.subspan(1);
    a[static_cast<std::size_t>(i)] = field(row[0], xs);
    e[static_cast<std::size_t>(i)] = p.exact_d(row[0], xs);
  }
  ErrorStats st;
  st.rel_l2 = relative_l2(a, e);
  st.max_abs = max_abs_diff(a, e);
  st.n = pts.n;
  return st;
}

}  // namespace dann
