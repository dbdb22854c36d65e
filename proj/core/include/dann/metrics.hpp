#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dann/problem.hpp"
#include "dann/sampling.hpp"

namespace dann {

// ||a - b||_2 / ||b||_2 with b the reference values; 0 when both vanish,
// +inf when only the reference does.
double relative_l2(std::span<const double> approx, std::span<const double> exact);

double max_abs_diff(std::span<const double> approx, std::span<const double> exact);

// Tensor grid over the box: per_axis[k] >= 2 uniformly spaced levels on axis
// k, endpoints included. Rows are emitted row-major with the last axis
// fastest.
PointSet tensor_grid(const Box& box, std::span<const int> per_axis);

// The evaluation grid reported errors use: 101 levels per axis up to two
// spatial dimensions, 101 time levels with 11 per spatial axis at three.
// Beyond three a tensor grid is impractical and a Latin hypercube cloud of
// 10^4 points (fixed seed 424242, so errors are comparable across runs) is
// used instead.
PointSet default_grid(const DelayProblem& p);

// Latin hypercube cloud over the domain with the same fixed seed; the
// cross-check companion to the tensor grid for dim >= 3.
PointSet lhs_cloud(const DelayProblem& p, int n);

struct ErrorStats {
  double rel_l2 = 0.0;
  double max_abs = 0.0;
  int n = 0;
};

// Errors of an arbitrary scalar field against the problem's exact solution
// over the given points. The problem must carry an exact solution.
ErrorStats field_errors(
    const DelayProblem& p,
    const std::function<double(double, std::span<const double>)>& field,
    const PointSet& pts);

}  // namespace dann
