#include <cmath>
#include <span>
#include <vector>

#include "dann/optimize.hpp"
#include "doctest.h"

namespace {

using dann::IterInfo;
using dann::LbfgsOptions;
using dann::LbfgsResult;
using dann::StopReason;

double rosenbrock(std::span<const double> x, std::span<double> g) {
  const double a = x[0], b = x[1];
  const double t1 = 1.0 - a;
  const double t2 = b - a * a;
  g[0] = -2.0 * t1 - 400.0 * a * t2;
  g[1] = 200.0 * t2;
  return t1 * t1 + 100.0 * t2 * t2;
}

}  // namespace

TEST_SUITE_BEGIN("optimize");

TEST_CASE("rosenbrock from the classic start converges tightly") {
  LbfgsOptions opt;
  opt.max_iter = 200;
  std::vector<double> x0 = {-1.2, 1.0};
  std::vector<double> fs;
  auto res = dann::lbfgs_minimize(rosenbrock, x0, opt,
                                  [&](const IterInfo& it) { fs.push_back(it.f); });
  CHECK(res.converged);
  CHECK(std::abs(res.x[0] - 1.0) < 1e-6);
  CHECK(std::abs(res.x[1] - 1.0) < 1e-6);
  CHECK(res.iters <= 200);

  // Accepted iterates decrease strictly; the line search enforces it.
  REQUIRE(!fs.empty());
  double last = 1e300;
  bool first = true;
  for (double f : fs) {
    if (!first) CHECK(f < last);
    last = f;
    first = false;
  }
}

TEST_CASE("runs are bitwise deterministic") {
  LbfgsOptions opt;
  opt.max_iter = 50;
  std::vector<double> x0 = {-1.2, 1.0};
  std::vector<double> trace1, trace2;
  auto r1 = dann::lbfgs_minimize(rosenbrock, x0, opt,
                                 [&](const IterInfo& it) { trace1.push_back(it.f); });
  auto r2 = dann::lbfgs_minimize(rosenbrock, x0, opt,
                                 [&](const IterInfo& it) { trace2.push_back(it.f); });
  CHECK(r1.x == r2.x);
  CHECK(r1.f == r2.f);
  CHECK(r1.iters == r2.iters);
  CHECK(r1.evals == r2.evals);
  CHECK(trace1 == trace2);
}

TEST_CASE("separable quadratic converges in a few iterations") {
  auto quad = [](std::span<const double> x, std::span<double> g) {
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - static_cast<double>(i + 1);
      g[i] = 2.0 * d;
      f += d * d;
    }
    return f;
  };
  LbfgsOptions opt;
  opt.max_iter = 100;
  std::vector<double> x0(8, 0.0);
  auto res = dann::lbfgs_minimize(quad, x0, opt, nullptr);
  CHECK(res.converged);
  CHECK(res.iters < 25);
  for (std::size_t i = 0; i < res.x.size(); ++i)
    CHECK(std::abs(res.x[i] - static_cast<double>(i + 1)) < 1e-7);
}

TEST_CASE("starting at the optimum stops immediately on the gradient test") {
  auto quad = [](std::span<const double> x, std::span<double> g) {
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      g[i] = 2.0 * x[i];
      f += x[i] * x[i];
    }
    return f;
  };
  LbfgsOptions opt;
  std::vector<double> x0(3, 0.0);
  auto res = dann::lbfgs_minimize(quad, x0, opt, nullptr);
  CHECK(res.converged);
  CHECK(res.reason == StopReason::GradTol);
  CHECK(res.iters == 0);
}

TEST_CASE("iteration budget is honored") {
  LbfgsOptions opt;
  opt.max_iter = 3;
  std::vector<double> x0 = {-1.2, 1.0};
  auto res = dann::lbfgs_minimize(rosenbrock, x0, opt, nullptr);
  CHECK(res.iters <= 3);
  CHECK(res.reason == StopReason::MaxIter);
}

TEST_SUITE_END();
