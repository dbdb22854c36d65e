#include <cmath>
#include <stdexcept>
#include <vector>

#include "dann/piecewise.hpp"
#include "dann/problem.hpp"
#include "dann/training.hpp"
#include "doctest.h"

namespace {

using dann::Act;
using dann::Architecture;
using dann::DelayProblem;
using dann::Model;
using dann::TrainConfig;

Architecture tiny_arch(int input_dim) {
  Architecture a;
  a.model = Model::DANN;
  a.input_dim = input_dim;
  a.widths = {5, 5};
  a.sigma1 = Act::Sigmoid;
  a.sigma2 = Act::Tanh;
  return a;
}

DelayProblem unit_delay(double T) {
  auto p = dann::make_benchmark("ex1");
  p.T = T;
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("piecewise");

TEST_CASE("unit delay splits the horizon at integer breakpoints") {
  auto xi = dann::compute_breakpoints(unit_delay(2.0));
  REQUIRE(xi.size() == 3);
  CHECK(xi[0] == 0.0);
  CHECK(std::abs(xi[1] - 1.0) < 1e-10);
  CHECK(xi[2] == 2.0);

  auto xi_clip = dann::compute_breakpoints(unit_delay(1.5));
  REQUIRE(xi_clip.size() == 3);
  CHECK(std::abs(xi_clip[1] - 1.0) < 1e-10);
  CHECK(xi_clip[2] == 1.5);

  auto xi_short = dann::compute_breakpoints(unit_delay(0.8));
  REQUIRE(xi_short.size() == 2);
  CHECK(xi_short[1] == 0.8);
}

TEST_CASE("cubic lag map recovers its own breakpoints") {
  // s(t) = (t-1)^3 maps 1 -> 0 and 2 -> 1, so the cascade is {0, 1, 2}.
  auto p = dann::make_benchmark("ex2");
  auto xi = dann::compute_breakpoints(p);
  REQUIRE(xi.size() == 3);
  CHECK(xi[0] == 0.0);
  CHECK(std::abs(xi[1] - 1.0) < 1e-10);
  CHECK(std::abs(xi[2] - 2.0) < 1e-10);
}

TEST_CASE("state-dependent delays cannot be split a priori") {
  auto p3 = dann::make_benchmark("ex3");
  CHECK_THROWS_AS(dann::compute_breakpoints(p3), std::invalid_argument);
  Architecture arch = tiny_arch(1);
  TrainConfig cfg;
  cfg.n_f = 8;
  cfg.n_i = 2;
  cfg.max_iter = 2;
  CHECK_THROWS_AS(dann::train_piecewise(p3, arch, cfg), std::invalid_argument);
}

TEST_CASE("subdomain lookup is right-continuous") {
  dann::PiecewiseSolution sol;
  sol.breakpoints = {0.0, 1.0, 2.0};
  sol.thetas = {{}, {}};  // two subdomains, lookup only
  CHECK(sol.subs() == 2);
  CHECK(sol.sub_index(-0.5) == 0);
  CHECK(sol.sub_index(0.0) == 0);
  CHECK(sol.sub_index(0.99) == 0);
  CHECK(sol.sub_index(1.0) == 1);
  CHECK(sol.sub_index(1.7) == 1);
  CHECK(sol.sub_index(2.0) == 1);
  CHECK(sol.sub_index(2.5) == 1);
}

TEST_CASE("single-subdomain training degenerates to the global solver") {
  auto p = unit_delay(0.9);  // horizon shorter than the delay: one subdomain
  Architecture arch = tiny_arch(2);
  TrainConfig cfg;
  cfg.n_f = 24;
  cfg.n_i = 10;
  cfg.max_iter = 15;
  cfg.seed = 6;

  auto sol = dann::train_piecewise(p, arch, cfg);
  auto ref = dann::train(p, arch, cfg);
  REQUIRE(sol.subs() == 1);
  CHECK(sol.thetas[0] == ref.theta);
  CHECK(sol.runs[0].final_loss == ref.final_loss);
}

TEST_CASE("cascade trains one network per subdomain and stays evaluable") {
  auto p = unit_delay(2.0);
  Architecture arch = tiny_arch(2);
  TrainConfig cfg;
  cfg.n_f = 24;
  cfg.n_i = 10;
  cfg.max_iter = 15;
  cfg.seed = 4;

  auto sol = dann::train_piecewise(p, arch, cfg);
  REQUIRE(sol.subs() == 2);
  REQUIRE(sol.thetas.size() == 2);
  REQUIRE(sol.runs.size() == 2);
  CHECK(sol.thetas[0] != sol.thetas[1]);

  // Evaluable across the whole horizon, including past the last breakpoint.
  const double x[1] = {1.3};
  for (double t : {0.1, 0.99, 1.0, 1.5, 2.0}) {
    const double v = sol.value(t, x);
    CHECK(std::isfinite(v));
  }

  // Values on the left subdomain come from the first network only: they
  // agree with a direct evaluation of that subnetwork.
  dann::AnsatzEval ev0{&p, &sol.arch, &sol.lay, sol.thetas[0]};
  CHECK(sol.value(0.4, x) == ev0.value(0.4, x));
  dann::AnsatzEval ev1{&p, &sol.arch, &sol.lay, sol.thetas[1]};
  CHECK(sol.value(1.4, x) == ev1.value(1.4, x));
}

TEST_SUITE_END();
