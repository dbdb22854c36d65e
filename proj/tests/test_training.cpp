#include <cmath>
#include <span>
#include <vector>

#include "dann/network.hpp"
#include "dann/problem.hpp"
#include "dann/rng.hpp"
#include "dann/sampling.hpp"
#include "dann/training.hpp"
#include "doctest.h"

namespace {

using dann::Act;
using dann::Architecture;
using dann::DelayProblem;
using dann::Layout;
using dann::LossEval;
using dann::Model;
using dann::PointSet;
using dann::TrainConfig;

Architecture small_arch(Model m, int input_dim) {
  Architecture a;
  a.model = m;
  a.input_dim = input_dim;
  a.widths = {4, 4};
  a.sigma1 = Act::Tanh;
  a.sigma2 = Act::Sigmoid;
  return a;
}

// Fixed small point sets so finite differences stay cheap.
PointSet interior_for(const DelayProblem& p, int n, std::uint64_t seed) {
  return dann::lhs_sample(p.domain(), n, seed);
}

PointSet data_for(const DelayProblem& p, int n, std::uint64_t seed) {
  return dann::lhs_sample(p.history_strip(), n, seed);
}

std::vector<double> targets_for(const DelayProblem& p, const PointSet& sheet) {
  std::vector<double> y(static_cast<std::size_t>(sheet.n));
  for (int i = 0; i < sheet.n; ++i) {
    auto row = sheet.row(i);
    y[static_cast<std::size_t>(i)] = p.g_d(row[0], row.subspan(1));
  }
  return y;
}

const Model kAllModels[] = {Model::PINN, Model::APINN, Model::QRES,
                            Model::ISC,  Model::QSC,   Model::DANN};

}  // namespace

TEST_SUITE_BEGIN("training");

TEST_CASE("loss gradient matches central finite differences for every model") {
  // 4 collocation points, 3 data points, all parameters checked one by one.
  for (const char* name : {"ex1", "ex2", "ex3"}) {
    auto p = dann::make_benchmark(name);
    for (Model m : kAllModels) {
      auto arch = small_arch(m, 1 + p.dim);
      Layout lay = dann::make_layout(arch);
      PointSet interior = interior_for(p, 4, 51);
      PointSet data = data_for(p, 3, 52);
      auto targets = targets_for(p, data);
      LossEval loss(p, arch, lay, interior, data, targets);

      auto theta = dann::xavier_init(arch, lay, 5);
      // For the state-dependent problem, lift the output so some lag times
      // land past t0 and the recorded self-evaluation branch is part of the
      // differentiated program.
      if (p.kind == dann::DelayKind::StateDependent)
        theta[static_cast<std::size_t>(lay.out_b)] = 6.0;
      std::vector<double> grad(theta.size(), 0.0);
      const double f0 = loss(theta, grad);
      CHECK(std::isfinite(f0));

      std::vector<double> scratch(theta.size());
      const double h = 1e-5;
      for (std::size_t i = 0; i < theta.size(); ++i) {
        auto tp = theta;
        tp[i] += h;
        const double fp = loss(tp, scratch);
        tp[i] -= 2 * h;
        const double fm = loss(tp, scratch);
        const double fd = (fp - fm) / (2 * h);
        CAPTURE(name);
        CAPTURE(static_cast<int>(m));
        CAPTURE(i);
        CHECK(std::abs(grad[i] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("loss evaluation is deterministic") {
  auto p = dann::make_benchmark("ex1");
  auto arch = small_arch(Model::DANN, 2);
  Layout lay = dann::make_layout(arch);
  PointSet interior = interior_for(p, 16, 3);
  PointSet data = data_for(p, 8, 4);
  auto targets = targets_for(p, data);

  LossEval l1(p, arch, lay, interior, data, targets);
  LossEval l2(p, arch, lay, interior, data, targets);
  auto theta = dann::xavier_init(arch, lay, 17);
  std::vector<double> g1(theta.size()), g2(theta.size());
  const double f1 = l1(theta, g1);
  const double f2 = l2(theta, g2);
  CHECK(f1 == f2);
  CHECK(g1 == g2);
  // repeated evaluation on the same object is stable too
  std::vector<double> g3(theta.size());
  const double f3 = l1(theta, g3);
  CHECK(f3 == f1);
  CHECK(g3 == g1);
}

TEST_CASE("loss decomposes into residual and data terms") {
  auto p = dann::make_benchmark("ex1");
  auto arch = small_arch(Model::QSC, 2);
  Layout lay = dann::make_layout(arch);
  PointSet interior = interior_for(p, 8, 3);
  PointSet data = data_for(p, 5, 4);
  auto targets = targets_for(p, data);
  LossEval loss(p, arch, lay, interior, data, targets);
  auto theta = dann::xavier_init(arch, lay, 29);
  std::vector<double> g(theta.size());
  const double f = loss(theta, g);
  CHECK(f == loss.last_total());
  CHECK(loss.last_total() ==
        doctest::Approx(loss.last_residual_term() + loss.last_initial_term()).epsilon(1e-15));
  CHECK(loss.last_residual_term() >= 0.0);
  CHECK(loss.last_initial_term() >= 0.0);
}

TEST_CASE("freezing the delayed value keeps the loss but changes the gradient") {
  auto p = dann::make_benchmark("ex3");
  auto arch = small_arch(Model::DANN, 1);
  Layout lay = dann::make_layout(arch);
  // Points with lag times past t0 so the network output actually feeds back.
  PointSet interior = interior_for(p, 12, 7);
  PointSet data;
  data.n = 1;
  data.dim = 1;
  data.coords = {p.t0};
  std::vector<double> targets = {p.g_d(p.t0, {})};

  LossEval live(p, arch, lay, interior, data, targets, nullptr, false);
  LossEval frozen(p, arch, lay, interior, data, targets, nullptr, true);
  auto theta = dann::xavier_init(arch, lay, 23);
  // Push the network output up so u_hat exceeds sqrt(2) on part of the
  // domain; the state-dependent lag then self-routes instead of reading the
  // history surface, which is the path freezing is supposed to cut.
  theta[static_cast<std::size_t>(lay.out_b)] = 6.0;
  std::vector<double> gl(theta.size()), gf(theta.size());
  const double fl = live(theta, gl);
  const double ff = frozen(theta, gf);
  CHECK(fl == ff);
  bool any_diff = false;
  for (std::size_t i = 0; i < gl.size(); ++i)
    if (gl[i] != gf[i]) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("external lag resolver overrides self-evaluation") {
  auto p = dann::make_benchmark("ex1");
  auto arch = small_arch(Model::PINN, 2);
  Layout lay = dann::make_layout(arch);
  // pick interior points past t0 + tau so lags would self-route
  PointSet interior;
  interior.n = 3;
  interior.dim = 2;
  interior.coords = {1.5, 1.0, 1.8, 2.0, 1.2, 0.5};
  PointSet data = data_for(p, 3, 9);
  auto targets = targets_for(p, data);

  LossEval::LagFn resolver = [](double, std::span<const double>) { return 0.25; };
  LossEval with(p, arch, lay, interior, data, targets, &resolver);
  LossEval without(p, arch, lay, interior, data, targets);
  auto theta = dann::xavier_init(arch, lay, 40);
  std::vector<double> g(theta.size());
  CHECK(with(theta, g) != without(theta, g));
}

TEST_CASE("short training run produces a decreasing accepted trace") {
  auto p = dann::make_benchmark("ex1");
  Architecture arch;
  arch.model = Model::DANN;
  arch.input_dim = 2;
  arch.widths = {6, 6};
  arch.sigma1 = Act::Softplus;
  arch.sigma2 = Act::Tanh;
  TrainConfig cfg;
  cfg.n_f = 40;
  cfg.n_i = 20;
  cfg.max_iter = 30;
  cfg.seed = 2;
  auto run = dann::train(p, arch, cfg);

  REQUIRE(!run.trace.empty());
  CHECK(run.trace.front().iter == 0);
  for (std::size_t i = 1; i < run.trace.size(); ++i) {
    CHECK(run.trace[i].total < run.trace[i - 1].total);
    CHECK(run.trace[i].iter == static_cast<int>(i));
    CHECK(run.trace[i].wall_ms >= run.trace[i - 1].wall_ms);
  }
  CHECK(run.final_loss == run.trace.back().total);
  CHECK(run.final_loss < run.trace.front().total);  // it actually learned something
  CHECK(static_cast<int>(run.theta.size()) == dann::make_layout(arch).total);

  // decomposition rows stay consistent
  for (const auto& row : run.trace)
    CHECK(row.total == doctest::Approx(row.residual_term + row.initial_term).epsilon(1e-12));

  // bitwise repeatability of the whole run
  auto run2 = dann::train(p, arch, cfg);
  CHECK(run.theta == run2.theta);
  CHECK(run.final_loss == run2.final_loss);
  CHECK(run.trace.size() == run2.trace.size());
}

TEST_SUITE_END();
