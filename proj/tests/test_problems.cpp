#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "dann/network.hpp"
#include "dann/problem.hpp"
#include "dann/rng.hpp"
#include "dann/sampling.hpp"
#include "doctest.h"

namespace {

using dann::AnsatzEval;
using dann::DelayKind;
using dann::DelayProblem;
using dann::Jet2d;
using dann::make_benchmark;

constexpr double kPi = std::numbers::pi;

// Random interior point of the space-time domain, away from the edges.
std::vector<double> interior_point(const DelayProblem& p, dann::Rng& rng,
                                   double t_lo, double t_hi) {
  std::vector<double> pt(1 + static_cast<std::size_t>(p.dim));
  pt[0] = rng.uniform(t_lo, t_hi);
  for (int a = 0; a < p.dim; ++a) {
    const auto [lo, hi] = p.space[static_cast<std::size_t>(a)];
    pt[1 + static_cast<std::size_t>(a)] = rng.uniform(lo + 0.05, hi - 0.05);
  }
  return pt;
}

}  // namespace

TEST_SUITE_BEGIN("problems");

TEST_CASE("known solutions satisfy the equations they come from") {
  // The exact surfaces are plugged back into the strong form; agreement to
  // roundoff certifies forcing terms, delays, and histories together.
  dann::Rng rng(2024);

  auto p1 = make_benchmark("ex1");
  for (int i = 0; i < 100; ++i) {
    auto pt = interior_point(p1, rng, p1.t0 + 1e-3, p1.T);
    const double r = dann::exact_residual(p1, pt[0], {pt.data() + 1, 1});
    CHECK(std::abs(r) < 1e-8);
  }

  auto p2 = make_benchmark("ex2");
  for (double t_lo : {0.001, 1.001}) {
    for (int i = 0; i < 50; ++i) {
      auto pt = interior_point(p2, rng, t_lo, t_lo + 0.997);
      const double r = dann::exact_residual(p2, pt[0], {pt.data() + 1, 1});
      CAPTURE(pt[0]);
      CHECK(std::abs(r) < 1e-8);
    }
  }

  auto p3 = make_benchmark("ex3");
  for (double t_lo : {1.001, 2.001}) {
    for (int i = 0; i < 50; ++i) {
      const double t = rng.uniform(t_lo, t_lo + 0.997);
      const double r = dann::exact_residual(p3, t, {});
      CAPTURE(t);
      CHECK(std::abs(r) < 1e-8);
    }
  }

  for (int d : {1, 2, 3}) {
    auto p4 = make_benchmark("ex4", d);
    for (int i = 0; i < 40; ++i) {
      auto pt = interior_point(p4, rng, p4.t0 + 1e-3, p4.T);
      const double r = dann::exact_residual(p4, pt[0], {pt.data() + 1, static_cast<std::size_t>(d)});
      CHECK(std::abs(r) < 1e-8);
    }
  }
}

TEST_CASE("histories join the exact solutions continuously") {
  const double eps = 1e-9;
  auto p2 = make_benchmark("ex2");
  const double x[1] = {1.1};
  // history g(t,x) = t sin x meets the first polynomial piece at t = 0.
  CHECK(p2.g_d(0.0, x) == doctest::Approx(p2.exact_d(eps, x)).epsilon(1e-6));
  // piece-to-piece joins at the delay-induced breakpoints
  CHECK(p2.exact_d(1.0 - eps, x) == doctest::Approx(p2.exact_d(1.0 + eps, x)).epsilon(1e-6));

  auto p3 = make_benchmark("ex3");
  CHECK(p3.exact_d(1.0, {}) == doctest::Approx(1.0));
  CHECK(p3.exact_d(2.0 - eps, {}) == doctest::Approx(p3.exact_d(2.0 + eps, {})).epsilon(1e-6));
  CHECK(p3.exact_d(2.0, {}) == doctest::Approx(std::sqrt(2.0)));

  auto p4 = make_benchmark("ex4", 2);
  const double x2[2] = {1.3, 0.7};
  CHECK(p4.g_d(0.0, x2) == doctest::Approx(p4.exact_d(eps, x2)).epsilon(1e-6));
  CHECK(p4.exact_d(1.0 - eps, x2) == doctest::Approx(p4.exact_d(1.0 + eps, x2)).epsilon(1e-6));
}

TEST_CASE("delay maps are mutually consistent") {
  auto p1 = make_benchmark("ex1");
  CHECK(p1.kind == DelayKind::Constant);
  CHECK(p1.tau0 == 1.0);
  CHECK(p1.tau_max == 1.0);
  CHECK(p1.lag_map(1.7) == doctest::Approx(0.7));
  CHECK(p1.lag_map(1.7) == doctest::Approx(1.7 - p1.tau_d(1.7, 0.0)));

  auto p2 = make_benchmark("ex2");
  CHECK(p2.kind == DelayKind::TimeDependent);
  CHECK(p2.lag_map(1.5) == doctest::Approx(0.125));
  CHECK(p2.lag_map(0.25) == doctest::Approx(-0.421875));
  CHECK(p2.tau_max == doctest::Approx(1.0 + 2.0 / (3.0 * std::sqrt(3.0))));
  for (double t : {0.1, 0.8, 1.4, 1.95}) {
    CHECK(p2.lag_map(t) == doctest::Approx(t - p2.tau_d(t, 0.0)));
    CHECK(p2.tau_d(t, 0.0) <= p2.tau_max + 1e-15);
    CHECK(p2.lag_map(t) < t);  // delays stay positive
  }

  auto p3 = make_benchmark("ex3");
  CHECK(p3.kind == DelayKind::StateDependent);
  CHECK(p3.dim == 0);
  // tau(t, u) = t - (u + 1 - sqrt(2)); at t = 1, u = g = 1 it equals sqrt(2)-1.
  CHECK(p3.tau_d(1.0, 1.0) == doctest::Approx(std::sqrt(2.0) - 1.0));
  CHECK(p3.tau0 == doctest::Approx(std::sqrt(2.0) - 1.0));
}

TEST_CASE("recorded and plain right-hand sides agree bitwise") {
  // Both variants are written with the same operation order and contraction
  // is disabled project-wide, so they round identically.
  auto near = [](double got, double want) { return got == want; };
  using dann::ad::Rev;
  dann::Rng rng(5);
  for (const char* name : {"ex1", "ex2", "ex4"}) {
    auto p = make_benchmark(name, name == std::string("ex4") ? 2 : 1);
    dann::ad::Tape tape;
    dann::ad::TapeScope scope(tape);
    for (int i = 0; i < 25; ++i) {
      std::vector<double> x(static_cast<std::size_t>(p.dim));
      for (auto& c : x) c = rng.uniform(0.1, 3.0);
      const double t = rng.uniform(p.t0, p.T);
      const double ulag = rng.uniform(-2.0, 2.0);
      const double u = rng.uniform(-2.0, 2.0);
      const double want = p.h_d(t, x, ulag, u);
      Rev got = p.h_r(Rev{t}, x, Rev{ulag}, Rev{u});
      CHECK(near(got.v, want));
    }
  }
  // ex3 additionally routes tau through recorded state.
  auto p3 = make_benchmark("ex3");
  dann::ad::Tape tape;
  dann::ad::TapeScope scope(tape);
  for (int i = 0; i < 25; ++i) {
    const double t = rng.uniform(1.0, 3.0);
    const double u = rng.uniform(0.5, 2.0);
    CHECK(near(p3.tau_r(Rev{t}, Rev{u}).v, p3.tau_d(t, u)));
    const double ulag = rng.uniform(0.5, 2.0);
    CHECK(near(p3.h_r(Rev{t}, {}, Rev{ulag}, Rev{u}).v, p3.h_d(t, {}, ulag, u)));
  }
}

TEST_CASE("ansatz jets match finite differences of the offset and multiplier") {
  dann::Rng rng(31);
  for (const char* name : {"ex1", "ex2", "ex3", "ex4"}) {
    auto p = make_benchmark(name, name == std::string("ex4") ? 3 : 1);
    const double h = 1e-3;
    for (int i = 0; i < 20; ++i) {
      auto pt = interior_point(p, rng, p.t0 + 0.05, p.T - 0.05);
      std::span<const double> x{pt.data() + 1, static_cast<std::size_t>(p.dim)};
      for (int axis = 0; axis <= p.dim; ++axis) {
        Jet2d tj;
        std::vector<Jet2d> xrow(static_cast<std::size_t>(p.dim));
        dann::seed_probe(pt[0], x, axis, tj, xrow);
        Jet2d bj = p.b_j(tj, xrow);
        Jet2d Bj = p.B_j(tj, xrow);

        auto shift = [&](double d) {
          auto q = pt;
          q[static_cast<std::size_t>(axis)] += d;
          return q;
        };
        auto bval = [&](double d) {
          auto q = shift(d);
          return p.b_d(q[0], {q.data() + 1, static_cast<std::size_t>(p.dim)});
        };
        auto Bval = [&](double d) {
          auto q = shift(d);
          return p.B_d(q[0], {q.data() + 1, static_cast<std::size_t>(p.dim)});
        };
        CHECK(bj.v == bval(0.0));
        CHECK(Bj.v == Bval(0.0));
        const double fdb = (-bval(2 * h) + 8 * bval(h) - 8 * bval(-h) + bval(-2 * h)) / (12 * h);
        const double fdB = (-Bval(2 * h) + 8 * Bval(h) - 8 * Bval(-h) + Bval(-2 * h)) / (12 * h);
        CHECK(bj.d1 == doctest::Approx(fdb).epsilon(1e-6));
        CHECK(Bj.d1 == doctest::Approx(fdB).epsilon(1e-6));
        const double fdB2 = (-Bval(2 * h) + 16 * Bval(h) - 30 * Bval(0.0) + 16 * Bval(-h) -
                             Bval(-2 * h)) / (12 * h * h);
        CHECK(Bj.d2 == doctest::Approx(fdB2).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("constraint multiplier vanishes on the spatial boundary") {
  dann::Rng rng(77);
  for (const char* name : {"ex1", "ex2"}) {
    auto p = make_benchmark(name);
    for (int i = 0; i < 20; ++i) {
      const double t = rng.uniform(p.t0, p.T);
      for (double xb : {p.space[0].first, p.space[0].second}) {
        const double x[1] = {xb};
        CHECK(p.B_d(t, x) == 0.0);
      }
    }
  }
  auto p4 = make_benchmark("ex4", 3);
  for (int i = 0; i < 20; ++i) {
    double x[3];
    for (auto& c : x) c = rng.uniform(0.0, kPi);
    const int pin = static_cast<int>(rng.below(3));
    x[pin] = (i % 2 == 0) ? 0.0 : kPi;
    const double t = rng.uniform(0.0, 2.0);
    CHECK(std::abs(p4.B_d(t, x)) < 1e-15);
  }
}

TEST_CASE("constrained ansatz honors boundary and initial data for any network") {
  dann::Rng rng(8);
  auto arch = dann::Architecture{};
  arch.model = dann::Model::DANN;
  arch.widths = {6, 6};
  arch.sigma1 = dann::Act::Tanh;
  arch.sigma2 = dann::Act::Tanh;

  for (const char* name : {"ex1", "ex2", "ex4"}) {
    auto p = make_benchmark(name, name == std::string("ex4") ? 2 : 1);
    arch.input_dim = 1 + p.dim;
    auto lay = dann::make_layout(arch);
    auto theta = dann::xavier_init(arch, lay, 1234);
    AnsatzEval ev{&p, &arch, &lay, theta};

    for (int i = 0; i < 200; ++i) {
      // boundary in space
      std::vector<double> x(static_cast<std::size_t>(p.dim));
      for (int a = 0; a < p.dim; ++a)
        x[static_cast<std::size_t>(a)] =
            rng.uniform(p.space[static_cast<std::size_t>(a)].first,
                        p.space[static_cast<std::size_t>(a)].second);
      const int pin = static_cast<int>(rng.below(static_cast<std::uint64_t>(p.dim)));
      x[static_cast<std::size_t>(pin)] = (i % 2 == 0)
          ? p.space[static_cast<std::size_t>(pin)].first
          : p.space[static_cast<std::size_t>(pin)].second;
      const double t = rng.uniform(p.t0, p.T);
      const double b = p.b_d(t, x);
      CHECK(std::abs(ev.value(t, x) - b) <= 1e-10 * (1.0 + std::abs(b)));
    }
  }

  // pure delay ODE: the offset pins the value at the initial time
  auto p3 = make_benchmark("ex3");
  arch.input_dim = 1;
  auto lay = dann::make_layout(arch);
  auto theta = dann::xavier_init(arch, lay, 99);
  AnsatzEval ev{&p3, &arch, &lay, theta};
  CHECK(std::abs(ev.value(1.0, {}) - 1.0) <= 1e-10);
}

TEST_CASE("ansatz self-residual vanishes when the network nails the solution") {
  // For ex3 the exact solution is sqrt(t) = 1 + (t-1) N(t) with
  // N(t) = (sqrt(t)-1)/(t-1); checking the self-routed residual against a
  // synthetic perfect network would require fitting, so instead verify that
  // the residual of the exact surface through the generic evaluator is tiny
  // (this exercises the same probe plumbing the trainer uses).
  auto p3 = make_benchmark("ex3");
  for (double t : {1.2, 1.7, 2.4, 2.9}) {
    CHECK(std::abs(dann::exact_residual(p3, t, {})) < 1e-9);
  }
}

TEST_CASE("unknown benchmark names are rejected") {
  CHECK_THROWS_AS(make_benchmark("ex9"), std::invalid_argument);
  CHECK_THROWS_AS(make_benchmark("ex4", 0), std::invalid_argument);
}

TEST_SUITE_END();
