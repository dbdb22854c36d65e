#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dann/jet.hpp"
#include "dann/network.hpp"
#include "dann/sampling.hpp"
#include "dann/tape.hpp"

namespace dann {

enum class DelayKind : std::uint8_t { Constant, TimeDependent, StateDependent };

const char* to_string(DelayKind k);

// One delay PDE benchmark:
//   u_t = alpha lap(u) + h(t, x, u_lag, u)   on (t0, T] x Omega,
//   u_lag = u(t - tau, x),  u = g for t <= t0,
// solved with the hard-constraint ansatz  u_hat = b(t,x) + B(t,x) N(t,x),
// where B vanishes wherever the constraint must hold exactly (the spatial
// boundary, and for the pure-delay ODE the initial time).
//
// h consumes values only; the delayed evaluation contributes no jet content
// of its own, so lag values are plain scalars on every differentiation path.
struct DelayProblem {
  std::string name;
  int dim = 1;        // spatial dimension; 0 for a pure delay ODE
  double t0 = 0.0, T = 1.0;
  double alpha = 1.0; // diffusion coefficient in front of the Laplacian
  double tau0 = 1.0;  // delay at t0; the history strip is [t0 - tau0, t0]
  double tau_max = 1.0;  // upper bound of tau over [t0, T]
  DelayKind kind = DelayKind::Constant;
  std::vector<std::pair<double, double>> space;  // Omega bounds, size dim

  using Fd = std::function<double(double, std::span<const double>)>;
  using Fr = std::function<ad::Rev(ad::Rev, std::span<const double>)>;
  using Hd = std::function<double(double, std::span<const double>, double, double)>;
  using Hr = std::function<ad::Rev(ad::Rev, std::span<const double>, ad::Rev, ad::Rev)>;
  using Fj = std::function<Jet2d(const Jet2d&, std::span<const Jet2d>)>;

  Hd h_d;  // h(t, x, u_lag, u) over plain values
  Hr h_r;  // h over recorded variables; x stays a plain coordinate row

  Fd g_d;   // history surface g(t, x), t <= t0
  Fr g_r;   // same, for a recorded lag time (state-dependent delays)

  Fd b_d;   // ansatz offset
  Fj b_j;
  Fr b_r;
  Fd B_d;   // constraint multiplier
  Fj B_j;
  Fr B_r;

  std::function<double(double, double)> tau_d;        // tau(t, u)
  std::function<ad::Rev(ad::Rev, ad::Rev)> tau_r;
  std::function<double(double)> lag_map;              // t -> t - tau(t); not
                                                      // defined for the
                                                      // state-dependent kind

  bool has_exact = false;
  Fd exact_d;
  Fj exact_j;

  Box domain() const {
    Box b;
    b.axes.emplace_back(t0, T);
    for (const auto& s : space) b.axes.push_back(s);
    return b;
  }
  Box history_strip() const {
    Box b;
    b.axes.emplace_back(t0 - tau0, t0);
    for (const auto& s : space) b.axes.push_back(s);
    return b;
  }
};

// Supported names: ex1, ex2, ex3, ex4. dim is honored by ex4 only; ex1/ex2
// are one-dimensional and ex3 is a pure delay ODE.
DelayProblem make_benchmark(const std::string& name, int dim = 1);

// Jet seeds for the directional probe along `axis` (0 = time) at (t, x).
void seed_probe(double t, std::span<const double> x, int axis, Jet2d& tj,
                std::vector<Jet2d>& xj);

// PDE residual of an arbitrary field given by per-axis jet probes and a plain
// value evaluator for the delayed argument.
double field_residual(
    const DelayProblem& p, double t, std::span<const double> x,
    const std::function<Jet2d(double, std::span<const double>, int)>& probe,
    const std::function<double(double, std::span<const double>)>& value_at);

// Residual of the problem's exact solution; ~0 everywhere it is smooth.
double exact_residual(const DelayProblem& p, double t, std::span<const double> x);

// Reference evaluator for the constrained ansatz over a plain parameter
// vector. This is the slow, allocation-friendly path used by metrics, tests
// and frozen-network lag lookups; training records the same arithmetic on the
// tape instead.
struct AnsatzEval {
  const DelayProblem* prob = nullptr;
  const Architecture* arch = nullptr;
  const Layout* lay = nullptr;
  std::span<const double> theta;

  double value(double t, std::span<const double> x) const;
  Jet2d probe(double t, std::span<const double> x, int axis) const;

  // Residual with the delayed value routed through `lag` (already composed
  // with the history surface where applicable).
  double residual(double t, std::span<const double> x,
                  const std::function<double(double, std::span<const double>)>& lag) const;

  // Residual with self-routing: lag values come from this same ansatz when
  // the lag time is past t0 and from the history surface otherwise.
  double residual_self(double t, std::span<const double> x) const;
};

}  // namespace dann
