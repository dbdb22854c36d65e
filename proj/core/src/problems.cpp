#include "dann/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace dann {

using ad::Jet2d;
using ad::Rev;

const char* to_string(DelayKind k) {
  switch (k) {
    case DelayKind::Constant: return "constant";
    case DelayKind::TimeDependent: return "time_dependent";
    case DelayKind::StateDependent: return "state_dependent";
  }
  return "?";
}

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// ---- benchmark 1: constant delay reaction-diffusion on [0,2] x [0,pi] ----
//   u_t = u_xx - 2u + u_lag / (1 + u_lag^2) + f(t,x),  tau = 1,
//   u = e^{-t} sin x  exactly, f chosen to match.

template <class S>
S ex1_f(const S& t, double sinx) {
  using std::exp;
  using ad::exp;
  const S emt = exp(-t);
  const S e2 = exp(2.0 * (1.0 - t));
  return 2.0 * emt * sinx - exp(1.0 - t) * sinx / (1.0 + e2 * (sinx * sinx));
}

template <class S>
S ex1_h(const S& t, double sinx, const S& ulag, const S& u) {
  return -2.0 * u + ulag / (1.0 + ulag * ulag) + ex1_f(t, sinx);
}

DelayProblem make_ex1() {
  DelayProblem p;
  p.name = "ex1";
  p.dim = 1;
  p.t0 = 0.0;
  p.T = 2.0;
  p.alpha = 1.0;
  p.tau0 = 1.0;
  p.tau_max = 1.0;
  p.kind = DelayKind::Constant;
  p.space = {{0.0, kPi}};
  p.h_d = [](double t, std::span<const double> x, double ulag, double u) {
    return ex1_h(t, std::sin(x[0]), ulag, u);
  };
  p.h_r = [](Rev t, std::span<const double> x, Rev ulag, Rev u) {
    return ex1_h(t, std::sin(x[0]), ulag, u);
  };
  p.g_d = [](double t, std::span<const double> x) { return std::exp(-t) * std::sin(x[0]); };
  p.g_r = [](Rev t, std::span<const double> x) { return ad::exp(-t) * std::sin(x[0]); };
  p.b_d = [](double, std::span<const double>) { return 0.0; };
  p.b_j = [](const Jet2d&, std::span<const Jet2d>) { return Jet2d{}; };
  p.b_r = [](Rev, std::span<const double>) { return Rev{0.0}; };
  p.B_d = [](double, std::span<const double> x) { return x[0] * (x[0] - kPi); };
  p.B_j = [](const Jet2d&, std::span<const Jet2d> x) { return x[0] * (x[0] - kPi); };
  p.B_r = [](Rev, std::span<const double> x) { return Rev{x[0] * (x[0] - kPi)}; };
  p.tau_d = [](double, double) { return 1.0; };
  p.tau_r = [](Rev, Rev) { return Rev{1.0}; };
  p.lag_map = [](double t) { return t - 1.0; };
  p.has_exact = true;
  p.exact_d = [](double t, std::span<const double> x) { return std::exp(-t) * std::sin(x[0]); };
  p.exact_j = [](const Jet2d& t, std::span<const Jet2d> x) {
    return ad::exp(-t) * ad::sin(x[0]);
  };
  return p;
}

// ---- benchmark 2: vanishing time-dependent delay on [0,2] x [0,pi] ----
//   u_t = u_xx + u + u(s(t), x),  s(t) = (t-1)^3,
//   history  g = t sin x  on [-1,0]; exact solution known piecewise.

template <class S>
S ex2_phi1(const S& t) {
  // t^4/4 - t^3 + 3 t^2/2 - t on [0,1]
  using ad::pow_int;
  return pow_int(t, 4) / 4.0 - pow_int(t, 3) + 1.5 * pow_int(t, 2) - t;
}

template <class S>
S ex2_phi2(const S& t) {
  // (t-1)^13/52 - (t-1)^10/10 + 3 (t-1)^7/14 - (t-1)^4/4 - 1/4 on [1,2]
  using ad::pow_int;
  const S r = t - 1.0;
  return pow_int(r, 13) / 52.0 - pow_int(r, 10) / 10.0 + (3.0 / 14.0) * pow_int(r, 7) -
         pow_int(r, 4) / 4.0 - 0.25;
}

DelayProblem make_ex2() {
  DelayProblem p;
  p.name = "ex2";
  p.dim = 1;
  p.t0 = 0.0;
  p.T = 2.0;
  p.alpha = 1.0;
  p.tau0 = 1.0;  // s(0) = -1
  // tau(t) = t - (t-1)^3 peaks at t = 1 + 1/sqrt(3) on [0,2].
  p.tau_max = 1.0 + 2.0 / (3.0 * std::sqrt(3.0));
  p.kind = DelayKind::TimeDependent;
  p.space = {{0.0, kPi}};
  p.h_d = [](double, std::span<const double>, double ulag, double u) { return u + ulag; };
  p.h_r = [](Rev, std::span<const double>, Rev ulag, Rev u) { return u + ulag; };
  p.g_d = [](double t, std::span<const double> x) { return t * std::sin(x[0]); };
  p.g_r = [](Rev t, std::span<const double> x) { return t * std::sin(x[0]); };
  p.b_d = [](double, std::span<const double>) { return 0.0; };
  p.b_j = [](const Jet2d&, std::span<const Jet2d>) { return Jet2d{}; };
  p.b_r = [](Rev, std::span<const double>) { return Rev{0.0}; };
  p.B_d = [](double, std::span<const double> x) { return x[0] * (x[0] - kPi); };
  p.B_j = [](const Jet2d&, std::span<const Jet2d> x) { return x[0] * (x[0] - kPi); };
  p.B_r = [](Rev, std::span<const double> x) { return Rev{x[0] * (x[0] - kPi)}; };
  p.tau_d = [](double t, double) {
    const double r = t - 1.0;
    return t - r * r * r;
  };
  p.tau_r = [](Rev t, Rev) { return t - ad::pow_int(t - 1.0, 3); };
  p.lag_map = [](double t) {
    const double r = t - 1.0;
    return r * r * r;
  };
  p.has_exact = true;
  p.exact_d = [](double t, std::span<const double> x) {
    const double phi = t <= 0.0 ? t : (t <= 1.0 ? ex2_phi1(t) : ex2_phi2(t));
    return phi * std::sin(x[0]);
  };
  p.exact_j = [](const Jet2d& t, std::span<const Jet2d> x) {
    const Jet2d phi = t.v <= 0.0 ? t : (t.v <= 1.0 ? ex2_phi1(t) : ex2_phi2(t));
    return phi * ad::sin(x[0]);
  };
  return p;
}

// ---- benchmark 3: state-dependent delay ODE on [1,3] ----
//   u'(t) = u(u(t) - sqrt2 + 1) / (2 sqrt t),  u = 1 for t <= 1,
//   exact: sqrt t on [1,2], t/4 + 1/2 + (1 - sqrt2/2) sqrt t on (2,3].

DelayProblem make_ex3() {
  const double sqrt2 = std::sqrt(2.0);
  DelayProblem p;
  p.name = "ex3";
  p.dim = 0;
  p.t0 = 1.0;
  p.T = 3.0;
  p.alpha = 0.0;
  p.tau0 = sqrt2 - 1.0;  // t0 - s(t0) with s = u(t0) + 1 - sqrt2
  p.tau_max = 2.0;       // informational; no breakpoint cascade for this kind
  p.kind = DelayKind::StateDependent;
  p.h_d = [](double t, std::span<const double>, double ulag, double) {
    return ulag / (2.0 * std::sqrt(t));
  };
  p.h_r = [](Rev t, std::span<const double>, Rev ulag, Rev) {
    return ulag / (2.0 * ad::sqrt(t));
  };
  p.g_d = [](double, std::span<const double>) { return 1.0; };
  p.g_r = [](Rev, std::span<const double>) { return Rev{1.0}; };
  p.b_d = [](double, std::span<const double>) { return 1.0; };
  p.b_j = [](const Jet2d&, std::span<const Jet2d>) { return ad::jet_const(1.0); };
  p.b_r = [](Rev, std::span<const double>) { return Rev{1.0}; };
  p.B_d = [](double t, std::span<const double>) { return t - 1.0; };
  p.B_j = [](const Jet2d& t, std::span<const Jet2d>) { return t - 1.0; };
  p.B_r = [](Rev t, std::span<const double>) { return t - 1.0; };
  const double shift = 1.0 - sqrt2;
  p.tau_d = [shift](double t, double u) { return t - (u + shift); };
  p.tau_r = [shift](Rev t, Rev u) { return t - (u + shift); };
  p.has_exact = true;
  p.exact_d = [sqrt2](double t, std::span<const double>) {
    if (t <= 1.0) return 1.0;
    if (t <= 2.0) return std::sqrt(t);
    return 0.25 * t + 0.5 + (1.0 - sqrt2 / 2.0) * std::sqrt(t);
  };
  p.exact_j = [sqrt2](const Jet2d& t, std::span<const Jet2d>) {
    if (t.v <= 1.0) return ad::jet_const(1.0);
    if (t.v <= 2.0) return ad::sqrt(t);
    return 0.25 * t + (0.5 + (1.0 - sqrt2 / 2.0) * ad::sqrt(t));
  };
  return p;
}

// ---- benchmark 4: constant delay reaction-diffusion on [0,2] x [0,pi]^d ----
//   u_t = lap(u) + d u - u(t-1, x),
//   exact  u = phi(t) prod_i sin(x_i)  with phi piecewise polynomial.

template <class S>
S ex4_phi_hist(const S& t) {
  using ad::pow_int;
  return 1.0 - t + pow_int(t - 1.0, 2) / 2.0;
}

template <class S>
S ex4_phi1(const S& t) {
  using ad::pow_int;
  return -1.0 / 3.0 - t + pow_int(t - 1.0, 2) / 2.0 - pow_int(t - 2.0, 3) / 6.0;
}

template <class S>
S ex4_phi2(const S& t) {
  using ad::pow_int;
  return -7.0 / 3.0 + t / 3.0 + pow_int(t - 1.0, 2) / 2.0 - pow_int(t - 2.0, 3) / 6.0 +
         pow_int(t - 3.0, 4) / 24.0;
}

DelayProblem make_ex4(int dim) {
  if (dim < 1) throw std::invalid_argument("ex4 requires dim >= 1");
  DelayProblem p;
  p.name = "ex4";
  p.dim = dim;
  p.t0 = 0.0;
  p.T = 2.0;
  p.alpha = 1.0;
  p.tau0 = 1.0;
  p.tau_max = 1.0;
  p.kind = DelayKind::Constant;
  p.space.assign(static_cast<std::size_t>(dim), {0.0, kPi});
  const double dd = static_cast<double>(dim);
  p.h_d = [dd](double, std::span<const double>, double ulag, double u) {
    return dd * u - ulag;
  };
  p.h_r = [dd](Rev, std::span<const double>, Rev ulag, Rev u) { return dd * u - ulag; };
  auto q_d = [](std::span<const double> x) {
    double q = 1.0;
    for (double xi : x) q *= std::sin(xi);
    return q;
  };
  p.g_d = [q_d](double t, std::span<const double> x) { return ex4_phi_hist(t) * q_d(x); };
  p.g_r = [q_d](Rev t, std::span<const double> x) { return ex4_phi_hist(t) * q_d(x); };
  p.b_d = [](double, std::span<const double>) { return 0.0; };
  p.b_j = [](const Jet2d&, std::span<const Jet2d>) { return Jet2d{}; };
  p.b_r = [](Rev, std::span<const double>) { return Rev{0.0}; };
  p.B_d = [](double, std::span<const double> x) {
    double b = 1.0;
    for (double xi : x) b *= xi * std::sin(xi - kPi);
    return b;
  };
  p.B_j = [](const Jet2d&, std::span<const Jet2d> x) {
    Jet2d b = ad::jet_const(1.0);
    for (const Jet2d& xi : x) b = b * (xi * ad::sin(xi - kPi));
    return b;
  };
  p.B_r = [](Rev, std::span<const double> x) {
    double b = 1.0;
    for (double xi : x) b *= xi * std::sin(xi - kPi);
    return Rev{b};
  };
  p.tau_d = [](double, double) { return 1.0; };
  p.tau_r = [](Rev, Rev) { return Rev{1.0}; };
  p.lag_map = [](double t) { return t - 1.0; };
  p.has_exact = true;
  p.exact_d = [q_d](double t, std::span<const double> x) {
    const double phi = t <= 0.0 ? ex4_phi_hist(t) : (t <= 1.0 ? ex4_phi1(t) : ex4_phi2(t));
    return phi * q_d(x);
  };
  p.exact_j = [](const Jet2d& t, std::span<const Jet2d> x) {
    const Jet2d phi =
        t.v <= 0.0 ? ex4_phi_hist(t) : (t.v <= 1.0 ? ex4_phi1(t) : ex4_phi2(t));
    Jet2d q = ad::jet_const(1.0);
    for (const Jet2d& xi : x) q = q * ad::sin(xi);
    return phi * q;
  };
  return p;
}

}  // namespace

DelayProblem make_benchmark(const std::string& name, int dim) {
  if (name == "ex1") return make_ex1();
  if (name == "ex2") return make_ex2();
  if (name == "ex3") return make_ex3();
  if (name == "ex4") return make_ex4(dim);
  throw std::invalid_argument("unknown problem: " + name);
}

void seed_probe(double t, std::span<const double> x, int axis, Jet2d& tj,
                std::vector<Jet2d>& xj) {
  tj = {t, axis == 0 ? 1.0 : 0.0, 0.0};
  xj.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    xj[i] = {x[i], axis == static_cast<int>(i) + 1 ? 1.0 : 0.0, 0.0};
}

double field_residual(
    const DelayProblem& p, double t, std::span<const double> x,
    const std::function<Jet2d(double, std::span<const double>, int)>& probe,
    const std::function<double(double, std::span<const double>)>& value_at) {
  const Jet2d jt = probe(t, x, 0);
  const double u = jt.v;
  const double ut = jt.d1;
  double lap = 0.0;
  if (p.alpha != 0.0)
    for (int a = 1; a <= p.dim; ++a) lap += probe(t, x, a).d2;
  const double s = t - p.tau_d(t, u);
  const double ulag = s <= p.t0 ? p.g_d(s, x) : value_at(s, x);
  return ut - p.alpha * lap - p.h_d(t, x, ulag, u);
}

double exact_residual(const DelayProblem& p, double t, std::span<const double> x) {
  std::vector<Jet2d> xj;
  Jet2d tj;
  auto probe = [&](double tt, std::span<const double> xx, int axis) {
    seed_probe(tt, xx, axis, tj, xj);
    return p.exact_j(tj, xj);
  };
  auto value = [&](double tt, std::span<const double> xx) { return p.exact_d(tt, xx); };
  return field_residual(p, t, x, probe, value);
}

double AnsatzEval::value(double t, std::span<const double> x) const {
  NetScratch<double> ws;
  std::vector<double> in;
  in.reserve(x.size() + 1);
  in.push_back(t);
  in.insert(in.end(), x.begin(), x.end());
  const double n = net_forward<double, double>(*arch, *lay, theta, in, ws);
  return prob->b_d(t, x) + prob->B_d(t, x) * n;
}

Jet2d AnsatzEval::probe(double t, std::span<const double> x, int axis) const {
  NetScratch<Jet2d> ws;
  Jet2d tj;
  std::vector<Jet2d> xj;
  seed_probe(t, x, axis, tj, xj);
  std::vector<Jet2d> in;
  in.reserve(xj.size() + 1);
  in.push_back(tj);
  in.insert(in.end(), xj.begin(), xj.end());
  const Jet2d n = net_forward<Jet2d, double>(*arch, *lay, theta, in, ws);
  return prob->b_j(tj, xj) + prob->B_j(tj, xj) * n;
}

double AnsatzEval::residual(
    double t, std::span<const double> x,
    const std::function<double(double, std::span<const double>)>& lag) const {
  auto pr = [this](double tt, std::span<const double> xx, int axis) {
    return probe(tt, xx, axis);
  };
  return field_residual(*prob, t, x, pr, lag);
}

double AnsatzEval::residual_self(double t, std::span<const double> x) const {
  auto lag = [this](double s, std::span<const double> xx) { return value(s, xx); };
  return residual(t, x, lag);
}

}  // namespace dann
