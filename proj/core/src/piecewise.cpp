#include "dann/piecewise.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "dann/rng.hpp"

namespace dann {

std::vector<double> compute_breakpoints(const DelayProblem& p) {
  if (p.kind == DelayKind::StateDependent)
    throw std::invalid_argument(
        "state-dependent delays admit no precomputed breakpoint cascade");
  if (!p.lag_map) throw std::invalid_argument("problem has no lag map");

  const double span = p.T - p.t0;
  const double eps_end = 1e-9 * std::max(1.0, span);
  std::vector<double> xi{p.t0};
  while (xi.back() < p.T - eps_end) {
    const double prev = xi.back();
    auto phi = [&](double t) { return p.lag_map(t) - prev; };

    // The root satisfies xi = prev + tau(xi) <= prev + tau_max; grow the
    // bracket a few times in case tau_max is understated.
    double lo = prev;
    double hi = prev + p.tau_max;
    int grow = 0;
    while (phi(hi) < 0.0) {
      if (++grow > 3)
        throw std::runtime_error("breakpoint_not_bracketed: lag map never "
                                 "returns to " + std::to_string(prev));
      hi = prev + (p.tau_max * static_cast<double>(1 << grow));
    }

    double root = hi;
    if (phi(hi) > 0.0) {
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double f = phi(mid);
        if (f == 0.0) {
          lo = hi = mid;  // exact hit; keep integer-valued cascades exact
          break;
        }
        (f < 0.0 ? lo : hi) = mid;
      }
      // The left end keeps lag_map(root) <= prev, so delays from the next
      // subinterval never reach past its own left edge.
      root = lo;
    }

    if (root <= prev)
      throw std::runtime_error("breakpoint_not_bracketed: cascade stalled");
    xi.push_back(std::min(root, p.T));
    if (xi.size() > 100000)
      throw std::runtime_error("breakpoint cascade did not reach T");
  }
  xi.back() = p.T;  // clip the final subinterval
  return xi;
}

int PiecewiseSolution::sub_index(double t) const {
  assert(!thetas.empty());
  const int last = static_cast<int>(thetas.size()) - 1;
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  const int k = static_cast<int>(it - breakpoints.begin()) - 1;
  return std::clamp(k, 0, last);
}

double PiecewiseSolution::value(double t, std::span<const double> x) const {
  const int k = sub_index(t);
  AnsatzEval ev{prob, &arch, &lay, thetas[static_cast<std::size_t>(k)]};
  return ev.value(t, x);
}

PiecewiseSolution train_piecewise(const DelayProblem& p,
                                  const Architecture& arch,
                                  const TrainConfig& cfg) {
  PiecewiseSolution sol;
  sol.prob = &p;
  sol.arch = arch;
  sol.lay = make_layout(arch);
  sol.breakpoints = compute_breakpoints(p);
  const int subs = static_cast<int>(sol.breakpoints.size()) - 1;

  if (subs == 1) {
    // Degenerate cascade: identical to the global run, seeds included.
    TrainRun r = train(p, arch, cfg);
    sol.thetas.push_back(r.theta);
    sol.runs.push_back(std::move(r));
    return sol;
  }

  for (int k = 0; k < subs; ++k) {
    const double a = sol.breakpoints[static_cast<std::size_t>(k)];
    const double b = sol.breakpoints[static_cast<std::size_t>(k) + 1];

    TrainConfig ck = cfg;
    ck.seed = mix_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(k));

    Box dom = p.domain();
    dom.axes[0] = {a, b};
    PointSet interior = lhs_sample(dom, ck.n_f, mix_seed(ck.seed, 11));

    PointSet data;
    std::vector<double> targets;
    if (k == 0) {
      data = lhs_sample(p.history_strip(), ck.n_i, mix_seed(ck.seed, 12));
      targets.resize(static_cast<std::size_t>(data.n));
      for (int j = 0; j < data.n; ++j) {
        auto row = data.row(j);
        targets[static_cast<std::size_t>(j)] = p.g_d(row[0], row.subspan(1));
      }
    } else {
      // Anchor slice {a} x Omega keeps the cascade continuous: targets come
      // from the subnet that owns the interval ending at a.
      AnsatzEval prev{&p, &arch, &sol.lay,
                      sol.thetas[static_cast<std::size_t>(k) - 1]};
      if (p.dim == 0) {
        data.n = 1;
        data.dim = 1;
        data.coords = {a};
        targets = {prev.value(a, {})};
      } else {
        Box sp;
        sp.axes = p.space;
        PointSet sheet = lhs_sample(sp, ck.n_i, mix_seed(ck.seed, 12));
        data.n = sheet.n;
        data.dim = 1 + p.dim;
        data.coords.resize(static_cast<std::size_t>(data.n * data.dim));
        targets.resize(static_cast<std::size_t>(sheet.n));
        for (int j = 0; j < sheet.n; ++j) {
          auto xs = sheet.row(j);
          double* out = data.coords.data() +
                        static_cast<std::size_t>(j) * static_cast<std::size_t>(data.dim);
          out[0] = a;
          std::copy(xs.begin(), xs.end(), out + 1);
          targets[static_cast<std::size_t>(j)] = prev.value(a, xs);
        }
      }
    }

    // Delays from [a, b] land at or before a by construction of the cascade
    // (up to root tolerance, absorbed by the clamp below).
    LossEval::LagFn resolver = [&p, &sol, a](double s,
                                             std::span<const double> x) {
      if (s <= p.t0) return p.g_d(s, x);
      return sol.value(std::min(s, a), x);
    };

    TrainRun r = train_custom(p, arch, ck, std::move(interior),
                              std::move(data), std::move(targets), &resolver);
    sol.thetas.push_back(r.theta);
    sol.runs.push_back(std::move(r));
  }
  return sol;
}

}  // namespace dann
