#include "dann/optimize.hpp"

#include <cmath>
#include <cstddef>
#include <deque>

namespace dann {

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::GradTol: return "grad_tol";
    case StopReason::LossTol: return "loss_tol";
    case StopReason::MaxIter: return "max_iter";
    case StopReason::LineSearchFailed: return "line_search_failed";
  }
  return "?";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& obj, std::vector<double> x0,
                           const LbfgsOptions& opt,
                           const std::function<void(const IterInfo&)>& on_accept) {
  const std::size_t n = x0.size();
  LbfgsResult res;
  res.x = std::move(x0);

  std::vector<double> g(n), xt(n), gt(n), d(n), q(n);
  std::vector<std::vector<double>> S, Y;
  std::vector<double> rho, alpha;
  int stored = 0, head = 0;  // ring buffer of curvature pairs
  S.assign(static_cast<std::size_t>(opt.history), std::vector<double>(n));
  Y.assign(static_cast<std::size_t>(opt.history), std::vector<double>(n));
  rho.assign(static_cast<std::size_t>(opt.history), 0.0);
  alpha.assign(static_cast<std::size_t>(opt.history), 0.0);

  int evals = 0;
  auto eval = [&](std::span<const double> x, std::span<double> grad) {
    ++evals;
    return obj(x, grad);
  };

  double f = eval(res.x, g);
  double gn = norm_inf(g);
  std::deque<double> fhist{f};

  auto finish = [&](StopReason reason, bool converged) {
    res.f = f;
    res.gnorm_inf = gn;
    res.reason = reason;
    res.converged = converged;
    res.evals = evals;
    return res;
  };

  if (gn < opt.grad_tol) return finish(StopReason::GradTol, true);

  for (int k = 0; k < opt.max_iter; ++k) {
    // d = -H g via the two-loop recursion over the stored pairs.
    q.assign(g.begin(), g.end());
    for (int i = 0; i < stored; ++i) {
      const int idx = (head - 1 - i + opt.history * 2) % opt.history;
      const double a = rho[static_cast<std::size_t>(idx)] *
                       dot(S[static_cast<std::size_t>(idx)], q);
      alpha[static_cast<std::size_t>(idx)] = a;
      for (std::size_t j = 0; j < n; ++j) q[j] -= a * Y[static_cast<std::size_t>(idx)][j];
    }
    if (stored > 0) {
      const int newest = (head - 1 + opt.history) % opt.history;
      const double yy = dot(Y[static_cast<std::size_t>(newest)], Y[static_cast<std::size_t>(newest)]);
      const double gamma = 1.0 / (rho[static_cast<std::size_t>(newest)] * yy);
      for (std::size_t j = 0; j < n; ++j) q[j] *= gamma;
      for (int i = stored - 1; i >= 0; --i) {
        const int idx = (head - 1 - i + opt.history * 2) % opt.history;
        const double b = rho[static_cast<std::size_t>(idx)] *
                         dot(Y[static_cast<std::size_t>(idx)], q);
        const double a = alpha[static_cast<std::size_t>(idx)];
        for (std::size_t j = 0; j < n; ++j)
          q[j] += (a - b) * S[static_cast<std::size_t>(idx)][j];
      }
    }
    for (std::size_t j = 0; j < n; ++j) d[j] = -q[j];

    double dphi0 = dot(g, d);
    if (!(dphi0 < 0.0)) {
      // Not a descent direction (degenerate curvature); restart from steepest
      // descent with cleared memory.
      stored = 0;
      head = 0;
      for (std::size_t j = 0; j < n; ++j) d[j] = -g[j];
      dphi0 = -dot(g, g);
      if (!(dphi0 < 0.0)) return finish(StopReason::LineSearchFailed, false);
    }

    // Strong Wolfe line search: bracketing phase, then bisection zoom.
    const double f0 = f;
    double a_init = 1.0;
    if (k == 0) {
      const double g2 = std::sqrt(dot(g, g));
      if (g2 > 0.0) a_init = 1.0 / g2;
    }

    int ls_evals = 0;
    double f_best = f0, a_best = 0.0;
    std::vector<double> x_best, g_best;
    bool accepted = false;
    double a_acc = 0.0;

    auto phi = [&](double a, double& dphi_out) {
      for (std::size_t j = 0; j < n; ++j) xt[j] = res.x[j] + a * d[j];
      const double fa = eval(xt, gt);
      ++ls_evals;
      dphi_out = dot(gt, d);
      if (fa < f_best) {
        f_best = fa;
        a_best = a;
        x_best = xt;
        g_best = gt;
      }
      return fa;
    };
    auto wolfe_ok = [&](double a, double fa, double dphia) {
      return fa <= f0 + opt.c1 * a * dphi0 && std::abs(dphia) <= -opt.c2 * dphi0 && fa < f0;
    };

    double a_lo = 0.0, a_hi = 0.0, f_lo = f0;
    bool bracketed = false;

    {
      double a_prev = 0.0, f_prev = f0;
      double a = a_init;
      while (ls_evals < opt.max_line_search) {
        double dphia;
        const double fa = phi(a, dphia);
        if (fa > f0 + opt.c1 * a * dphi0 || (ls_evals > 1 && fa >= f_prev)) {
          a_lo = a_prev; f_lo = f_prev;
          a_hi = a;
          bracketed = true;
          break;
        }
        if (wolfe_ok(a, fa, dphia)) {
          accepted = true;
          a_acc = a;
          f = fa;
          break;
        }
        if (dphia >= 0.0) {
          a_lo = a; f_lo = fa;
          a_hi = a_prev;
          bracketed = true;
          break;
        }
        a_prev = a; f_prev = fa;
        a *= 2.0;
      }
    }

    if (bracketed && !accepted) {
      while (ls_evals < opt.max_line_search) {
        const double a = 0.5 * (a_lo + a_hi);
        double dphia;
        const double fa = phi(a, dphia);
        if (fa > f0 + opt.c1 * a * dphi0 || fa >= f_lo) {
          a_hi = a;
        } else {
          if (wolfe_ok(a, fa, dphia)) {
            accepted = true;
            a_acc = a;
            f = fa;
            break;
          }
          if (dphia * (a_hi - a_lo) >= 0.0) a_hi = a_lo;
          a_lo = a; f_lo = fa;
        }
        if (a_hi == a_lo) break;  // interval collapsed
      }
    }

    if (!accepted) {
      // Budget exhausted: adopt the best strictly-improving trial, if any,
      // then stop.
      if (!x_best.empty() && f_best < f0) {
        res.x = std::move(x_best);
        f = f_best;
        g = std::move(g_best);
        gn = norm_inf(g);
        res.iters = k + 1;
        if (on_accept) on_accept({k + 1, f, gn, a_best, evals});
      }
      return finish(StopReason::LineSearchFailed, false);
    }

    // Accepted: xt/gt hold the new point (the accepting evaluation was the
    // most recent one).
    const int idx = head;
    double sy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double sj = xt[j] - res.x[j];
      const double yj = gt[j] - g[j];
      S[static_cast<std::size_t>(idx)][j] = sj;
      Y[static_cast<std::size_t>(idx)][j] = yj;
      sy += sj * yj;
    }
    if (sy > opt.curvature_eps) {
      rho[static_cast<std::size_t>(idx)] = 1.0 / sy;
      head = (head + 1) % opt.history;
      if (stored < opt.history) ++stored;
    }
    res.x.swap(xt);
    g.swap(gt);
    gn = norm_inf(g);
    res.iters = k + 1;
    if (on_accept) on_accept({k + 1, f, gn, a_acc, evals});

    if (gn < opt.grad_tol) return finish(StopReason::GradTol, true);
    fhist.push_back(f);
    if (static_cast<int>(fhist.size()) > opt.loss_window + 1) fhist.pop_front();
    if (static_cast<int>(fhist.size()) == opt.loss_window + 1) {
      const double drop = std::abs(fhist.front() - f);
      if (drop <= opt.loss_tol * std::max(1.0, std::abs(f)))
        return finish(StopReason::LossTol, true);
    }
  }
  return finish(StopReason::MaxIter, false);
}

}  // namespace dann
