#include "dann/training.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <utility>

#include "dann/rng.hpp"

namespace dann {

using ad::Rev;

LossEval::LossEval(const DelayProblem& p, const Architecture& arch,
                   const Layout& lay, PointSet interior, PointSet data,
                   std::vector<double> data_targets, const LagFn* external_lag,
                   bool lag_frozen)
    : prob_(&p),
      arch_(&arch),
      lay_(&lay),
      interior_(std::move(interior)),
      data_(std::move(data)),
      targets_(std::move(data_targets)),
      lag_frozen_(lag_frozen),
      need_lap_(p.alpha != 0.0 && p.dim > 0),
      net_(tape_, arch, lay, 0) {
  assert(interior_.dim == 1 + p.dim);
  assert(data_.n == 0 || data_.dim == 1 + p.dim);
  assert(static_cast<int>(targets_.size()) == data_.n);

  for (int i = 0; i < lay.total; ++i) tape_.leaf(0.0);
  mark_ = tape_.mark();
  cbuf_.assign(static_cast<std::size_t>(lay.total), 0.0);

  meta_.resize(static_cast<std::size_t>(interior_.n));
  std::vector<Jet2d> xj;
  Jet2d tj;
  for (int i = 0; i < interior_.n; ++i) {
    auto row = interior_.row(i);
    const double t = row[0];
    auto xs = row.subspan(1);
    PtMeta& m = meta_[static_cast<std::size_t>(i)];

    seed_probe(t, xs, 0, tj, xj);
    const Jet2d bt = p.b_j(tj, xj);
    const Jet2d Bt = p.B_j(tj, xj);
    m.b0 = bt.v;
    m.B0 = Bt.v;
    m.b_t = bt.d1;
    m.B_t = Bt.d1;
    if (need_lap_) {
      m.lap_Np.assign(static_cast<std::size_t>(p.dim), 0.0);
      double sb2 = 0.0, sB2 = 0.0;
      for (int a = 1; a <= p.dim; ++a) {
        seed_probe(t, xs, a, tj, xj);
        const Jet2d ba = p.b_j(tj, xj);
        const Jet2d Ba = p.B_j(tj, xj);
        sb2 += ba.d2;
        sB2 += Ba.d2;
        m.lap_Np[static_cast<std::size_t>(a - 1)] = p.alpha * (2.0 * Ba.d1);
      }
      m.lap_c = p.alpha * sb2;
      m.lap_N = p.alpha * sB2;
      m.lap_Nlap = p.alpha * m.B0;
    }

    if (p.kind == DelayKind::StateDependent) {
      assert(external_lag == nullptr &&
             "state-dependent delays cannot be resolved externally");
      m.kind = 2;
    } else {
      const double s = p.lag_map(t);
      if (s <= p.t0) {
        m.kind = 0;
        m.ulag_const = p.g_d(s, xs);
      } else if (external_lag) {
        m.kind = 0;
        m.ulag_const = (*external_lag)(s, xs);
      } else {
        m.kind = 1;
        m.s_lag = s;
        m.bs = p.b_d(s, xs);
        m.Bs = p.B_d(s, xs);
      }
    }
  }

  dmeta_.resize(static_cast<std::size_t>(data_.n));
  for (int j = 0; j < data_.n; ++j) {
    auto row = data_.row(j);
    DataMeta& dm = dmeta_[static_cast<std::size_t>(j)];
    dm.B0 = p.B_d(row[0], row.subspan(1));
    dm.b0_minus_y = p.b_d(row[0], row.subspan(1)) - targets_[static_cast<std::size_t>(j)];
  }
}

double LossEval::operator()(std::span<const double> theta,
                            std::span<double> grad) {
  const int P = lay_->total;
  assert(static_cast<int>(theta.size()) == P);
  assert(static_cast<int>(grad.size()) == P);
  for (int i = 0; i < P; ++i) tape_.set_leaf(i, theta[static_cast<std::size_t>(i)]);
  std::fill(grad.begin(), grad.end(), 0.0);
  ad::TapeScope scope(tape_);
  const DelayProblem& p = *prob_;

  // Residual term. Points are processed in fixed chunks of 64 whose partial
  // gradient and loss sums are folded in in chunk order, keeping the
  // reduction independent of any work partitioning.
  double res_total = 0.0;
  const double wf = interior_.n > 0 ? 2.0 / interior_.n : 0.0;
  double csum = 0.0;
  int in_chunk = 0;
  auto flush = [&](double& acc) {
    if (in_chunk == 0) return;
    for (int j = 0; j < P; ++j) {
      grad[static_cast<std::size_t>(j)] += cbuf_[static_cast<std::size_t>(j)];
      cbuf_[static_cast<std::size_t>(j)] = 0.0;
    }
    acc += csum;
    csum = 0.0;
    in_chunk = 0;
  };

  for (int i = 0; i < interior_.n; ++i) {
    tape_.rewind(mark_);
    auto row = interior_.row(i);
    const double t = row[0];
    auto xs = row.subspan(1);
    const PtMeta& m = meta_[static_cast<std::size_t>(i)];

    const ProbeOut po = net_.forward_probes(row, need_lap_);
    const Rev uv = Rev{m.b0} + Rev{m.B0} * po.v;
    const Rev ut = Rev{m.b_t} + Rev{m.B_t} * po.v + Rev{m.B0} * po.d1[0];

    Rev ulag{0.0};
    switch (m.kind) {
      case 0:
        ulag = Rev{m.ulag_const};
        break;
      case 1: {
        rin_.clear();
        rin_.push_back(Rev{m.s_lag});
        for (double xv : xs) rin_.push_back(Rev{xv});
        const Rev nls = net_.forward_value(rin_);
        ulag = Rev{m.bs} + Rev{m.Bs} * nls;
        break;
      }
      default: {
        const Rev s = Rev{t} - p.tau_r(Rev{t}, uv);
        if (s.v <= p.t0) {
          ulag = p.g_r(s, xs);
        } else {
          rin_.clear();
          rin_.push_back(s);
          for (double xv : xs) rin_.push_back(Rev{xv});
          const Rev nls = net_.forward_value(rin_);
          ulag = p.b_r(s, xs) + p.B_r(s, xs) * nls;
        }
        break;
      }
    }
    if (lag_frozen_) ulag = ad::detach(ulag);

    Rev r = ut;
    if (need_lap_) {
      wids_.clear();
      wcs_.clear();
      wids_.push_back(po.v.id);
      wcs_.push_back(m.lap_N);
      wids_.push_back(po.lap.id);
      wcs_.push_back(m.lap_Nlap);
      for (int a = 0; a < p.dim; ++a) {
        wids_.push_back(po.d1[static_cast<std::size_t>(1 + a)].id);
        wcs_.push_back(m.lap_Np[static_cast<std::size_t>(a)]);
      }
      const Rev lap = tape_.wsum(wids_, wcs_) + Rev{m.lap_c};
      r = r - lap;
    }
    r = r - p.h_r(Rev{t}, xs, ulag, uv);

    csum += r.v * r.v;
    if (!r.is_const()) {
      tape_.backward(r.id, bar_);
      const double w = wf * r.v;
      for (int j = 0; j < P; ++j)
        cbuf_[static_cast<std::size_t>(j)] += w * bar_[static_cast<std::size_t>(j)];
    }
    if (++in_chunk == 64) flush(res_total);
  }
  flush(res_total);
  res_total = interior_.n > 0 ? res_total / interior_.n : 0.0;

  // Data term over the target sheet.
  double ini_total = 0.0;
  const double wi = data_.n > 0 ? 2.0 / data_.n : 0.0;
  for (int j = 0; j < data_.n; ++j) {
    tape_.rewind(mark_);
    auto row = data_.row(j);
    rin_.clear();
    for (double v : row) rin_.push_back(Rev{v});
    const Rev nv = net_.forward_value(rin_);
    const DataMeta& dm = dmeta_[static_cast<std::size_t>(j)];
    const Rev e = Rev{dm.B0} * nv + Rev{dm.b0_minus_y};

    csum += e.v * e.v;
    if (!e.is_const()) {
      tape_.backward(e.id, bar_);
      const double w = wi * e.v;
      for (int k = 0; k < P; ++k)
        cbuf_[static_cast<std::size_t>(k)] += w * bar_[static_cast<std::size_t>(k)];
    }
    if (++in_chunk == 64) flush(ini_total);
  }
  flush(ini_total);
  ini_total = data_.n > 0 ? ini_total / data_.n : 0.0;

  last_res_ = res_total;
  last_ini_ = ini_total;
  last_total_ = res_total + ini_total;
  return last_total_;
}

TrainRun train_custom(const DelayProblem& p, const Architecture& arch,
                      const TrainConfig& cfg, PointSet interior, PointSet data,
                      std::vector<double> data_targets,
                      const LossEval::LagFn* external_lag) {
  const Layout lay = make_layout(arch);
  std::vector<double> th0 = xavier_init(arch, lay, cfg.seed);
  LossEval loss(p, arch, lay, std::move(interior), std::move(data),
                std::move(data_targets), external_lag, cfg.lag_frozen);

  TrainRun run;
  run.arch = arch;
  const auto start = std::chrono::steady_clock::now();
  auto wall_ms = [&start] {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start)
        .count();
  };

  bool first = true;
  Objective obj = [&](std::span<const double> x, std::span<double> g) {
    const double f = loss(x, g);
    if (first) {
      first = false;
      run.trace.push_back({0, f, loss.last_residual_term(),
                           loss.last_initial_term(), wall_ms()});
    }
    return f;
  };

  LbfgsOptions lo = cfg.lbfgs;
  lo.max_iter = cfg.max_iter;
  LbfgsResult r = lbfgs_minimize(obj, th0, lo, [&](const IterInfo& info) {
    run.trace.push_back({info.iter, info.f, loss.last_residual_term(),
                         loss.last_initial_term(), wall_ms()});
  });

  // On a line-search failure the optimizer may adopt an earlier trial point,
  // in which case the cached term decomposition belongs to a different
  // evaluation; refresh it so the final trace row is consistent.
  if (!run.trace.empty() && r.iters > 0 && loss.last_total() != r.f) {
    std::vector<double> gtmp(th0.size());
    const double f = loss(r.x, gtmp);
    run.trace.back() = TraceRow{r.iters, f, loss.last_residual_term(),
                                loss.last_initial_term(), wall_ms()};
  }

  run.theta = std::move(r.x);
  run.reason = r.reason;
  run.converged = r.converged;
  run.iters = r.iters;
  run.evals = r.evals;
  run.final_loss = r.f;
  run.wall_s = wall_ms() / 1000.0;
  return run;
}

TrainRun train(const DelayProblem& p, const Architecture& arch,
               const TrainConfig& cfg) {
  PointSet interior = lhs_sample(p.domain(), cfg.n_f, mix_seed(cfg.seed, 11));
  PointSet data = lhs_sample(p.history_strip(), cfg.n_i, mix_seed(cfg.seed, 12));
  std::vector<double> targets(static_cast<std::size_t>(data.n), 0.0);
  for (int j = 0; j < data.n; ++j) {
    auto row = data.row(j);
    targets[static_cast<std::size_t>(j)] = p.g_d(row[0], row.subspan(1));
  }
  return train_custom(p, arch, cfg, std::move(interior), std::move(data),
                      std::move(targets), nullptr);
}

}  // namespace dann
