#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dann/network.hpp"
#include "dann/optimize.hpp"
#include "dann/problem.hpp"
#include "dann/sampling.hpp"
#include "dann/tape.hpp"

namespace dann {

// Training configuration shared by the global and piecewise drivers. The
// master seed drives every stream: parameter init uses it directly (the
// initializer derives its own substreams), interior sampling uses
// mix_seed(seed, 11) and data-sheet sampling mix_seed(seed, 12).
struct TrainConfig {
  int n_f = 400;  // collocation points in the space-time interior
  int n_i = 150;  // data points on the target sheet (history strip or anchor)
  int max_iter = 20000;
  std::uint64_t seed = 1;
  LbfgsOptions lbfgs;       // max_iter is overridden from the field above
  bool lag_frozen = false;  // diagnostic: block gradients through the delayed value
};

struct TraceRow {
  int iter = 0;  // 0 is the initial point
  double total = 0.0, residual_term = 0.0, initial_term = 0.0;
  double wall_ms = 0.0;  // cumulative since training start
};

struct TrainRun {
  Architecture arch;
  std::vector<double> theta;
  std::vector<TraceRow> trace;  // initial point plus one row per accepted step
  StopReason reason = StopReason::MaxIter;
  bool converged = false;
  int iters = 0;
  int evals = 0;
  double final_loss = 0.0;
  double wall_s = 0.0;
};

// Physics loss over fixed point sets,
//   L(theta) = 1/N_f sum_i r(t_i, x_i)^2 + 1/N_I sum_j (u_hat(t_j, x_j) - y_j)^2,
// with r the PDE residual of the constrained ansatz u_hat = b + B N. Each
// evaluation rebuilds the per-point tape segment on top of the persistent
// parameter leaves (ids 0..P-1 match the flat parameter index), so
// state-dependent control flow inside the lag routing is re-resolved at the
// current iterate.
//
// Gradients and partial sums are accumulated in fixed chunks of 64 points
// combined in chunk order, so the reduction is deterministic and independent
// of how the work might be distributed.
//
// Delay routing per collocation point, fixed at construction:
//  - lag time s <= t0: the history value g(s, x) is a baked-in constant;
//  - external resolver set (piecewise subproblems): the delayed value is a
//    baked-in constant supplied by the resolver;
//  - constant/time-dependent delay, s > t0: the network re-evaluates itself
//    at the precomputed time s;
//  - state-dependent delay: s = t - tau(t, u_hat) is recorded per evaluation
//    and branches between history and self-evaluation at the current value.
class LossEval {
 public:
  using LagFn = std::function<double(double, std::span<const double>)>;

  // `data_targets` holds one target value per data point. `external_lag`, if
  // non-null, must resolve any lag time landing left of the interior's time
  // axis; it is consulted once at construction.
  LossEval(const DelayProblem& p, const Architecture& arch, const Layout& lay,
           PointSet interior, PointSet data, std::vector<double> data_targets,
           const LagFn* external_lag = nullptr, bool lag_frozen = false);

  LossEval(const LossEval&) = delete;
  LossEval& operator=(const LossEval&) = delete;

  int n_params() const { return lay_->total; }

  // Loss value; `grad` (size n_params) receives the full gradient.
  double operator()(std::span<const double> theta, std::span<double> grad);

  // Term decomposition of the most recent evaluation.
  double last_total() const { return last_total_; }
  double last_residual_term() const { return last_res_; }
  double last_initial_term() const { return last_ini_; }

  const PointSet& interior() const { return interior_; }
  const PointSet& data() const { return data_; }
  std::span<const double> data_targets() const { return targets_; }

 private:
  // Baked per-point ansatz coefficients and lag routing.
  struct PtMeta {
    double b0 = 0.0, B0 = 0.0;    // ansatz value coefficients
    double b_t = 0.0, B_t = 0.0;  // time-derivative coefficients
    // alpha-scaled Laplacian assembly: alpha lap(u_hat) =
    //   lap_c + lap_N N + sum_p lap_Np[p] N_p + lap_Nlap lap(N).
    double lap_c = 0.0, lap_N = 0.0, lap_Nlap = 0.0;
    std::vector<double> lap_Np;
    int kind = 0;             // 0 cached, 1 self at fixed time, 2 dynamic
    double ulag_const = 0.0;  // kind 0
    double s_lag = 0.0;       // kind 1
    double bs = 0.0, Bs = 0.0;
  };
  struct DataMeta {
    double B0 = 0.0;
    double b0_minus_y = 0.0;
  };

  const DelayProblem* prob_;
  const Architecture* arch_;
  const Layout* lay_;
  PointSet interior_, data_;
  std::vector<double> targets_;
  bool lag_frozen_ = false;
  bool need_lap_ = false;

  ad::Tape tape_;
  ad::Tape::Mark mark_{};
  TapeNet net_;
  std::vector<PtMeta> meta_;
  std::vector<DataMeta> dmeta_;

  double last_res_ = 0.0, last_ini_ = 0.0, last_total_ = 0.0;

  // reusable scratch
  std::vector<double> bar_, cbuf_;
  std::vector<ad::Rev> rin_;
  std::vector<std::int32_t> wids_;
  std::vector<double> wcs_;
};

// Samples the point sets, initializes parameters and runs the optimizer.
// The trace records the initial point and every accepted step.
TrainRun train(const DelayProblem& p, const Architecture& arch,
               const TrainConfig& cfg);

// Same, over caller-supplied point sets and an optional external lag
// resolver; the piecewise driver trains each subdomain through this.
TrainRun train_custom(const DelayProblem& p, const Architecture& arch,
                      const TrainConfig& cfg, PointSet interior, PointSet data,
                      std::vector<double> data_targets,
                      const LossEval::LagFn* external_lag = nullptr);

}  // namespace dann
