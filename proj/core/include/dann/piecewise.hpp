#pragma once

#include <span>
#include <vector>

#include "dann/problem.hpp"
#include "dann/training.hpp"

namespace dann {

// Delay-cascade breakpoints t0 = xi_0 < xi_1 < ... < xi_s = T, where each
// xi_{i+1} solves xi_{i+1} - tau(xi_{i+1}) = xi_i. On the subinterval
// (xi_i, xi_{i+1}] every delayed evaluation then lands in an earlier,
// already-trained subinterval or in the history, so the subproblems can be
// solved in order with fully resolved lag values. The last subinterval is
// clipped at T. Throws for state-dependent delays (the cascade would depend
// on the unknown solution) and when a root cannot be bracketed.
std::vector<double> compute_breakpoints(const DelayProblem& p);

struct PiecewiseSolution {
  const DelayProblem* prob = nullptr;
  Architecture arch;
  Layout lay;
  std::vector<double> breakpoints;          // size subs + 1
  std::vector<std::vector<double>> thetas;  // one parameter vector per sub
  std::vector<TrainRun> runs;               // per-sub training record

  int subs() const { return static_cast<int>(thetas.size()); }

  // Subinterval lookup, right-continuous at interior breakpoints: t in
  // [xi_k, xi_{k+1}) maps to k; times at or past T map to the last sub and
  // times at or before t0 to the first.
  int sub_index(double t) const;
  double value(double t, std::span<const double> x) const;
};

// Trains one network per cascade subinterval. Subinterval k keeps the
// interior collocation budget n_f on [xi_k, xi_{k+1}] x Omega; its data sheet
// is the history strip (k = 0) or n_i points on the anchor slice
// {xi_k} x Omega with targets from the previous subnet (k > 0). Per-sub
// streams derive from the master seed via mix_seed(seed, 1000 + k). A cascade
// with a single subinterval degenerates to exactly the global training run.
PiecewiseSolution train_piecewise(const DelayProblem& p,
                                  const Architecture& arch,
                                  const TrainConfig& cfg);

}  // namespace dann
