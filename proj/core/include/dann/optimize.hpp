#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace dann {

struct LbfgsOptions {
  int max_iter = 1000;
  int history = 10;             // stored curvature pairs
  double c1 = 1e-4;             // Armijo constant
  double c2 = 0.9;              // curvature constant (strong Wolfe)
  double grad_tol = 1e-9;       // sup-norm gradient threshold
  double loss_tol = 1e-12;      // loss-change threshold, relative to max(1,|f|)
  int loss_window = 10;         // consecutive iterations for loss_tol
  int max_line_search = 50;     // objective evaluations per line search
  double curvature_eps = 1e-12; // pairs with s.y at or below this are skipped
};

enum class StopReason : std::uint8_t { GradTol, LossTol, MaxIter, LineSearchFailed };
const char* to_string(StopReason r);

struct IterInfo {
  int iter = 0;     // 1-based accepted iteration index
  double f = 0.0;
  double gnorm_inf = 0.0;
  double step = 0.0;
  int evals = 0;    // cumulative objective evaluations
};

// Objective: returns f(x) and writes the gradient into grad (same length).
using Objective = std::function<double(std::span<const double>, std::span<double>)>;

struct LbfgsResult {
  std::vector<double> x;
  double f = 0.0;
  double gnorm_inf = 0.0;
  StopReason reason = StopReason::MaxIter;
  bool converged = false;  // true for GradTol and LossTol
  int iters = 0;           // accepted iterations
  int evals = 0;           // objective evaluations
};

// Limited-memory BFGS with a strong Wolfe bracketing line search
// (two-loop recursion, gamma-scaled initial Hessian). Every accepted iterate
// strictly decreases f. The first line search starts from step 1/|g|_2, later
// ones from 1. If a line search exhausts its budget the best point seen so
// far is returned with reason LineSearchFailed. Fully deterministic.
LbfgsResult lbfgs_minimize(const Objective& obj, std::vector<double> x0,
                           const LbfgsOptions& opt,
                           const std::function<void(const IterInfo&)>& on_accept = {});

}  // namespace dann
