#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "maddm/linalg.hpp"

namespace maddm {

struct NewtonConfig {
  double tol = 1e-8;         // stop when ||F||_2 drops below this
  int max_iter = 200;
  double armijo = 1e-4;      // sufficient-decrease constant
  double lambda_min = 1e-8;  // smallest backtracking step
  KrylovConfig krylov;
  std::ostream* log = nullptr;  // per-iteration lines when set
};

struct NewtonReport {
  int iterations = 0;
  double final_residual = 0.0;
  std::vector<double> residual_history;  // length iterations + 1
  bool converged = false;
  long krylov_total = 0;
  int linesearch_fallbacks = 0;  // full steps taken after backtracking stalled
};

using ResidualFn = std::function<std::vector<double>(std::span<const double>)>;
using JacobianFn = std::function<SparseMatrix(std::span<const double>)>;

struct NewtonResult {
  std::vector<double> u;
  NewtonReport report;
};

/// Damped Newton with backtracking line search. Each step solves
/// J y = -F by restarted GMRES and halves lambda from 1 until
/// ||F(u + lambda y)|| <= (1 - armijo * lambda) ||F(u)||; if lambda falls
/// below lambda_min the full step is taken and counted as a fallback.
/// Deterministic: identical inputs give identical iterate sequences.
NewtonResult newton_solve(const ResidualFn& residual_fn, const JacobianFn& jacobian_fn,
                          std::vector<double> u0, const NewtonConfig& cfg);

}  // namespace maddm
