#pragma once

#include <functional>
#include <string>

#include "maddm/grid.hpp"
#include "maddm/scheme.hpp"

namespace maddm {

using PointFn = std::function<double(Point)>;

/// A Dirichlet problem for the Monge-Ampere equation: right-hand side f,
/// boundary data g, and an optional exact solution for error reporting.
/// For the built-in examples g is the exact solution restricted to the
/// boundary.
struct ProblemSpec {
  std::string name;
  PointFn f;
  PointFn g;
  PointFn exact;  // empty when unknown

  bool has_exact() const { return static_cast<bool>(exact); }
};

/// Smooth benchmark: u = exp(|x|^2 / 2), f = (1 + |x|^2) exp(|x|^2).
ProblemSpec example1();

/// C^1 viscosity solution, not uniformly elliptic:
/// u = max(|x| - 1/5, 0)^(5/2), f = (3/8) max(5|x| - 1, 0)^2 / |x|,
/// with f(0) = 0 by continuity.
ProblemSpec example2();

/// Samples f at interior nodes and g at boundary nodes. Negative f is
/// accepted with a warning on stderr (the convex problem wants f >= 0).
ProblemData make_problem_data(const Grid& grid, const ProblemSpec& problem);

/// Grid-function L2 error h * sqrt(sum over interior (u - exact)^2).
double l2_error(const Grid& grid, const GridFunction& u, const PointFn& exact);

/// Max-norm error over interior nodes.
double max_error(const Grid& grid, const GridFunction& u, const PointFn& exact);

}  // namespace maddm
