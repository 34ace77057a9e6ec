#include "maddm/problems.hpp"

#include <cmath>
#include <iostream>

namespace maddm {

ProblemSpec example1() {
  ProblemSpec p;
  p.name = "ex1";
  p.exact = [](Point x) { return std::exp(0.5 * (x.x * x.x + x.y * x.y)); };
  p.f = [](Point x) {
    const double r2 = x.x * x.x + x.y * x.y;
    return (1.0 + r2) * std::exp(r2);
  };
  p.g = p.exact;
  return p;
}

ProblemSpec example2() {
  ProblemSpec p;
  p.name = "ex2";
  p.exact = [](Point x) {
    const double r = std::hypot(x.x, x.y);
    return std::pow(std::max(r - 0.2, 0.0), 2.5);
  };
  p.f = [](Point x) {
    const double r = std::hypot(x.x, x.y);
    if (r == 0.0) return 0.0;
    const double t = std::max(5.0 * r - 1.0, 0.0);
    return 0.375 * t * t / r;
  };
  p.g = p.exact;
  return p;
}

ProblemData make_problem_data(const Grid& grid, const ProblemSpec& problem) {
  ProblemData data;
  data.f.resize(grid.num_interior());
  data.g.resize(grid.num_boundary());
  bool negative = false;
  for (int i = 0; i < grid.num_interior(); ++i) {
    data.f[i] = problem.f(grid.coord(NodeId{i}));
    negative = negative || data.f[i] < 0.0;
  }
  for (int b = 0; b < grid.num_boundary(); ++b)
    data.g[b] = problem.g(grid.coord(grid.boundary_node(b)));
  if (negative)
    std::cerr << "warning: f < 0 at some interior nodes; the convex problem wants f >= 0\n";
  return data;
}

double l2_error(const Grid& grid, const GridFunction& u, const PointFn& exact) {
  double s = 0.0;
  for (int i = 0; i < grid.num_interior(); ++i) {
    const double d = u[NodeId{i}] - exact(grid.coord(NodeId{i}));
    s += d * d;
  }
  return grid.spec().h() * std::sqrt(s);
}

double max_error(const Grid& grid, const GridFunction& u, const PointFn& exact) {
  double m = 0.0;
  for (int i = 0; i < grid.num_interior(); ++i)
    m = std::max(m, std::abs(u[NodeId{i}] - exact(grid.coord(NodeId{i}))));
  return m;
}

}  // namespace maddm
