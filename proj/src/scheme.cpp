#include "maddm/scheme.hpp"

#include <cassert>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace maddm {

void GridFunction::dump(std::ostream& out) const {
  out << "node_id value\n";
  char buf[48];
  for (std::size_t i = 0; i < values_.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu %.17g\n", i, values_[i]);
    out << buf;
  }
}

double QuadratureWeights::sum() const {
  double s = 0.0;
  for (double m : mu) s += m;
  return s;
}

QuadratureWeights quad_weights(const DirectionSet& dirs) {
  const int ne = dirs.count();
  assert(ne >= 2);
  const std::vector<double>& dt = dirs.gaps;
  auto at = [&](int j) { return dt[((j % ne) + ne) % ne]; };

  QuadratureWeights qw;
  qw.mu.resize(ne);
  for (int j = 0; j < ne; ++j) {
    double mu;
    if (j % 2 == 1) {
      mu = std::pow(at(j - 1) + at(j), 3) / (6.0 * at(j - 1) * at(j));
    } else {
      mu = (at(j) + at(j + 1)) / 6.0 * (2.0 - at(j + 1) / at(j)) +
           (at(j - 2) + at(j - 1)) / 6.0 * (2.0 - at(j - 2) / at(j - 1));
    }
    if (!(mu > 0.0)) {
      char msg[96];
      std::snprintf(msg, sizeof(msg), "quadrature weight mu_%d = %g is not positive", j, mu);
      throw NonPositiveWeightError(msg);
    }
    qw.mu[j] = mu;
  }
  return qw;
}

double second_difference(double u_plus, double u_minus, double u_center, double r_plus,
                         double r_minus) {
  const double num =
      r_minus * u_plus + r_plus * u_minus - (r_plus + r_minus) * u_center;
  return num / (0.5 * r_plus * r_minus * (r_plus + r_minus));
}

double dir_second_diff(const Grid& grid, const GridFunction& u, NodeId node, int direction) {
  assert(grid.is_interior(node));
  const StencilEntry& e = grid.stencil(node)[direction];
  return second_difference(u[e.plus], u[e.minus], u[node], e.r_plus, e.r_minus);
}

namespace {

struct RowEval {
  double value = 0.0;          // residual
  double S = 0.0;              // (1/pi) sum mu_j / max(D_j, h^2)
  double min_D = 0.0;          // min over directions
  int argmin = 0;              // first direction attaining min_D
};

RowEval eval_interior(const Grid& grid, const QuadratureWeights& qw, const GridFunction& u,
                      const ProblemData& data, NodeId node, std::span<double> D) {
  const double h2 = grid.spec().h() * grid.spec().h();
  const auto stencil = grid.stencil(node);
  const int ne = static_cast<int>(stencil.size());

  RowEval ev;
  double S = 0.0;
  double mn = 0.0;
  int argmin = 0;
  for (int j = 0; j < ne; ++j) {
    const StencilEntry& e = stencil[j];
    const double d = second_difference(u[e.plus], u[e.minus], u[node], e.r_plus, e.r_minus);
    D[j] = d;
    S += qw.mu[j] / std::max(d, h2);
    if (j == 0 || d < mn) {
      mn = d;
      argmin = j;
    }
  }
  S /= M_PI;
  ev.S = S;
  ev.min_D = mn;
  ev.argmin = argmin;
  ev.value = -1.0 / (S * S) - std::min(mn, h2) + data.f[node.value];
  return ev;
}

}  // namespace

double residual(const Grid& grid, const QuadratureWeights& qw, const GridFunction& u,
                const ProblemData& data, NodeId node) {
  if (!grid.is_interior(node))
    return u[node] - data.g[node.value - grid.num_interior()];
  std::vector<double> D(grid.directions().count());
  return eval_interior(grid, qw, u, data, node, D).value;
}

std::vector<double> residual_vector(const Grid& grid, const QuadratureWeights& qw,
                                    const GridFunction& u, const ProblemData& data,
                                    std::span<const NodeId> unknowns) {
  std::vector<double> out(unknowns.size());
  std::vector<double> D(grid.directions().count());
  for (std::size_t k = 0; k < unknowns.size(); ++k) {
    assert(grid.is_interior(unknowns[k]));
    out[k] = eval_interior(grid, qw, u, data, unknowns[k], D).value;
  }
  return out;
}

void dump_residual(std::span<const NodeId> unknowns, std::span<const double> values,
                   std::ostream& out) {
  assert(unknowns.size() == values.size());
  out << "node_id value\n";
  char buf[48];
  for (std::size_t k = 0; k < unknowns.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%d %.17g\n", unknowns[k].value, values[k]);
    out << buf;
  }
}

SparseMatrix assemble_jacobian(const Grid& grid, const QuadratureWeights& qw,
                               const GridFunction& u, const ProblemData& data,
                               std::span<const NodeId> unknowns) {
  const int n = static_cast<int>(unknowns.size());
  const double h2 = grid.spec().h() * grid.spec().h();
  const int ne = grid.directions().count();

  std::vector<std::int32_t> slot(grid.num_nodes(), -1);
  for (int k = 0; k < n; ++k) slot[unknowns[k].value] = k;

  std::vector<SparseMatrix::Triplet> trips;
  trips.reserve(static_cast<std::size_t>(n) * (2 * ne + 1));
  std::vector<double> D(ne);
  for (int k = 0; k < n; ++k) {
    const NodeId node = unknowns[k];
    const RowEval ev = eval_interior(grid, qw, u, data, node, D);
    const auto stencil = grid.stencil(node);
    const bool min_from_direction = ev.min_D < h2;

    double diag = 0.0;
    for (int j = 0; j < ne; ++j) {
      // dF/dD_j: harmonic-sum term when the max branch follows D_j, plus
      // the min term on its first active direction
      double coeff = 0.0;
      if (D[j] >= h2) coeff -= 2.0 * qw.mu[j] / (M_PI * ev.S * ev.S * ev.S * D[j] * D[j]);
      if (min_from_direction && j == ev.argmin) coeff -= 1.0;
      if (coeff == 0.0) continue;

      const StencilEntry& e = stencil[j];
      diag += coeff * (-2.0 / (e.r_plus * e.r_minus));
      if (const std::int32_t c = slot[e.plus.value]; c >= 0)
        trips.push_back({k, c, coeff * 2.0 / (e.r_plus * (e.r_plus + e.r_minus))});
      if (const std::int32_t c = slot[e.minus.value]; c >= 0)
        trips.push_back({k, c, coeff * 2.0 / (e.r_minus * (e.r_plus + e.r_minus))});
    }
    trips.push_back({k, k, diag});
  }
  return SparseMatrix::from_triplets(n, std::move(trips));
}

SchemeSystem::SchemeSystem(const Grid& grid, const QuadratureWeights& qw,
                           const ProblemData& data, std::vector<NodeId> unknowns,
                           const GridFunction& base)
    : grid_(&grid), qw_(&qw), data_(&data), unknowns_(std::move(unknowns)), work_(base) {
  assert(base.size() == grid.num_nodes());
}

void SchemeSystem::scatter(std::span<const double> x) const {
  assert(static_cast<int>(x.size()) == size());
  for (std::size_t k = 0; k < unknowns_.size(); ++k) work_[unknowns_[k]] = x[k];
}

std::vector<double> SchemeSystem::initial() const {
  std::vector<double> x(unknowns_.size());
  for (std::size_t k = 0; k < unknowns_.size(); ++k) x[k] = work_[unknowns_[k]];
  return x;
}

std::vector<double> SchemeSystem::residual_at(std::span<const double> x) const {
  scatter(x);
  return residual_vector(*grid_, *qw_, work_, *data_, unknowns_);
}

SparseMatrix SchemeSystem::jacobian_at(std::span<const double> x) const {
  scatter(x);
  return assemble_jacobian(*grid_, *qw_, work_, *data_, unknowns_);
}

GridFunction SchemeSystem::to_grid_function(std::span<const double> x) const {
  scatter(x);
  return work_;
}

}  // namespace maddm
