#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "maddm/grid.hpp"
#include "maddm/linalg.hpp"

namespace maddm {

/// Real values on every node of a grid, interior and boundary.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(const Grid& grid, double value = 0.0)
      : values_(static_cast<std::size_t>(grid.num_nodes()), value) {}

  double& operator[](NodeId id) { return values_[id.value]; }
  double operator[](NodeId id) const { return values_[id.value]; }

  int size() const { return static_cast<int>(values_.size()); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  /// Text table: node_id value (17 significant digits).
  void dump(std::ostream& out) const;

 private:
  std::vector<double> values_;
};

struct NonPositiveWeightError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Simpson quadrature weights over the direction gaps. All positive;
/// they integrate constants over [0, pi) exactly, so they sum to pi.
struct QuadratureWeights {
  std::vector<double> mu;

  double sum() const;
};

/// Non-uniform composite Simpson weights for the angular quadrature.
/// Throws NonPositiveWeightError when an angle set is too skewed for the
/// rule to stay positive (monotonicity of the scheme requires mu_j > 0).
QuadratureWeights quad_weights(const DirectionSet& dirs);

/// Problem samples: f at interior nodes (by interior id) and Dirichlet g
/// at boundary nodes (by boundary ordinal, i.e. id - num_interior).
struct ProblemData {
  std::vector<double> f;
  std::vector<double> g;
};

/// The generalized second-difference quotient along one direction,
/// normalized to be exact on quadratics:
///   [r- u(x + r+ nu) + r+ u(x - r- nu) - (r+ + r-) u(x)] /
///   [r+ r- (r+ + r-) / 2].
double second_difference(double u_plus, double u_minus, double u_center, double r_plus,
                         double r_minus);

/// D_{nu_j nu_j} u at an interior node.
double dir_second_diff(const Grid& grid, const GridFunction& u, NodeId node, int direction);

/// One row of the scheme. Interior nodes get the regularized quadrature
/// discretization of -det(D^2 u) + f; boundary nodes get u - g.
double residual(const Grid& grid, const QuadratureWeights& qw, const GridFunction& u,
                const ProblemData& data, NodeId node);

/// Scheme rows at an ordered set of interior unknowns; all other node
/// values in u are treated as fixed data.
std::vector<double> residual_vector(const Grid& grid, const QuadratureWeights& qw,
                                    const GridFunction& u, const ProblemData& data,
                                    std::span<const NodeId> unknowns);

/// Text table node_id value for a residual vector over its unknowns,
/// matching the GridFunction dump format.
void dump_residual(std::span<const NodeId> unknowns, std::span<const double> values,
                   std::ostream& out);

/// Exact analytic Jacobian of residual_vector with respect to the unknown
/// values. Kinks resolve deterministically: the max branch follows D_j
/// when D_j >= h^2, and the min term differentiates only its first active
/// direction, contributing nothing when the constant h^2 attains the min.
/// Each row has at most 4w + 1 entries.
SparseMatrix assemble_jacobian(const Grid& grid, const QuadratureWeights& qw,
                               const GridFunction& u, const ProblemData& data,
                               std::span<const NodeId> unknowns);

/// Residual/Jacobian pair of the scheme restricted to an ordered unknown
/// set, with every other node frozen at the base function's values.
/// Holds scratch state; use one instance per concurrent solve.
class SchemeSystem {
 public:
  SchemeSystem(const Grid& grid, const QuadratureWeights& qw, const ProblemData& data,
               std::vector<NodeId> unknowns, const GridFunction& base);

  int size() const { return static_cast<int>(unknowns_.size()); }
  const std::vector<NodeId>& unknowns() const { return unknowns_; }

  std::vector<double> initial() const;
  std::vector<double> residual_at(std::span<const double> x) const;
  SparseMatrix jacobian_at(std::span<const double> x) const;

  /// Full grid function with the unknowns set to x.
  GridFunction to_grid_function(std::span<const double> x) const;

 private:
  void scatter(std::span<const double> x) const;

  const Grid* grid_;
  const QuadratureWeights* qw_;
  const ProblemData* data_;
  std::vector<NodeId> unknowns_;
  mutable GridFunction work_;
};

}  // namespace maddm
