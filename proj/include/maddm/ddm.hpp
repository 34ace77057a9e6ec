#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "maddm/grid.hpp"
#include "maddm/newton.hpp"
#include "maddm/problems.hpp"
#include "maddm/scheme.hpp"

namespace maddm {

/// Block decomposition of the interior lattice: m splits along x, n along
/// y, overlap given as the fraction of a block's width that neighboring
/// blocks extend into each other.
struct DecompositionSpec {
  int m = 1;
  int n = 1;
  double px = 0.0;
  double py = 0.0;

  int count() const { return m * n; }
  /// Overlap layer count round(p * N / splits), at least 1 when p > 0.
  static int layers(double p, int N, int splits);
  int layers_x(int N) const { return layers(px, N, m); }
  int layers_y(int N) const { return layers(py, N, n); }
};

/// One extended block: inclusive 1-based lattice ranges plus the node ids
/// it owns (row-major).
struct Subdomain {
  int xlo = 1, xhi = 0, ylo = 1, yhi = 0;
  std::vector<NodeId> nodes;

  bool contains(int ix, int iy) const {
    return ix >= xlo && ix <= xhi && iy >= ylo && iy <= yhi;
  }
};

/// Partition of unity over subdomains: lambda_i(x) = 1/#{k : x in G_k}
/// when x in G_i and 0 otherwise.
struct MergeWeights {
  std::vector<int> multiplicity;  // per interior node
};

struct Decomposition {
  int N = 0;
  std::vector<Subdomain> subdomains;
  MergeWeights weights;

  double lambda(int i, NodeId interior) const {
    const int ix = interior.value % N + 1;
    const int iy = interior.value / N + 1;
    return subdomains[i].contains(ix, iy) ? 1.0 / weights.multiplicity[interior.value] : 0.0;
  }
};

struct EmptySubdomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SubdomainError : std::runtime_error {
  SubdomainError(int index, NewtonReport rep);
  int subdomain;
  NewtonReport report;
};

Decomposition decompose(const Grid& grid, const DecompositionSpec& dspec);

struct DdmConfig {
  DecompositionSpec decomposition;
  int max_outer = 500;
  double newton_tol_factor = 0.1;  // subdomain solves stop at factor * h
  NewtonConfig newton;             // tol is overridden per solve
  bool coarse_init = true;
  int threads = 1;
  std::ostream* log = nullptr;  // outer-iteration lines when set
};

/// Counts and residual trail of one solve, plus the experiment
/// parameters the harness fills in for reporting.
struct SolveReport {
  std::string problem;
  double L = 0.0, h = 0.0;
  int N = 0, w = 0;
  int m = 1, n = 1;
  double px = 0.0, py = 0.0;
  int outer_iterations = 0;
  bool converged = false;
  int total_newton_iterations = 0;
  long total_krylov_iterations = 0;
  int coarse_newton_iterations = 0;
  bool coarse_init_used = false;
  double final_residual = 0.0;
  std::vector<double> residual_history;  // ||F|| before and after each outer pass
  double l2_err = std::numeric_limits<double>::quiet_NaN();
  double max_err = std::numeric_limits<double>::quiet_NaN();
  double wall_seconds = 0.0;
};

/// One row of the i-th subdomain operator: the scheme on G_i, the
/// Dirichlet row on the boundary, and the tie u_i - v on interior nodes
/// outside G_i.
double subdomain_residual(const Grid& grid, const QuadratureWeights& qw,
                          const Decomposition& dec, int i, const GridFunction& u_i,
                          const GridFunction& v, const ProblemData& data, NodeId node);

/// Solves the i-th subdomain problem with exterior values frozen to v and
/// g on the boundary; warm-started from the restriction of v. Throws
/// SubdomainError when the Newton solve fails to converge.
GridFunction solve_subdomain(const Grid& grid, const QuadratureWeights& qw,
                             const Decomposition& dec, int i, const GridFunction& v,
                             const ProblemData& data, const NewtonConfig& newton_cfg,
                             NewtonReport* report = nullptr);

/// One outer pass: the independent subdomain solves followed by the
/// partition-of-unity average. Subdomain results are merged in index
/// order, so the outcome is identical for any thread count.
std::pair<GridFunction, std::vector<NewtonReport>> ddm_iterate(
    const Grid& grid, const QuadratureWeights& qw, const Decomposition& dec,
    const GridFunction& u_prev, const ProblemData& data, const DdmConfig& cfg);

/// ||F^h[u]||_2 over the whole system: scheme rows at interior nodes and
/// Dirichlet rows u - g at boundary nodes (the latter vanish on every
/// iterate the DDM update produces).
double global_residual_norm(const Grid& grid, const QuadratureWeights& qw,
                            const GridFunction& u, const ProblemData& data);

/// Quadratic seed |x|^2/2 at interior nodes, g on the boundary.
GridFunction quadratic_seed(const Grid& grid, const ProblemData& data);

struct InitialGuess {
  GridFunction u;
  bool from_coarse = false;
  int coarse_newton_iterations = 0;
};

/// Solves the problem on a grid about four times coarser starting from
/// the quadratic seed, then interpolates bilinearly onto the fine
/// lattice. Falls back to the quadratic seed when the coarse solve
/// diverges. Requires problem evaluators for the coarse samples.
InitialGuess coarse_initialize(const Grid& fine, const ProblemSpec& problem,
                               const ProblemData& fine_data, const DdmConfig& cfg);

struct DdmResult {
  GridFunction u;
  SolveReport report;
};

/// Repeats ddm_iterate from the given initial guess until the global
/// residual drops below h or max_outer passes are spent.
DdmResult ddm_solve(const Grid& grid, const QuadratureWeights& qw, const ProblemData& data,
                    const DdmConfig& cfg, GridFunction initial);

}  // namespace maddm
