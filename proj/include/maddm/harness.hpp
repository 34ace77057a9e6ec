#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "maddm/ddm.hpp"

namespace maddm {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One experiment configuration: problem, geometry, decomposition and
/// solver knobs. Exactly one of h and N must be set.
struct RunConfig {
  std::string problem = "ex1";  // ex1 | ex2 | custom
  double L = 0.5;
  double h = 0.0;
  int N = 0;
  DecompositionSpec decomposition;
  int max_outer = 500;
  int max_newton = 200;
  double newton_tol_factor = 0.1;
  double krylov_tol = 1e-5;
  int restart = 30;
  bool jacobi = false;
  int threads = 1;
  bool coarse_init = true;
  int verbose = 0;
  std::string out_path;
  std::string dump_solution_path;
  std::string f_file;  // custom problem: sampled f, lines "node_id value"
  std::string g_file;  // custom problem: sampled g at boundary nodes
};

/// Resolves N from the requested spacing (or validates the given N).
/// Throws UsageError on an inconsistent config.
int resolve_nodes(const RunConfig& cfg);

/// Runs one solve: initialization, DDM outer loop (a single global
/// Newton solve when N_d = 1), error norms, and the optional report and
/// solution dumps. Failures inside the solver propagate.
SolveReport run_single(const RunConfig& cfg);

/// Cross-product experiment sweep. Lists come from a plain key=list file.
struct SweepSpec {
  std::vector<std::string> problems;
  std::vector<double> Ls;
  std::vector<double> hs;              // either hs or Ns is used
  std::vector<int> Ns;
  std::vector<std::pair<int, int>> nds;  // (m, n)
  std::vector<double> overlaps;          // uniform p as a fraction
};

/// Parses lines of the form "key = v1, v2, ...". Keys: problem, L, h, N,
/// nd (MxN tokens), p (percent). '#' starts a comment.
SweepSpec parse_sweep_file(std::istream& in);

/// Throws UsageError unless every sweep list is usable.
void validate_sweep(const SweepSpec& sweep);

/// Runs the cross product in declaration order (problem, L, h|N, nd, p)
/// and streams one CSV row per configuration; a failed row is recorded
/// with converged = 0 and the sweep continues.
std::vector<SolveReport> run_sweep(const RunConfig& base, const SweepSpec& sweep,
                                   std::ostream& csv);

void write_csv_header(std::ostream& out);
void write_csv_row(const SolveReport& report, std::ostream& out);

/// Flat key = value record of a report.
void write_report_kv(const SolveReport& report, std::ostream& out);

/// CSV with columns x, y, value; interior nodes first, then boundary.
void dump_solution(const Grid& grid, const GridFunction& u, std::ostream& out);

}  // namespace maddm
