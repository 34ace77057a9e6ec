#include "maddm/harness.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace maddm {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::pair<int, int> parse_nd(const std::string& token) {
  const std::size_t x = token.find_first_of("xX");
  if (x == std::string::npos || x == 0 || x + 1 >= token.size())
    throw UsageError("decomposition must look like MxN, got '" + token + "'");
  try {
    return {std::stoi(token.substr(0, x)), std::stoi(token.substr(x + 1))};
  } catch (const std::exception&) {
    throw UsageError("decomposition must look like MxN, got '" + token + "'");
  }
}

// "node_id value" (comma or whitespace separated) with the node ids the
// grid dump prints; '#' comments and a header line are skipped
std::vector<double> read_sampled_values(const std::string& path, int first_id, int count) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open sample file: " + path);
  std::vector<double> values(count, std::numeric_limits<double>::quiet_NaN());
  std::string line;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    long id;
    double value;
    if (!(ls >> id >> value)) {
      if (!std::isdigit(static_cast<unsigned char>(line[0])) && line[0] != '-') continue;
      throw UsageError("bad sample line in " + path + ": " + line);
    }
    if (id < first_id || id >= first_id + count)
      throw UsageError("sample id " + std::to_string(id) + " out of range in " + path);
    values[id - first_id] = value;
  }
  for (int i = 0; i < count; ++i)
    if (std::isnan(values[i]))
      throw UsageError("sample file " + path + " misses id " + std::to_string(first_id + i));
  return values;
}

ProblemSpec select_problem(const RunConfig& cfg) {
  if (cfg.problem == "ex1") return example1();
  if (cfg.problem == "ex2") return example2();
  if (cfg.problem == "custom") {
    if (cfg.f_file.empty() || cfg.g_file.empty())
      throw UsageError("custom problem needs --f-file and --g-file");
    ProblemSpec p;
    p.name = "custom";
    return p;
  }
  throw UsageError("unknown problem '" + cfg.problem + "' (ex1, ex2 or custom)");
}

void validate(const RunConfig& cfg) {
  if ((cfg.h > 0.0) == (cfg.N > 0)) throw UsageError("give exactly one of --h and --N");
  if (cfg.L <= 0.0) throw UsageError("--L must be positive");
  if (cfg.decomposition.m < 1 || cfg.decomposition.n < 1)
    throw UsageError("decomposition splits must be at least 1");
  if (cfg.decomposition.px < 0.0 || cfg.decomposition.px > 1.0 ||
      cfg.decomposition.py < 0.0 || cfg.decomposition.py > 1.0)
    throw UsageError("overlap percentages must lie in [0, 100]");
  if (cfg.threads < 1) throw UsageError("--threads must be at least 1");
  if (cfg.krylov_tol <= 0.0 || cfg.restart < 1 || cfg.max_outer < 1 || cfg.max_newton < 1 ||
      cfg.newton_tol_factor <= 0.0)
    throw UsageError("solver limits must be positive");
}

DdmConfig make_ddm_config(const RunConfig& cfg) {
  DdmConfig ddm;
  ddm.decomposition = cfg.decomposition;
  ddm.max_outer = cfg.max_outer;
  ddm.newton_tol_factor = cfg.newton_tol_factor;
  ddm.newton.max_iter = cfg.max_newton;
  ddm.newton.krylov.tol = cfg.krylov_tol;
  ddm.newton.krylov.restart = cfg.restart;
  ddm.newton.krylov.jacobi = cfg.jacobi;
  ddm.coarse_init = cfg.coarse_init;
  ddm.threads = cfg.threads;
  if (cfg.verbose >= 1) ddm.log = &std::cerr;
  if (cfg.verbose >= 2 && cfg.threads <= 1) ddm.newton.log = &std::cerr;
  return ddm;
}

}  // namespace

int resolve_nodes(const RunConfig& cfg) {
  validate(cfg);
  const int N = cfg.N > 0 ? cfg.N : DomainSpec::nodes_for_spacing(cfg.L, cfg.h);
  if (cfg.decomposition.m > N || cfg.decomposition.n > N)
    throw UsageError("more splits than lattice rows");
  return N;
}

SolveReport run_single(const RunConfig& cfg) {
  const int N = resolve_nodes(cfg);
  if (cfg.decomposition.px == 0.0 && cfg.decomposition.py == 0.0 &&
      cfg.decomposition.count() > 1)
    std::cerr << "warning: zero overlap still covers the interior, but the convergence "
                 "theory assumes overlapping subdomains\n";

  const auto t0 = std::chrono::steady_clock::now();
  const Grid grid(DomainSpec{cfg.L, N});
  const QuadratureWeights qw = quad_weights(grid.directions());
  const ProblemSpec problem = select_problem(cfg);

  ProblemData data;
  if (problem.f) {
    data = make_problem_data(grid, problem);
  } else {
    data.f = read_sampled_values(cfg.f_file, 0, grid.num_interior());
    data.g = read_sampled_values(cfg.g_file, grid.num_interior(), grid.num_boundary());
  }

  DdmConfig ddm = make_ddm_config(cfg);

  InitialGuess init;
  if (ddm.coarse_init && problem.f) {
    init = coarse_initialize(grid, problem, data, ddm);
  } else {
    init.u = quadratic_seed(grid, data);
  }

  DdmResult result = ddm_solve(grid, qw, data, ddm, std::move(init.u));
  SolveReport& rep = result.report;
  rep.problem = problem.name;
  rep.coarse_init_used = init.from_coarse;
  rep.coarse_newton_iterations = init.coarse_newton_iterations;
  if (problem.has_exact()) {
    rep.l2_err = l2_error(grid, result.u, problem.exact);
    rep.max_err = max_error(grid, result.u, problem.exact);
  }
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!cfg.out_path.empty()) {
    std::ofstream out(cfg.out_path);
    if (!out) throw UsageError("cannot write report to " + cfg.out_path);
    write_report_kv(rep, out);
  }
  if (!cfg.dump_solution_path.empty()) {
    std::ofstream out(cfg.dump_solution_path);
    if (!out) throw UsageError("cannot write solution to " + cfg.dump_solution_path);
    dump_solution(grid, result.u, out);
  }
  return rep;
}

SweepSpec parse_sweep_file(std::istream& in) {
  SweepSpec sweep;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("sweep line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const auto items = split_list(line.substr(eq + 1));
    try {
      if (key == "problem") {
        sweep.problems = items;
      } else if (key == "L") {
        for (const auto& s : items) sweep.Ls.push_back(std::stod(s));
      } else if (key == "h") {
        for (const auto& s : items) sweep.hs.push_back(std::stod(s));
      } else if (key == "N") {
        for (const auto& s : items) sweep.Ns.push_back(std::stoi(s));
      } else if (key == "nd") {
        for (const auto& s : items) sweep.nds.push_back(parse_nd(s));
      } else if (key == "p") {
        for (const auto& s : items) sweep.overlaps.push_back(std::stod(s) / 100.0);
      } else {
        throw UsageError("unknown sweep key '" + key + "'");
      }
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception&) {
      throw UsageError("bad value in sweep line: " + line);
    }
  }
  return sweep;
}

void validate_sweep(const SweepSpec& sweep) {
  if (sweep.problems.empty() || sweep.Ls.empty() ||
      (sweep.hs.empty() && sweep.Ns.empty()) || sweep.nds.empty() || sweep.overlaps.empty())
    throw UsageError("sweep needs non-empty problem, L, h or N, nd and p lists");
  if (!sweep.hs.empty() && !sweep.Ns.empty())
    throw UsageError("sweep must give h or N, not both");
}

std::vector<SolveReport> run_sweep(const RunConfig& base, const SweepSpec& sweep,
                                   std::ostream& csv) {
  validate_sweep(sweep);
  std::vector<SolveReport> reports;
  write_csv_header(csv);
  const std::size_t resolutions = std::max(sweep.hs.size(), sweep.Ns.size());
  for (const std::string& prob : sweep.problems) {
    for (double L : sweep.Ls) {
      for (std::size_t r = 0; r < resolutions; ++r) {
        for (const auto& [m, n] : sweep.nds) {
          for (double p : sweep.overlaps) {
            RunConfig cfg = base;
            cfg.problem = prob;
            cfg.L = L;
            cfg.h = sweep.hs.empty() ? 0.0 : sweep.hs[r];
            cfg.N = sweep.Ns.empty() ? 0 : sweep.Ns[r];
            cfg.decomposition.m = m;
            cfg.decomposition.n = n;
            cfg.decomposition.px = p;
            cfg.decomposition.py = p;
            cfg.out_path.clear();
            cfg.dump_solution_path.clear();
            SolveReport rep;
            try {
              rep = run_single(cfg);
            } catch (const UsageError&) {
              throw;
            } catch (const std::exception& e) {
              std::cerr << "sweep row failed (" << prob << " L=" << L << " " << m << "x" << n
                        << " p=" << p << "): " << e.what() << '\n';
              rep.problem = prob;
              rep.L = L;
              rep.h = cfg.h > 0 ? cfg.h : 2.0 * L / (cfg.N + 1);
              rep.N = cfg.N;
              rep.m = m;
              rep.n = n;
              rep.px = p;
              rep.py = p;
              rep.converged = false;
            }
            write_csv_row(rep, csv);
            reports.push_back(std::move(rep));
          }
        }
      }
    }
  }
  return reports;
}

void write_csv_header(std::ostream& out) {
  out << "problem,L,h,N,w,m,n,p_x,p_y,outer_iterations,converged,"
         "total_newton_iterations,total_krylov_iterations,l2_error,max_error,wall_seconds\n";
}

void write_csv_row(const SolveReport& r, std::ostream& out) {
  char buf[320];
  std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%d,%d,%d,%d,%.17g,%.17g,%d,%d,%d,%ld,%.17g,%.17g,%.3f\n",
                r.problem.c_str(), r.L, r.h, r.N, r.w, r.m, r.n, r.px, r.py,
                r.outer_iterations, r.converged ? 1 : 0, r.total_newton_iterations,
                r.total_krylov_iterations, r.l2_err, r.max_err, r.wall_seconds);
  out << buf;
}

void write_report_kv(const SolveReport& r, std::ostream& out) {
  char buf[160];
  auto kv = [&](const char* key, const char* fmt, auto value) {
    std::snprintf(buf, sizeof(buf), "%s = ", key);
    out << buf;
    std::snprintf(buf, sizeof(buf), fmt, value);
    out << buf << '\n';
  };
  kv("problem", "%s", r.problem.c_str());
  kv("L", "%.17g", r.L);
  kv("h", "%.17g", r.h);
  kv("N", "%d", r.N);
  kv("w", "%d", r.w);
  kv("m", "%d", r.m);
  kv("n", "%d", r.n);
  kv("p_x", "%.17g", r.px);
  kv("p_y", "%.17g", r.py);
  kv("outer_iterations", "%d", r.outer_iterations);
  kv("converged", "%d", r.converged ? 1 : 0);
  kv("total_newton_iterations", "%d", r.total_newton_iterations);
  kv("total_krylov_iterations", "%ld", r.total_krylov_iterations);
  kv("coarse_init_used", "%d", r.coarse_init_used ? 1 : 0);
  kv("coarse_newton_iterations", "%d", r.coarse_newton_iterations);
  kv("final_residual", "%.17g", r.final_residual);
  kv("l2_error", "%.17g", r.l2_err);
  kv("max_error", "%.17g", r.max_err);
  kv("wall_seconds", "%.3f", r.wall_seconds);
  out << "residual_history =";
  for (double v : r.residual_history) {
    std::snprintf(buf, sizeof(buf), " %.6g", v);
    out << buf;
  }
  out << '\n';
}

void dump_solution(const Grid& grid, const GridFunction& u, std::ostream& out) {
  out << "x,y,value\n";
  char buf[96];
  for (int i = 0; i < grid.num_nodes(); ++i) {
    const Point p = grid.coord(NodeId{i});
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.x, p.y, u[NodeId{i}]);
    out << buf;
  }
}

}  // namespace maddm
