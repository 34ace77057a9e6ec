#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "maddm/harness.hpp"

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitNotConverged = 2;
constexpr int kExitUsage = 64;

int dump_grid_table(const maddm::RunConfig& cfg, const std::string& path, bool boundary_only) {
  const int N = maddm::resolve_nodes(cfg);
  const maddm::Grid grid(maddm::DomainSpec{cfg.L, N});
  std::ofstream out(path);
  if (!out) {
    std::cerr << "cannot write " << path << '\n';
    return kExitUsage;
  }
  grid.dump(out, boundary_only);
  return kExitConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monge-Ampere solver: monotone wide-stencil discretization with an "
               "overlapping domain-decomposition outer iteration"};

  app.set_help_flag("--help", "Print help and exit");

  maddm::RunConfig cfg;
  std::string nd = "1x1";
  double overlap = -1.0, overlap_x = -1.0, overlap_y = -1.0;
  std::string sweep_path, emit_boundary_path, dump_grid_path;
  bool no_coarse_init = false;

  app.add_option("--problem", cfg.problem, "Problem: ex1, ex2 or custom");
  app.add_option("--L", cfg.L, "Domain half-width of (-L,L)^2");
  auto* opt_h = app.add_option("--h", cfg.h, "Target grid spacing (sets N = 2L/h - 1)");
  auto* opt_N = app.add_option("--N", cfg.N, "Interior nodes per axis");
  opt_h->excludes(opt_N);
  app.add_option("--nd", nd, "Decomposition MxN: M splits along x, N along y");
  app.add_option("--overlap", overlap, "Uniform overlap percentage");
  app.add_option("--overlap-x", overlap_x, "Overlap percentage along x");
  app.add_option("--overlap-y", overlap_y, "Overlap percentage along y");
  app.add_option("--max-outer", cfg.max_outer, "Outer iteration cap");
  app.add_option("--max-newton", cfg.max_newton, "Newton iteration cap per solve");
  app.add_option("--newton-tol-factor", cfg.newton_tol_factor,
                 "Subdomain Newton stops at factor*h");
  app.add_option("--krylov-tol", cfg.krylov_tol, "GMRES relative residual tolerance");
  app.add_option("--restart", cfg.restart, "GMRES restart length");
  app.add_flag("--jacobi", cfg.jacobi, "Diagonal preconditioning for GMRES");
  app.add_option("--threads", cfg.threads, "Parallel subdomain solves per outer pass");
  app.add_flag("--no-coarse-init", no_coarse_init,
               "Start from the quadratic seed instead of a coarse-grid solve");
  app.add_option("--out", cfg.out_path, "Write a key=value report here");
  app.add_option("--dump-solution", cfg.dump_solution_path, "Write x,y,value CSV here");
  app.add_option("--f-file", cfg.f_file, "Custom problem: sampled f (node_id value)");
  app.add_option("--g-file", cfg.g_file, "Custom problem: sampled g (node_id value)");
  app.add_option("--sweep", sweep_path, "Run the cross-product sweep from a key=list file");
  app.add_option("--emit-boundary-nodes", emit_boundary_path,
                 "Write the boundary node table and exit");
  app.add_option("--dump-grid", dump_grid_path, "Write the full node table and exit");
  app.add_flag("-v,--verbose", cfg.verbose, "Outer (-v) and Newton (-vv) progress lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    cfg.decomposition.m = std::stoi(nd.substr(0, nd.find_first_of("xX")));
    const auto x = nd.find_first_of("xX");
    if (x == std::string::npos) throw maddm::UsageError("--nd must look like MxN");
    cfg.decomposition.n = std::stoi(nd.substr(x + 1));
    if (overlap >= 0.0) cfg.decomposition.px = cfg.decomposition.py = overlap / 100.0;
    if (overlap_x >= 0.0) cfg.decomposition.px = overlap_x / 100.0;
    if (overlap_y >= 0.0) cfg.decomposition.py = overlap_y / 100.0;
    cfg.coarse_init = !no_coarse_init;

    if (!dump_grid_path.empty()) return dump_grid_table(cfg, dump_grid_path, false);
    if (!emit_boundary_path.empty()) return dump_grid_table(cfg, emit_boundary_path, true);

    if (!sweep_path.empty()) {
      std::ifstream in(sweep_path);
      if (!in) throw maddm::UsageError("cannot open sweep file: " + sweep_path);
      const maddm::SweepSpec sweep = maddm::parse_sweep_file(in);
      maddm::validate_sweep(sweep);  // before touching the output file
      std::ofstream csv;
      std::ostream* out = &std::cout;
      if (!cfg.out_path.empty()) {
        csv.open(cfg.out_path);
        if (!csv) throw maddm::UsageError("cannot write " + cfg.out_path);
        out = &csv;
      }
      const auto reports = maddm::run_sweep(cfg, sweep, *out);
      for (const auto& r : reports)
        if (!r.converged) return kExitNotConverged;
      return kExitConverged;
    }

    const maddm::SolveReport report = maddm::run_single(cfg);
    maddm::write_report_kv(report, std::cout);
    return report.converged ? kExitConverged : kExitNotConverged;
  } catch (const maddm::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitNotConverged;
  }
}
