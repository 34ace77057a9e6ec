#include "maddm/ddm.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <exception>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace maddm {

int DecompositionSpec::layers(double p, int N, int splits) {
  if (p <= 0.0) return 0;
  const int d = static_cast<int>(std::lround(p * N / splits));
  return std::max(d, 1);
}

SubdomainError::SubdomainError(int index, NewtonReport rep)
    : std::runtime_error("subdomain " + std::to_string(index) +
                         ": Newton did not converge (residual " +
                         std::to_string(rep.final_residual) + " after " +
                         std::to_string(rep.iterations) + " iterations)"),
      subdomain(index),
      report(std::move(rep)) {}

namespace {

// contiguous blocks of 1..N, as equal as possible, extended by delta
// layers on each interior-facing side and clipped to the lattice
std::vector<std::pair<int, int>> split_axis(int N, int splits, int delta) {
  std::vector<std::pair<int, int>> out;
  out.reserve(splits);
  const int base = N / splits;
  const int rem = N % splits;
  int start = 1;
  for (int b = 0; b < splits; ++b) {
    const int size = base + (b < rem ? 1 : 0);
    if (size <= 0) throw EmptySubdomainError("axis split produced an empty block");
    int lo = start;
    int hi = start + size - 1;
    start = hi + 1;
    if (b > 0) lo = std::max(1, lo - delta);
    if (b + 1 < splits) hi = std::min(N, hi + delta);
    out.push_back({lo, hi});
  }
  return out;
}

}  // namespace

Decomposition decompose(const Grid& grid, const DecompositionSpec& dspec) {
  const int N = grid.spec().N;
  if (dspec.m < 1 || dspec.n < 1 || dspec.m > N || dspec.n > N)
    throw std::invalid_argument("decomposition splits must lie in [1, N]");

  const auto bx = split_axis(N, dspec.m, dspec.layers_x(N));
  const auto by = split_axis(N, dspec.n, dspec.layers_y(N));

  Decomposition dec;
  dec.N = N;
  dec.subdomains.reserve(dspec.count());
  dec.weights.multiplicity.assign(static_cast<std::size_t>(N) * N, 0);
  for (const auto& [ylo, yhi] : by) {
    for (const auto& [xlo, xhi] : bx) {
      Subdomain s{xlo, xhi, ylo, yhi, {}};
      s.nodes.reserve(static_cast<std::size_t>(xhi - xlo + 1) * (yhi - ylo + 1));
      for (int iy = ylo; iy <= yhi; ++iy) {
        for (int ix = xlo; ix <= xhi; ++ix) {
          const NodeId id = grid.interior_node(ix, iy);
          s.nodes.push_back(id);
          ++dec.weights.multiplicity[id.value];
        }
      }
      dec.subdomains.push_back(std::move(s));
    }
  }
  for (int mult : dec.weights.multiplicity)
    if (mult < 1) throw EmptySubdomainError("decomposition does not cover the interior");
  return dec;
}

double subdomain_residual(const Grid& grid, const QuadratureWeights& qw,
                          const Decomposition& dec, int i, const GridFunction& u_i,
                          const GridFunction& v, const ProblemData& data, NodeId node) {
  if (!grid.is_interior(node)) return u_i[node] - data.g[node.value - grid.num_interior()];
  const int ix = node.value % dec.N + 1;
  const int iy = node.value / dec.N + 1;
  if (dec.subdomains[i].contains(ix, iy)) return residual(grid, qw, u_i, data, node);
  return u_i[node] - v[node];
}

GridFunction solve_subdomain(const Grid& grid, const QuadratureWeights& qw,
                             const Decomposition& dec, int i, const GridFunction& v,
                             const ProblemData& data, const NewtonConfig& newton_cfg,
                             NewtonReport* report) {
  GridFunction base = v;
  for (int b = 0; b < grid.num_boundary(); ++b) base[grid.boundary_node(b)] = data.g[b];

  SchemeSystem sys(grid, qw, data, dec.subdomains[i].nodes, base);
  NewtonResult result = newton_solve(
      [&sys](std::span<const double> x) { return sys.residual_at(x); },
      [&sys](std::span<const double> x) { return sys.jacobian_at(x); }, sys.initial(),
      newton_cfg);
  if (report) *report = result.report;
  if (!result.report.converged) throw SubdomainError(i, result.report);
  return sys.to_grid_function(result.u);
}

std::pair<GridFunction, std::vector<NewtonReport>> ddm_iterate(
    const Grid& grid, const QuadratureWeights& qw, const Decomposition& dec,
    const GridFunction& u_prev, const ProblemData& data, const DdmConfig& cfg) {
  const int nd = static_cast<int>(dec.subdomains.size());
  NewtonConfig ncfg = cfg.newton;
  ncfg.tol = cfg.newton_tol_factor * grid.spec().h();

  std::vector<GridFunction> results(nd);
  std::vector<NewtonReport> reports(nd);

  const int threads = std::min(cfg.threads, nd);
  if (threads <= 1) {
    for (int i = 0; i < nd; ++i)
      results[i] = solve_subdomain(grid, qw, dec, i, u_prev, data, ncfg, &reports[i]);
  } else {
    NewtonConfig worker_cfg = ncfg;
    worker_cfg.log = nullptr;  // interleaved logs are useless
    std::vector<std::exception_ptr> errors(nd);
    std::atomic<int> next{0};
    auto work = [&]() {
      for (int i = next.fetch_add(1); i < nd; i = next.fetch_add(1)) {
        try {
          results[i] = solve_subdomain(grid, qw, dec, i, u_prev, data, worker_cfg, &reports[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    for (int i = 0; i < nd; ++i)
      if (errors[i]) std::rethrow_exception(errors[i]);
  }

  // weighted average, accumulated in subdomain-index order so the merge
  // is deterministic for any thread count
  GridFunction out(grid, 0.0);
  for (int i = 0; i < nd; ++i)
    for (NodeId node : dec.subdomains[i].nodes)
      out[node] += results[i][node] / dec.weights.multiplicity[node.value];
  for (int b = 0; b < grid.num_boundary(); ++b) out[grid.boundary_node(b)] = data.g[b];
  return {std::move(out), std::move(reports)};
}

double global_residual_norm(const Grid& grid, const QuadratureWeights& qw,
                            const GridFunction& u, const ProblemData& data) {
  double s = 0.0;
  for (int i = 0; i < grid.num_interior(); ++i) {
    const double r = residual(grid, qw, u, data, NodeId{i});
    s += r * r;
  }
  for (int b = 0; b < grid.num_boundary(); ++b) {
    const double r = u[grid.boundary_node(b)] - data.g[b];
    s += r * r;
  }
  return std::sqrt(s);
}

GridFunction quadratic_seed(const Grid& grid, const ProblemData& data) {
  GridFunction u(grid);
  for (int i = 0; i < grid.num_interior(); ++i) {
    const Point p = grid.coord(NodeId{i});
    u[NodeId{i}] = 0.5 * (p.x * p.x + p.y * p.y);
  }
  for (int b = 0; b < grid.num_boundary(); ++b) u[grid.boundary_node(b)] = data.g[b];
  return u;
}

InitialGuess coarse_initialize(const Grid& fine, const ProblemSpec& problem,
                               const ProblemData& fine_data, const DdmConfig& cfg) {
  const int N = fine.spec().N;
  const double L = fine.spec().L;
  const int Nc = std::max((N + 1) / 4 - 1, 1);

  InitialGuess out;
  out.u = quadratic_seed(fine, fine_data);
  if (Nc >= N) return out;  // nothing coarser to solve

  const Grid coarse(DomainSpec{L, Nc});
  const QuadratureWeights cqw = quad_weights(coarse.directions());
  const ProblemData cdata = make_problem_data(coarse, problem);

  std::vector<NodeId> all_interior(coarse.num_interior());
  for (int i = 0; i < coarse.num_interior(); ++i) all_interior[i] = NodeId{i};
  SchemeSystem sys(coarse, cqw, cdata, std::move(all_interior),
                   quadratic_seed(coarse, cdata));

  NewtonConfig ncfg = cfg.newton;
  ncfg.tol = cfg.newton_tol_factor * coarse.spec().h();
  ncfg.log = nullptr;
  NewtonResult solved;
  try {
    solved = newton_solve(
        [&sys](std::span<const double> x) { return sys.residual_at(x); },
        [&sys](std::span<const double> x) { return sys.jacobian_at(x); }, sys.initial(), ncfg);
  } catch (const std::runtime_error&) {
    return out;  // keep the quadratic seed
  }
  out.coarse_newton_iterations = solved.report.iterations;
  if (!solved.report.converged) return out;

  // corner table over the coarse cells, walls carrying the Dirichlet data
  const double hc = coarse.spec().h();
  const int side = Nc + 2;
  std::vector<double> corners(static_cast<std::size_t>(side) * side);
  auto lattice_coord = [&](int k) { return k == 0 ? -L : (k == Nc + 1 ? L : -L + k * hc); };
  for (int iy = 0; iy < side; ++iy) {
    for (int ix = 0; ix < side; ++ix) {
      double v;
      if (ix >= 1 && ix <= Nc && iy >= 1 && iy <= Nc)
        v = solved.u[(iy - 1) * Nc + (ix - 1)];
      else
        v = problem.g({lattice_coord(ix), lattice_coord(iy)});
      corners[iy * side + ix] = v;
    }
  }

  for (int i = 0; i < fine.num_interior(); ++i) {
    const Point p = fine.coord(NodeId{i});
    double tx = (p.x + L) / hc;
    double ty = (p.y + L) / hc;
    int cx = std::min(static_cast<int>(tx), Nc);
    int cy = std::min(static_cast<int>(ty), Nc);
    double ax = tx - cx;
    double ay = ty - cy;
    // snap to the knot so coinciding nodes copy exactly
    if (ax < 1e-9) ax = 0.0;
    if (ax > 1.0 - 1e-9) ax = 1.0;
    if (ay < 1e-9) ay = 0.0;
    if (ay > 1.0 - 1e-9) ay = 1.0;
    const double* row = corners.data() + cy * side + cx;
    out.u[NodeId{i}] = row[0] * (1.0 - ax) * (1.0 - ay) + row[1] * ax * (1.0 - ay) +
                       row[side] * (1.0 - ax) * ay + row[side + 1] * ax * ay;
  }
  out.from_coarse = true;
  return out;
}

DdmResult ddm_solve(const Grid& grid, const QuadratureWeights& qw, const ProblemData& data,
                    const DdmConfig& cfg, GridFunction initial) {
  if (cfg.max_outer < 1 || cfg.newton_tol_factor <= 0.0 || cfg.threads < 1)
    throw std::invalid_argument("bad DDM config");
  const Decomposition dec = decompose(grid, cfg.decomposition);
  const double stop = grid.spec().h();

  DdmResult out;
  out.u = std::move(initial);
  SolveReport& rep = out.report;
  rep.L = grid.spec().L;
  rep.h = grid.spec().h();
  rep.N = grid.spec().N;
  rep.w = grid.spec().width();
  rep.m = cfg.decomposition.m;
  rep.n = cfg.decomposition.n;
  rep.px = cfg.decomposition.px;
  rep.py = cfg.decomposition.py;

  double res = global_residual_norm(grid, qw, out.u, data);
  rep.residual_history.push_back(res);
  while (res >= stop && rep.outer_iterations < cfg.max_outer) {
    auto [u_next, reports] = ddm_iterate(grid, qw, dec, out.u, data, cfg);
    out.u = std::move(u_next);
    for (const NewtonReport& r : reports) {
      rep.total_newton_iterations += r.iterations;
      rep.total_krylov_iterations += r.krylov_total;
    }
    res = global_residual_norm(grid, qw, out.u, data);
    rep.residual_history.push_back(res);
    ++rep.outer_iterations;
    if (cfg.log)
      *cfg.log << "ddm outer " << rep.outer_iterations << ": |F| = " << res << '\n';
  }
  rep.final_residual = res;
  rep.converged = res < stop;
  return out;
}

}  // namespace maddm
