#include "maddm/newton.hpp"

#include <cassert>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace maddm {

NewtonResult newton_solve(const ResidualFn& residual_fn, const JacobianFn& jacobian_fn,
                          std::vector<double> u0, const NewtonConfig& cfg) {
  if (cfg.tol <= 0.0 || cfg.max_iter < 1 || cfg.armijo <= 0.0 || cfg.lambda_min <= 0.0 ||
      cfg.lambda_min >= 1.0)
    throw std::invalid_argument("bad Newton config");
  NewtonResult out;
  out.u = std::move(u0);
  NewtonReport& rep = out.report;

  std::vector<double> F = residual_fn(out.u);
  const int n = static_cast<int>(F.size());
  assert(static_cast<int>(out.u.size()) == n);
  double nrm = norm2(F);
  rep.residual_history.push_back(nrm);

  std::vector<double> trial(n);
  while (nrm >= cfg.tol && rep.iterations < cfg.max_iter) {
    const SparseMatrix J = jacobian_fn(out.u);
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = -F[i];
    KrylovResult lin = gmres_solve(J, rhs, cfg.krylov);
    rep.krylov_total += lin.iterations;
    for (double v : lin.x)
      if (!std::isfinite(v))
        throw std::runtime_error("newton_solve: linear solve produced a non-finite step");

    double lambda = 1.0;
    std::vector<double> F_trial;
    double nrm_trial = 0.0;
    bool accepted = false;
    while (lambda >= cfg.lambda_min) {
      for (int i = 0; i < n; ++i) trial[i] = out.u[i] + lambda * lin.x[i];
      F_trial = residual_fn(trial);
      nrm_trial = norm2(F_trial);
      if (nrm_trial <= (1.0 - cfg.armijo * lambda) * nrm) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      // the kinks of a nonsmooth residual can defeat the decrease test;
      // take the full step and keep going
      lambda = 1.0;
      for (int i = 0; i < n; ++i) trial[i] = out.u[i] + lin.x[i];
      F_trial = residual_fn(trial);
      nrm_trial = norm2(F_trial);
      ++rep.linesearch_fallbacks;
    }

    out.u.swap(trial);
    F.swap(F_trial);
    nrm = nrm_trial;
    ++rep.iterations;
    rep.residual_history.push_back(nrm);
    if (cfg.log) {
      *cfg.log << "newton iter " << rep.iterations << ": |F| = " << nrm
               << ", lambda = " << lambda << ", krylov = " << lin.iterations << '\n';
    }
  }

  rep.final_residual = nrm;
  rep.converged = nrm < cfg.tol;
  return out;
}

}  // namespace maddm
