#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "maddm/newton.hpp"
#include "oracles.hpp"

using namespace maddm;

TEST_CASE("affine residual converges in one Newton iteration") {
  // F(u) = A u - b with a fixed diagonally dominant A
  std::vector<SparseMatrix::Triplet> t{{0, 0, 4.0}, {0, 1, 1.0}, {1, 0, -1.0},
                                       {1, 1, 5.0}, {2, 2, 3.0}, {1, 2, 0.5}};
  const SparseMatrix A = SparseMatrix::from_triplets(3, std::move(t));
  const std::vector<double> b{1.0, 2.0, 3.0};

  const ResidualFn residual = [&](std::span<const double> u) {
    std::vector<double> F = spmv(A, u);
    for (std::size_t i = 0; i < F.size(); ++i) F[i] -= b[i];
    return F;
  };
  const JacobianFn jacobian = [&](std::span<const double>) { return A; };

  NewtonConfig cfg;
  cfg.tol = 1e-10;
  cfg.krylov.tol = 1e-12;
  const NewtonResult r = newton_solve(residual, jacobian, {0.0, 0.0, 0.0}, cfg);
  CHECK(r.report.converged);
  CHECK(r.report.iterations == 1);
  CHECK(r.report.residual_history.size() == 2);

  const std::vector<double> F = residual(r.u);
  CHECK(norm2(F) < 1e-9);
}

TEST_CASE("scalar cubic u^3 = 8 from u0 = 3") {
  const ResidualFn residual = [](std::span<const double> u) {
    return std::vector<double>{u[0] * u[0] * u[0] - 8.0};
  };
  const JacobianFn jacobian = [](std::span<const double> u) {
    return SparseMatrix::from_triplets(1, {{0, 0, 3.0 * u[0] * u[0]}});
  };
  NewtonConfig cfg;
  cfg.tol = 1e-10;
  cfg.krylov.tol = 1e-14;
  const NewtonResult r = newton_solve(residual, jacobian, {3.0}, cfg);
  CHECK(r.report.converged);
  CHECK(r.report.iterations <= 10);
  CHECK(r.u[0] == doctest::Approx(2.0).epsilon(1e-8));

  // classical Newton iterates computed by hand: u <- u - (u^3-8)/(3u^2)
  double u = 3.0;
  std::vector<double> expected;
  for (int k = 0; k < r.report.iterations; ++k) {
    u = u - (u * u * u - 8.0) / (3.0 * u * u);
    expected.push_back(u);
  }
  // the backtracking solver takes full steps here, matching the classical
  // sequence to linear-solver accuracy
  CHECK(r.u[0] == doctest::Approx(expected.back()).epsilon(1e-10));
}

TEST_CASE("already-converged start returns zero iterations") {
  const ResidualFn residual = [](std::span<const double> u) {
    return std::vector<double>{u[0] - 1.0};
  };
  const JacobianFn jacobian = [](std::span<const double>) {
    return SparseMatrix::from_triplets(1, {{0, 0, 1.0}});
  };
  NewtonConfig cfg;
  cfg.tol = 1e-3;
  const NewtonResult r = newton_solve(residual, jacobian, {1.0 + 1e-5}, cfg);
  CHECK(r.report.converged);
  CHECK(r.report.iterations == 0);
  CHECK(r.report.residual_history.size() == 1);
}

TEST_CASE("max iterations returns the best iterate unconverged") {
  // residual with no root: F(u) = u^2 + 1
  const ResidualFn residual = [](std::span<const double> u) {
    return std::vector<double>{u[0] * u[0] + 1.0};
  };
  const JacobianFn jacobian = [](std::span<const double> u) {
    return SparseMatrix::from_triplets(1, {{0, 0, std::max(2.0 * u[0], 0.1)}});
  };
  NewtonConfig cfg;
  cfg.tol = 1e-10;
  cfg.max_iter = 5;
  const NewtonResult r = newton_solve(residual, jacobian, {2.0}, cfg);
  CHECK_FALSE(r.report.converged);
  CHECK(r.report.iterations == 5);
  CHECK(r.report.residual_history.size() == 6);
  CHECK(std::isfinite(r.report.final_residual));
}

TEST_CASE("backtracking tames the overshoot of atan(u) = 0 from u0 = 3") {
  // undamped Newton diverges here; the damped iteration must not
  const ResidualFn residual = [](std::span<const double> u) {
    return std::vector<double>{std::atan(u[0])};
  };
  const JacobianFn jacobian = [](std::span<const double> u) {
    return SparseMatrix::from_triplets(1, {{0, 0, 1.0 / (1.0 + u[0] * u[0])}});
  };
  NewtonConfig cfg;
  cfg.tol = 1e-10;
  cfg.krylov.tol = 1e-14;
  const NewtonResult r = newton_solve(residual, jacobian, {3.0}, cfg);
  REQUIRE(r.report.converged);
  CHECK(std::abs(r.u[0]) < 1e-9);
  const auto& hist = r.report.residual_history;
  REQUIRE(r.report.linesearch_fallbacks == 0);
  for (std::size_t k = 1; k < hist.size(); ++k)
    CHECK(hist[k] <= (1.0 - 1e-4) * hist[k - 1] + 1e-15);
}

TEST_CASE("newton_solve is deterministic") {
  const ResidualFn residual = [](std::span<const double> u) {
    return std::vector<double>{std::sin(u[0]) + 0.4, u[1] * u[1] - 2.0};
  };
  const JacobianFn jacobian = [](std::span<const double> u) {
    return SparseMatrix::from_triplets(2,
                                       {{0, 0, std::cos(u[0])}, {1, 1, 2.0 * u[1]}});
  };
  const NewtonResult a = newton_solve(residual, jacobian, {0.1, 1.0}, {});
  const NewtonResult b = newton_solve(residual, jacobian, {0.1, 1.0}, {});
  CHECK(a.u == b.u);
  CHECK(a.report.residual_history == b.report.residual_history);
}
