#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "maddm/linalg.hpp"
#include "oracles.hpp"

using namespace maddm;

namespace {

SparseMatrix identity(int n) {
  std::vector<SparseMatrix::Triplet> t;
  for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return SparseMatrix::from_triplets(n, std::move(t));
}

// diagonally dominant random matrix with ~35% fill
SparseMatrix random_system(int n, unsigned seed, std::vector<std::vector<double>>* dense) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_real_distribution<double> pick(0.0, 1.0);
  std::vector<SparseMatrix::Triplet> t;
  dense->assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j || pick(rng) > 0.35) continue;
      const double v = val(rng);
      t.push_back({i, j, v});
      (*dense)[i][j] = v;
      off += std::abs(v);
    }
    const double d = off + 1.0;
    t.push_back({i, i, d});
    (*dense)[i][i] = d;
  }
  return SparseMatrix::from_triplets(n, std::move(t));
}

}  // namespace

TEST_CASE("triplet assembly sorts, merges and stores rows compactly") {
  SparseMatrix A = SparseMatrix::from_triplets(
      3, {{2, 0, 1.0}, {0, 2, 3.0}, {0, 0, 1.0}, {0, 2, -1.0}, {1, 1, 5.0}});
  CHECK(A.size() == 3);
  CHECK(A.nnz() == 4);
  auto cols = A.row_cols(0);
  REQUIRE(cols.size() == 2);
  CHECK(cols[0] == 0);
  CHECK(cols[1] == 2);
  CHECK(A.row_values(0)[1] == 2.0);  // 3 - 1 accumulated

  std::ostringstream os;
  A.dump(os);
  CHECK(os.str() == "0 0 1\n0 2 2\n1 1 5\n2 0 1\n");
}

TEST_CASE("spmv basics") {
  SUBCASE("identity") {
    const SparseMatrix I = identity(4);
    const std::vector<double> x{1.0, -2.0, 3.5, 0.0};
    CHECK(spmv(I, x) == x);
  }
  SUBCASE("diagonal") {
    SparseMatrix D =
        SparseMatrix::from_triplets(3, {{0, 0, 1.0}, {1, 1, 2.0}, {2, 2, 3.0}});
    const std::vector<double> ones{1.0, 1.0, 1.0};
    const std::vector<double> y = spmv(D, ones);
    CHECK(y == std::vector<double>{1.0, 2.0, 3.0});
  }
  SUBCASE("random 5x5 against the dense oracle") {
    std::vector<std::vector<double>> dense;
    const SparseMatrix A = random_system(5, 17, &dense);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::vector<double> x(5);
    for (double& v : x) v = val(rng);
    const std::vector<double> ys = spmv(A, x);
    const std::vector<double> yd = oracle::dense_matvec(dense, x);
    for (int i = 0; i < 5; ++i) CHECK(ys[i] == doctest::Approx(yd[i]).epsilon(1e-14));
  }
}

TEST_CASE("gmres solves trivial systems") {
  SUBCASE("identity in one iteration") {
    const SparseMatrix I = identity(6);
    std::vector<double> b{1, 2, 3, 4, 5, 6};
    const KrylovResult r = gmres_solve(I, b);
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    for (int i = 0; i < 6; ++i) CHECK(r.x[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
  SUBCASE("diagonal system is solved exactly") {
    SparseMatrix D = SparseMatrix::from_triplets(2, {{0, 0, 2.0}, {1, 1, 4.0}});
    const KrylovResult r = gmres_solve(D, std::vector<double>{2.0, 4.0});
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.relative_residual <= 1e-12);
  }
  SUBCASE("zero right-hand side") {
    const KrylovResult r = gmres_solve(identity(3), std::vector<double>{0.0, 0.0, 0.0});
    CHECK(r.converged);
    CHECK(r.iterations == 0);
    CHECK(r.x == std::vector<double>{0.0, 0.0, 0.0});
  }
}

TEST_CASE("gmres matches the dense LU oracle on a random 20x20 system") {
  std::vector<std::vector<double>> dense;
  const SparseMatrix A = random_system(20, 11, &dense);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<double> b(20);
  for (double& v : b) v = val(rng);

  KrylovConfig cfg;
  cfg.tol = 1e-10;
  const KrylovResult r = gmres_solve(A, b, cfg);
  REQUIRE(r.converged);

  const std::vector<double> x_star = oracle::dense_solve(dense, b);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 20; ++i) {
    num += (r.x[i] - x_star[i]) * (r.x[i] - x_star[i]);
    den += x_star[i] * x_star[i];
  }
  CHECK(std::sqrt(num / den) <= 1e-4);
}

TEST_CASE("gmres recovers a known solution through b = A x") {
  std::vector<std::vector<double>> dense;
  const SparseMatrix A = random_system(30, 23, &dense);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  std::vector<double> x_true(30);
  for (double& v : x_true) v = val(rng);
  const std::vector<double> b = spmv(A, x_true);

  for (bool jacobi : {false, true}) {
    KrylovConfig cfg;
    cfg.tol = 1e-9;
    cfg.jacobi = jacobi;
    const KrylovResult r = gmres_solve(A, b, cfg);
    REQUIRE(r.converged);
    // diagonally dominant, so the condition number is mild
    for (int i = 0; i < 30; ++i) CHECK(r.x[i] == doctest::Approx(x_true[i]).epsilon(1e-6));
  }
}

TEST_CASE("residual estimates are non-increasing within a restart cycle") {
  std::vector<std::vector<double>> dense;
  const SparseMatrix A = random_system(40, 31, &dense);
  std::vector<double> b(40, 1.0);
  KrylovConfig cfg;
  cfg.tol = 1e-12;
  cfg.restart = 40;  // single cycle
  const KrylovResult r = gmres_solve(A, b, cfg);
  REQUIRE(r.residual_history.size() >= 2);
  for (std::size_t i = 1; i < r.residual_history.size(); ++i)
    CHECK(r.residual_history[i] <= r.residual_history[i - 1] * (1.0 + 1e-12));
}

TEST_CASE("max iteration cap reports failure with the best iterate") {
  std::vector<std::vector<double>> dense;
  const SparseMatrix A = random_system(25, 41, &dense);
  std::vector<double> b(25, 1.0);
  KrylovConfig cfg;
  cfg.tol = 1e-14;
  cfg.restart = 2;
  cfg.max_iter = 4;
  const KrylovResult r = gmres_solve(A, b, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.status == KrylovStatus::MaxIterations);
  CHECK(r.iterations == 4);
  // the returned iterate is still an improvement over x = 0
  CHECK(r.relative_residual < 1.0);
}

TEST_CASE("breakdown on a singular system returns the best iterate") {
  // rank-deficient diagonal: the Krylov space closes after two steps with
  // a nonzero least-squares residual
  SparseMatrix A = SparseMatrix::from_triplets(2, {{0, 0, 1.0}, {1, 1, 0.0}});
  const std::vector<double> b{1.0, 1.0};
  const KrylovResult r = gmres_solve(A, b);
  CHECK_FALSE(r.converged);
  CHECK(r.status == KrylovStatus::Breakdown);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.relative_residual == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));

  // nullspace right-hand side: total breakdown at the first step
  const std::vector<double> b2{0.0, 1.0};
  const KrylovResult r2 = gmres_solve(A, b2);
  CHECK_FALSE(r2.converged);
  for (double v : r2.x) CHECK(std::isfinite(v));
}

TEST_CASE("gmres is deterministic") {
  std::vector<std::vector<double>> dense;
  const SparseMatrix A = random_system(15, 53, &dense);
  std::vector<double> b(15, 0.7);
  const KrylovResult r1 = gmres_solve(A, b);
  const KrylovResult r2 = gmres_solve(A, b);
  CHECK(r1.iterations == r2.iterations);
  CHECK(r1.x == r2.x);
}
