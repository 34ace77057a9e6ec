// Test-only oracles, independent of the implementation paths they check.
#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "maddm/grid.hpp"
#include "maddm/linalg.hpp"

namespace oracle {

/// Dense Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> A,
                                       std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
    std::swap(A[k], A[piv]);
    std::swap(b[k], b[piv]);
    if (A[k][k] == 0.0) throw std::runtime_error("dense_solve: singular matrix");
    for (int i = k + 1; i < n; ++i) {
      const double f = A[i][k] / A[k][k];
      for (int j = k; j < n; ++j) A[i][j] -= f * A[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
    x[i] = s / A[i][i];
  }
  return x;
}

inline std::vector<double> dense_matvec(const std::vector<std::vector<double>>& A,
                                        const std::vector<double>& x) {
  std::vector<double> y(A.size(), 0.0);
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += A[i][j] * x[j];
  return y;
}

inline std::vector<std::vector<double>> to_dense(const maddm::SparseMatrix& A) {
  std::vector<std::vector<double>> D(A.size(), std::vector<double>(A.size(), 0.0));
  for (int r = 0; r < A.size(); ++r) {
    auto cols = A.row_cols(r);
    auto vals = A.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) D[r][cols[k]] = vals[k];
  }
  return D;
}

/// Richardson-extrapolated second-order central differences: second
/// derivative of a bivariate function along (dx1,dy1) x (dx2,dy2).
inline double second_partial(const std::function<double(double, double)>& f, double x,
                             double y, int c1, int c2, double step) {
  auto once = [&](double s) {
    if (c1 == c2) {
      const double dx = c1 == 0 ? s : 0.0, dy = c1 == 1 ? s : 0.0;
      return (f(x + dx, y + dy) - 2.0 * f(x, y) + f(x - dx, y - dy)) / (s * s);
    }
    return (f(x + s, y + s) - f(x + s, y - s) - f(x - s, y + s) + f(x - s, y - s)) /
           (4.0 * s * s);
  };
  const double a1 = once(step), a2 = once(step / 2.0), a3 = once(step / 4.0);
  const double r1 = (4.0 * a2 - a1) / 3.0, r2 = (4.0 * a3 - a2) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

/// det(D^2 f) at (x, y) by numeric differentiation.
inline double hessian_det(const std::function<double(double, double)>& f, double x, double y,
                          double step) {
  const double fxx = second_partial(f, x, y, 0, 0, step);
  const double fyy = second_partial(f, x, y, 1, 1, step);
  const double fxy = second_partial(f, x, y, 0, 1, step);
  return fxx * fyy - fxy * fxy;
}

/// Dense Jacobian of a vector map by central differences.
inline std::vector<std::vector<double>> fd_jacobian(
    const std::function<std::vector<double>(std::span<const double>)>& residual,
    std::vector<double> x, double step) {
  const std::size_t n = x.size();
  const std::size_t m = residual(x).size();
  std::vector<std::vector<double>> J(m, std::vector<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const double keep = x[j];
    x[j] = keep + step;
    const std::vector<double> fp = residual(x);
    x[j] = keep - step;
    const std::vector<double> fm = residual(x);
    x[j] = keep;
    for (std::size_t i = 0; i < m; ++i) J[i][j] = (fp[i] - fm[i]) / (2.0 * step);
  }
  return J;
}

/// Brute-force count of supplemental boundary nodes: walk every
/// (interior node, signed direction) ray to the wall in floating point
/// and deduplicate coordinates with the stated tolerance. Independent of
/// the grid's exact-arithmetic construction.
inline int count_boundary_nodes(double L, int N, int w) {
  const double h = 2.0 * L / (N + 1);
  const maddm::DirectionSet dirs = maddm::build_directions(w);
  std::vector<std::pair<double, double>> hits;
  for (int iy = 1; iy <= N; ++iy) {
    for (int ix = 1; ix <= N; ++ix) {
      const double x = -L + ix * h, y = -L + iy * h;
      for (int j = 0; j < dirs.count(); ++j) {
        for (int sgn : {+1, -1}) {
          const int nx = ix + sgn * dirs.offsets[j][0], ny = iy + sgn * dirs.offsets[j][1];
          if (nx >= 1 && nx <= N && ny >= 1 && ny <= N) continue;
          const double ex = sgn * dirs.offsets[j][0], ey = sgn * dirs.offsets[j][1];
          double s = 1.0;
          if (ex > 0) s = std::min(s, (L - x) / (h * ex));
          if (ex < 0) s = std::min(s, (-L - x) / (h * ex));
          if (ey > 0) s = std::min(s, (L - y) / (h * ey));
          if (ey < 0) s = std::min(s, (-L - y) / (h * ey));
          hits.push_back({x + s * h * ex, y + s * h * ey});
        }
      }
    }
  }
  const double tol = 1e-12 * L;
  std::vector<std::pair<double, double>> kept;
  for (const auto& p : hits) {
    bool seen = false;
    for (const auto& q : kept) {
      if (std::abs(p.first - q.first) <= tol && std::abs(p.second - q.second) <= tol) {
        seen = true;
        break;
      }
    }
    if (!seen) kept.push_back(p);
  }
  return static_cast<int>(kept.size());
}

}  // namespace oracle
