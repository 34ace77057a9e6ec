#include "maddm/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace maddm {

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

SparseMatrix SparseMatrix::from_triplets(int n, std::vector<Triplet> entries) {
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix A;
  A.n_ = n;
  A.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
  A.cols_.reserve(entries.size());
  A.vals_.reserve(entries.size());
  std::size_t k = 0;
  for (int r = 0; r < n; ++r) {
    while (k < entries.size() && entries[k].row == r) {
      const int c = entries[k].col;
      assert(c >= 0 && c < n);
      double v = entries[k].value;
      for (++k; k < entries.size() && entries[k].row == r && entries[k].col == c; ++k)
        v += entries[k].value;
      A.cols_.push_back(c);
      A.vals_.push_back(v);
    }
    A.row_ptr_[r + 1] = A.cols_.size();
  }
  if (k != entries.size()) throw std::invalid_argument("triplet row out of range");
  return A;
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  assert(static_cast<int>(x.size()) == n_ && static_cast<int>(y.size()) == n_);
  for (int r = 0; r < n_; ++r) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += vals_[k] * x[cols_[k]];
    y[r] = s;
  }
}

std::vector<double> SparseMatrix::diagonal() const {
  std::vector<double> d(n_, 0.0);
  for (int r = 0; r < n_; ++r) {
    auto cols = row_cols(r);
    auto vals = row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k)
      if (cols[k] == r) d[r] = vals[k];
  }
  return d;
}

void SparseMatrix::dump(std::ostream& out) const {
  char buf[64];
  for (int r = 0; r < n_; ++r) {
    auto cols = row_cols(r);
    auto vals = row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", r, cols[k], vals[k]);
      out << buf;
    }
  }
}

std::vector<double> spmv(const SparseMatrix& A, std::span<const double> x) {
  std::vector<double> y(x.size());
  A.multiply(x, y);
  return y;
}

KrylovResult gmres_solve(const SparseMatrix& A, std::span<const double> b,
                         const KrylovConfig& cfg) {
  const int n = A.size();
  assert(static_cast<int>(b.size()) == n);
  if (cfg.tol <= 0.0 || cfg.restart < 1) throw std::invalid_argument("bad Krylov config");
  const long max_iter = cfg.max_iter > 0 ? cfg.max_iter : 10L * n;
  const int m = std::min(cfg.restart, n);

  KrylovResult res;
  res.x.assign(n, 0.0);

  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    res.converged = true;
    res.status = KrylovStatus::Converged;
    return res;
  }

  std::vector<double> precond;  // inverse diagonal when Jacobi is on
  if (cfg.jacobi) {
    precond = A.diagonal();
    for (double& d : precond) d = (std::abs(d) > 0.0) ? 1.0 / d : 1.0;
  }
  auto apply_precond = [&](std::vector<double>& v) {
    if (!precond.empty())
      for (int i = 0; i < n; ++i) v[i] *= precond[i];
  };

  std::vector<std::vector<double>> V(m + 1, std::vector<double>(n));
  std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), g(m + 1), y(m), w(n), scratch(n);

  auto update_solution = [&](int k) {
    // back-substitute the k x k triangular system and add the correction;
    // a zero pivot (total breakdown on a singular system) contributes no
    // step in that direction
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H[i][j] * y[j];
      y[i] = H[i][i] != 0.0 ? s / H[i][i] : 0.0;
    }
    std::fill(scratch.begin(), scratch.end(), 0.0);
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < n; ++i) scratch[i] += y[j] * V[j][i];
    apply_precond(scratch);
    for (int i = 0; i < n; ++i) res.x[i] += scratch[i];
  };

  std::vector<double> r(n);
  while (res.iterations < max_iter) {
    A.multiply(res.x, r);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    double rho = norm2(r);
    res.relative_residual = rho / bnorm;
    if (res.relative_residual <= cfg.tol) {
      res.converged = true;
      res.status = KrylovStatus::Converged;
      return res;
    }

    for (int i = 0; i < n; ++i) V[0][i] = r[i] / rho;
    g.assign(m + 1, 0.0);
    g[0] = rho;

    int k = 0;
    bool breakdown = false;
    while (k < m && res.iterations < max_iter) {
      std::copy(V[k].begin(), V[k].end(), w.begin());
      apply_precond(w);
      A.multiply(w, scratch);
      w.swap(scratch);

      // modified Gram-Schmidt; one extra pass when cancellation eats more
      // than half the vector (DGKS criterion)
      const double pre = norm2(w);
      for (int i = 0; i <= k; ++i) {
        const double hik = dot(V[i], w);
        H[i][k] = hik;
        for (int j = 0; j < n; ++j) w[j] -= hik * V[i][j];
      }
      if (norm2(w) < pre / std::sqrt(2.0)) {
        for (int i = 0; i <= k; ++i) {
          const double corr = dot(V[i], w);
          H[i][k] += corr;
          for (int j = 0; j < n; ++j) w[j] -= corr * V[i][j];
        }
      }
      const double hnext = norm2(w);
      H[k + 1][k] = hnext;

      if (hnext <= 1e-14 * rho) {
        breakdown = true;  // invariant subspace reached
      } else {
        for (int i = 0; i < n; ++i) V[k + 1][i] = w[i] / hnext;
      }

      // apply accumulated Givens rotations, then the new one
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H[i][k] + sn[i] * H[i + 1][k];
        H[i + 1][k] = -sn[i] * H[i][k] + cs[i] * H[i + 1][k];
        H[i][k] = t;
      }
      const double denom = std::hypot(H[k][k], H[k + 1][k]);
      cs[k] = denom == 0.0 ? 1.0 : H[k][k] / denom;
      sn[k] = denom == 0.0 ? 0.0 : H[k + 1][k] / denom;
      H[k][k] = denom;
      H[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];

      ++k;
      ++res.iterations;
      const double est = std::abs(g[k]);
      res.residual_history.push_back(est / bnorm);

      if (est / bnorm <= cfg.tol || breakdown) break;
    }

    update_solution(k);

    A.multiply(res.x, r);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    res.relative_residual = norm2(r) / bnorm;
    if (res.relative_residual <= cfg.tol) {
      res.converged = true;
      res.status = KrylovStatus::Converged;
      return res;
    }
    if (breakdown) {
      res.status = KrylovStatus::Breakdown;
      return res;
    }
  }
  res.status = KrylovStatus::MaxIterations;
  return res;
}

}  // namespace maddm
