#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace maddm {

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);

/// Square sparse matrix in compressed-sparse-row form. Column indices are
/// sorted and unique within each row.
class SparseMatrix {
 public:
  struct Triplet {
    int row;
    int col;
    double value;
  };

  SparseMatrix() = default;

  /// Builds from an unordered triplet list; duplicate positions are summed.
  static SparseMatrix from_triplets(int n, std::vector<Triplet> entries);

  int size() const { return n_; }
  std::size_t nnz() const { return cols_.size(); }

  std::span<const int> row_cols(int i) const {
    return {cols_.data() + row_ptr_[i], cols_.data() + row_ptr_[i + 1]};
  }
  std::span<const double> row_values(int i) const {
    return {vals_.data() + row_ptr_[i], vals_.data() + row_ptr_[i + 1]};
  }

  /// y = A x, deterministic row-major accumulation.
  void multiply(std::span<const double> x, std::span<double> y) const;

  std::vector<double> diagonal() const;

  /// Matrix-market-style text dump: one "row col value" line per entry.
  void dump(std::ostream& out) const;

 private:
  int n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<int> cols_;
  std::vector<double> vals_;
};

std::vector<double> spmv(const SparseMatrix& A, std::span<const double> x);

struct KrylovConfig {
  double tol = 1e-5;    // relative residual target ||b - Ax|| / ||b||
  int restart = 30;     // Arnoldi basis size per cycle
  long max_iter = 0;    // total inner iterations; 0 means 10n
  bool jacobi = false;  // diagonal right preconditioning
};

enum class KrylovStatus { Converged, MaxIterations, Breakdown };

struct KrylovResult {
  std::vector<double> x;
  bool converged = false;
  long iterations = 0;
  KrylovStatus status = KrylovStatus::MaxIterations;
  double relative_residual = 0.0;
  std::vector<double> residual_history;  // estimate per inner iteration
};

/// Restarted GMRES with modified Gram-Schmidt and selective
/// reorthogonalization. Deterministic for fixed inputs and config.
KrylovResult gmres_solve(const SparseMatrix& A, std::span<const double> b,
                         const KrylovConfig& cfg = {});

}  // namespace maddm
