#pragma once

#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

namespace lsfem {

/// Symmetric sparse matrix in CSR form.
struct SparseMatrix {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  static SparseMatrix from_triplets(int n,
                                    std::vector<std::tuple<int, int, double>> triplets);

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd to_dense() const;

  /// max_ij |A - A^T| (structural pass over stored entries).
  double symmetry_error() const;
  double max_abs() const;
  int nnz() const { return static_cast<int>(val.size()); }
};

struct SolveReport {
  int iterations = 0;
  double rel_residual = 0.0;
  std::string method;
  bool success = false;
};

/// Jacobi-preconditioned conjugate gradients with deterministic
/// (sequential) accumulation. Falls back to a dense Cholesky factorization
/// for n <= 2000 if CG fails to reach the tolerance within 20*sqrt(n)+200
/// iterations; throws above that size.
std::pair<Eigen::VectorXd, SolveReport> solve_spd(const SparseMatrix& a,
                                                  const Eigen::VectorXd& b,
                                                  double tol = 1e-11);

/// Extreme eigenvalues via a dense symmetric eigensolve (test support,
/// n <= 2000).
std::pair<double, double> eigen_extrema_dense(const SparseMatrix& a);

/// MatrixMarket coordinate format (general symmetric entries written fully).
void write_matrix_market(const SparseMatrix& a, const std::string& path);

}  // namespace lsfem
