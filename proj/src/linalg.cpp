#include "lsfem/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace lsfem {

SparseMatrix SparseMatrix::from_triplets(
    int n, std::vector<std::tuple<int, int, double>> triplets) {
  std::sort(triplets.begin(), triplets.end(),
            [](const auto& a, const auto& b) {
              if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
              return std::get<1>(a) < std::get<1>(b);
            });
  SparseMatrix m;
  m.n = n;
  m.row_ptr.assign(n + 1, 0);
  for (size_t i = 0; i < triplets.size();) {
    const int r = std::get<0>(triplets[i]);
    const int c = std::get<1>(triplets[i]);
    double v = 0.0;
    while (i < triplets.size() && std::get<0>(triplets[i]) == r &&
           std::get<1>(triplets[i]) == c) {
      v += std::get<2>(triplets[i]);
      ++i;
    }
    m.col.push_back(c);
    m.val.push_back(v);
    m.row_ptr[r + 1] = static_cast<int>(m.col.size());
  }
  for (int r = 0; r < n; ++r)
    m.row_ptr[r + 1] = std::max(m.row_ptr[r + 1], m.row_ptr[r]);
  return m;
}

Eigen::VectorXd SparseMatrix::multiply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (int r = 0; r < n; ++r) {
    double s = 0.0;
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k] * x[col[k]];
    y[r] = s;
  }
  return y;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < n; ++r)
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) d(r, col[k]) += val[k];
  return d;
}

double SparseMatrix::symmetry_error() const {
  // Build a transposed copy and compare entrywise.
  std::vector<std::tuple<int, int, double>> t;
  t.reserve(val.size());
  for (int r = 0; r < n; ++r)
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      t.emplace_back(col[k], r, val[k]);
  SparseMatrix at = from_triplets(n, std::move(t));
  double err = 0.0;
  for (int r = 0; r < n; ++r) {
    int ka = row_ptr[r], kb = at.row_ptr[r];
    while (ka < row_ptr[r + 1] || kb < at.row_ptr[r + 1]) {
      int ca = ka < row_ptr[r + 1] ? col[ka] : n;
      int cb = kb < at.row_ptr[r + 1] ? at.col[kb] : n;
      if (ca == cb) {
        err = std::max(err, std::abs(val[ka] - at.val[kb]));
        ++ka;
        ++kb;
      } else if (ca < cb) {
        err = std::max(err, std::abs(val[ka]));
        ++ka;
      } else {
        err = std::max(err, std::abs(at.val[kb]));
        ++kb;
      }
    }
  }
  return err;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : val) m = std::max(m, std::abs(v));
  return m;
}

std::pair<Eigen::VectorXd, SolveReport> solve_spd(const SparseMatrix& a,
                                                  const Eigen::VectorXd& b,
                                                  double tol) {
  const int n = a.n;
  SolveReport report;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    report.method = "pcg-jacobi";
    report.success = true;
    return {Eigen::VectorXd::Zero(n), report};
  }

  Eigen::VectorXd diag_inv(n);
  for (int r = 0; r < n; ++r) {
    double d = 0.0;
    for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
      if (a.col[k] == r) d = a.val[k];
    if (d <= 0.0)
      throw std::runtime_error("solve_spd: non-positive diagonal at row " +
                               std::to_string(r));
    diag_inv[r] = 1.0 / d;
  }

  // Variable-coefficient systems on fine meshes can need well over the
  // typical O(sqrt(n)) iteration count, so the cap is generous; the dense
  // fallback below still catches genuinely stalled small systems.
  const int max_iter = static_cast<int>(200.0 * std::sqrt(static_cast<double>(n))) + 1000;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = diag_inv.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  report.method = "pcg-jacobi";
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd ap = a.multiply(p);
    const double pap = p.dot(ap);
    if (!std::isfinite(pap) || pap <= 0.0)
      throw std::runtime_error("solve_spd: non-finite or non-positive curvature");
    const double alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    report.iterations = it + 1;
    const double res = r.norm() / bnorm;
    if (res <= tol) {
      // True residual check guards against drift in the recurrence.
      const double true_res = (b - a.multiply(x)).norm() / bnorm;
      report.rel_residual = true_res;
      if (true_res <= 10.0 * tol) {
        report.success = true;
        return {x, report};
      }
    }
    z = diag_inv.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  report.rel_residual = (b - a.multiply(x)).norm() / bnorm;

  if (n <= 2000) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(a.to_dense());
    Eigen::VectorXd xd = ldlt.solve(b);
    SolveReport dr;
    dr.method = "dense-ldlt";
    dr.iterations = report.iterations;
    dr.rel_residual = (b - a.multiply(xd)).norm() / bnorm;
    dr.success = dr.rel_residual <= 100.0 * tol;
    if (dr.success) return {xd, dr};
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", report.rel_residual);
  throw std::runtime_error(std::string("solve_spd: max iterations exceeded, "
                                       "achieved residual ") + buf);
}

std::pair<double, double> eigen_extrema_dense(const SparseMatrix& a) {
  if (a.n > 2000)
    throw std::runtime_error("eigen_extrema_dense: size exceeds dense limit (2000)");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.to_dense(),
                                                    Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

void write_matrix_market(const SparseMatrix& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_matrix_market: cannot open " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.n << " " << a.n << " " << a.nnz() << "\n";
  out.precision(17);
  for (int r = 0; r < a.n; ++r)
    for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
      out << r + 1 << " " << a.col[k] + 1 << " " << a.val[k] << "\n";
}

}  // namespace lsfem
