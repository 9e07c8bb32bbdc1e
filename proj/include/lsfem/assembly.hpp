#pragma once

#include <functional>

#include "lsfem/linalg.hpp"
#include "lsfem/problems.hpp"
#include "lsfem/quadrature.hpp"
#include "lsfem/spaces.hpp"

namespace lsfem {

/// Visits quadrature points of element t in reference coordinates:
/// cb(xhat, w_ref), where w_ref is the reference-measure weight (multiply
/// by det J for the physical measure). When split_x0 is set, cells that
/// touch the line x = 0 are recursively quartered up to `levels` times
/// (graded: only sub-cells still touching the line keep splitting).
void for_each_quad_point(
    const Mesh& mesh, int t, const QuadratureRule& rule, bool split_x0,
    int levels, const std::function<void(const Eigen::Vector2d&, double)>& cb);

/// Least-squares system over the concatenated DOF vector, flux block
/// first, scalar free block second. Dirichlet scalar DOFs are eliminated.
struct SparseSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  int n_flux = 0;
  int n_scalar_free = 0;
};

struct AssemblyOptions {
  int quad_degree = -1;      // default: 2*max(k+1, m) + 2
  int singular_levels = 20;  // graded split depth for data singular at x=0
  bool sequential = false;
  int threads = 0;  // 0: LSFEM_THREADS env var, else hardware concurrency
  /// Optional inhomogeneous Dirichlet values (nodal lifting); nullptr = zero.
  const ScalarField* dirichlet = nullptr;
};

SparseSystem assemble(const FluxSpace& flux, const ScalarSpace& scalar,
                      const Problem& problem, const AssemblyOptions& opts = {});

struct Solution {
  Eigen::VectorXd flux;         // flux coefficients
  Eigen::VectorXd scalar_full;  // scalar coefficients incl. boundary values
  SolveReport report;
};

Solution solve_lsfem(const FluxSpace& flux, const ScalarSpace& scalar,
                     const Problem& problem, const AssemblyOptions& opts = {},
                     double tol = 1e-11);

int default_thread_count();

}  // namespace lsfem
