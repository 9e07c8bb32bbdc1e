#pragma once

#include <functional>

#include <Eigen/Dense>

#include "lsfem/problems.hpp"
#include "lsfem/spaces.hpp"

namespace lsfem {

/// Discontinuous piecewise polynomial: per-element coefficients in scaled
/// local monomials of (x - centroid) / diameter.
struct PiecewisePoly {
  int degree = 0;
  Eigen::MatrixXd coeffs;  // (monomial_count(degree) x T)

  double eval(const Mesh& mesh, int t, const Eigen::Vector2d& x) const;
  Eigen::Vector2d eval_grad(const Mesh& mesh, int t, const Eigen::Vector2d& x) const;
};

/// Elementwise L2 projection onto P_degree(T). split_x0 enables graded
/// quadrature toward the line x = 0 for singular integrands.
PiecewisePoly l2_project(const ScalarField& f, const Mesh& mesh, int degree,
                         int quad_degree = 20, bool split_x0 = false,
                         int split_levels = 20);

/// Canonical RT/BDM interpolation (edge + interior moments); satisfies the
/// commuting-diagram identity with the elementwise L2 projection of the
/// divergence.
Eigen::VectorXd hdiv_interpolate(const FluxSpace& space, const VectorField& q,
                                 int quad_degree = 20, bool split_x0 = false,
                                 int split_levels = 20);

/// Sigma-weighted Ritz projection onto the scalar space: the returned full
/// coefficient vector solves (sigma grad w_h, grad v_h) = (sigma grad_u,
/// grad v_h) for all v_h, with homogeneous Dirichlet values.
Eigen::VectorXd elliptic_project(const ScalarSpace& space, const VectorField& grad_u,
                                 const ScalarField& sigma, double tol = 1e-12,
                                 int quad_degree = -1, bool split_x0 = false,
                                 int split_levels = 20);

}  // namespace lsfem
