#include "lsfem/projections.hpp"

#include <stdexcept>

#include "lsfem/assembly.hpp"
#include "lsfem/linalg.hpp"
#include "lsfem/quadrature.hpp"

namespace lsfem {

double PiecewisePoly::eval(const Mesh& mesh, int t, const Eigen::Vector2d& x) const {
  const ElementGeometry g = element_geometry(mesh, t);
  Eigen::VectorXd mono;
  monomial_eval(degree, (x - g.centroid) / g.diameter, mono);
  return mono.dot(coeffs.col(t));
}

Eigen::Vector2d PiecewisePoly::eval_grad(const Mesh& mesh, int t,
                                         const Eigen::Vector2d& x) const {
  const ElementGeometry g = element_geometry(mesh, t);
  Eigen::VectorXd mono;
  Eigen::Matrix<double, Eigen::Dynamic, 2> mono_grad;
  monomial_eval_grad(degree, (x - g.centroid) / g.diameter, mono, mono_grad);
  return (mono_grad.transpose() * coeffs.col(t)) / g.diameter;
}

PiecewisePoly l2_project(const ScalarField& f, const Mesh& mesh, int degree,
                         int quad_degree, bool split_x0, int split_levels) {
  const int nm = monomial_count(degree);
  PiecewisePoly proj;
  proj.degree = degree;
  proj.coeffs.resize(nm, mesh.num_triangles());
  const QuadratureRule rule = triangle_rule(std::min(quad_degree, 24));
  Eigen::VectorXd mono;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(nm, nm);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nm);
    for_each_quad_point(mesh, t, rule, split_x0, split_levels,
                        [&](const Eigen::Vector2d& xhat, double wref) {
                          const Eigen::Vector2d x = g.origin + g.jac * xhat;
                          monomial_eval(degree, (x - g.centroid) / g.diameter, mono);
                          const double w = wref * g.det;
                          mass += w * mono * mono.transpose();
                          rhs += (w * f(x)) * mono;
                        });
    proj.coeffs.col(t) = mass.ldlt().solve(rhs);
  }
  return proj;
}

Eigen::VectorXd hdiv_interpolate(const FluxSpace& space, const VectorField& q,
                                 int quad_degree, bool split_x0, int split_levels) {
  return space.interpolate(q, quad_degree, split_x0, split_levels);
}

Eigen::VectorXd elliptic_project(const ScalarSpace& space, const VectorField& grad_u,
                                 const ScalarField& sigma, double tol,
                                 int quad_degree, bool split_x0, int split_levels) {
  const Mesh& mesh = space.mesh();
  const int ns = space.element().dim();
  const int qdeg = quad_degree > 0 ? quad_degree : 2 * space.order() + 8;
  const QuadratureRule rule = triangle_rule(std::min(qdeg, 24));

  std::vector<std::tuple<int, int, double>> triplets;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.dim_free());
  Eigen::VectorXd sv;
  Eigen::Matrix<double, Eigen::Dynamic, 2> sg;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(ns, ns);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(ns);
    for_each_quad_point(mesh, t, rule, split_x0, split_levels,
                        [&](const Eigen::Vector2d& xhat, double wref) {
                          const Eigen::Vector2d x = g.origin + g.jac * xhat;
                          space.eval_basis(t, xhat, sv, sg);
                          const double w = wref * g.det * sigma(x);
                          a += w * (sg * sg.transpose());
                          b += w * (sg * grad_u(x));
                        });
    const auto& dofs = space.element_dofs(t);
    for (int i = 0; i < ns; ++i) {
      const int fi = space.free_index(dofs[i]);
      if (fi < 0) continue;
      rhs[fi] += b[i];
      for (int j = 0; j < ns; ++j) {
        const int fj = space.free_index(dofs[j]);
        if (fj >= 0) triplets.emplace_back(fi, fj, a(i, j));
      }
    }
  }
  SparseMatrix stiff = SparseMatrix::from_triplets(space.dim_free(), std::move(triplets));
  auto [x, report] = solve_spd(stiff, rhs, tol);
  (void)report;
  return space.expand(x);
}

}  // namespace lsfem
