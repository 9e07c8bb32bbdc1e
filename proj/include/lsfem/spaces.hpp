#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "lsfem/elements.hpp"
#include "lsfem/mesh.hpp"

namespace lsfem {

struct ElementGeometry {
  Eigen::Vector2d origin;  // first vertex
  Eigen::Matrix2d jac, jac_inv;
  double det = 0.0;
  double area = 0.0;
  double diameter = 0.0;  // longest edge
  Eigen::Vector2d centroid;
};

ElementGeometry element_geometry(const Mesh& mesh, int t);

/// Global H1-conforming Lagrange space of order m with Dirichlet DOFs
/// flagged and eliminated from the free numbering.
///
/// Full numbering: vertices, then (m-1) slots per global edge ordered
/// along the edge direction (lower to higher vertex index), then interior
/// nodes per element. All DOFs are nodal; dof_position gives the node.
class ScalarSpace {
 public:
  ScalarSpace(const Mesh& mesh, int order);

  const Mesh& mesh() const { return *mesh_; }
  const ScalarElement& element() const { return elem_; }
  int order() const { return elem_.order(); }
  int dim_full() const { return n_full_; }
  int dim_free() const { return n_free_; }
  const std::vector<int>& element_dofs(int t) const { return element_dofs_[t]; }
  bool is_boundary(int full_dof) const { return is_boundary_[full_dof] != 0; }
  int free_index(int full_dof) const { return free_index_[full_dof]; }
  const Eigen::Vector2d& dof_position(int full_dof) const { return positions_[full_dof]; }

  /// Basis values and physical gradients on element t at a reference point.
  void eval_basis(int t, const Eigen::Vector2d& xhat, Eigen::VectorXd& values,
                  Eigen::Matrix<double, Eigen::Dynamic, 2>& gradients) const;

  /// Nodal interpolation: full coefficient vector of I_h f.
  Eigen::VectorXd interpolate(const std::function<double(const Eigen::Vector2d&)>& f) const;

  /// Expand a free vector to a full vector using the given boundary values
  /// (nullptr means homogeneous).
  Eigen::VectorXd expand(const Eigen::VectorXd& free,
                         const std::function<double(const Eigen::Vector2d&)>* dirichlet
                         = nullptr) const;

 private:
  const Mesh* mesh_;
  ScalarElement elem_;
  int n_full_ = 0, n_free_ = 0;
  std::vector<std::vector<int>> element_dofs_;
  std::vector<std::uint8_t> is_boundary_;
  std::vector<int> free_index_;
  std::vector<Eigen::Vector2d> positions_;
};

/// Global H(div)-conforming RT/BDM space. DOF functionals are defined in
/// physical coordinates: per global edge, moments of v.n against shifted
/// Legendre polynomials in the global edge parameter (lower to higher
/// vertex index, normal = tangent rotated by -90 degrees); then interior
/// moments per element. Both triangles sharing an edge use the same edge
/// functionals, so normal-trace continuity holds by construction.
class FluxSpace {
 public:
  FluxSpace(const Mesh& mesh, FluxFamily family, int order);

  const Mesh& mesh() const { return *mesh_; }
  const FluxElement& element() const { return elem_; }
  FluxFamily family() const { return elem_.family(); }
  int order() const { return elem_.order(); }
  int dim() const { return n_dofs_; }
  int local_dim() const { return elem_.dim(); }
  /// Degree of the divergence image space: k for RT_k, k-1 for BDM_k.
  int div_degree() const {
    return family() == FluxFamily::RT ? order() : order() - 1;
  }
  const std::vector<int>& element_dofs(int t) const { return element_dofs_[t]; }

  /// Global basis restricted to element t at a reference point: values
  /// (local_dim x 2, physical components) and physical divergences.
  void eval_basis(int t, const Eigen::Vector2d& xhat,
                  Eigen::Matrix<double, Eigen::Dynamic, 2>& values,
                  Eigen::VectorXd& divergences) const;

  /// Canonical interpolation: DOF functionals applied to an analytic field
  /// by quadrature (degree quad_degree on edges and interiors). split_x0
  /// grades the quadrature toward the line x = 0 for fields with limited
  /// smoothness there.
  Eigen::VectorXd interpolate(
      const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& q,
      int quad_degree = 20, bool split_x0 = false, int split_levels = 20) const;

 private:
  void build_element_matrices();

  const Mesh* mesh_;
  FluxElement elem_;
  int n_dofs_ = 0;
  std::vector<std::vector<int>> element_dofs_;
  std::vector<Eigen::MatrixXd> coeff_;  // per element: generator coeffs of dual basis
};

}  // namespace lsfem
