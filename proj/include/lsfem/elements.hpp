#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lsfem {

enum class FluxFamily { RT, BDM };

struct SpaceDescriptor {
  bool is_flux = false;
  FluxFamily family = FluxFamily::RT;
  int order = 1;  // m for Pm, k for RTk/BDMk
  std::string name;
};

/// Parse "P1".."P3", "RT0".."RT2", "BDM1".."BDM2".
SpaceDescriptor parse_space(const std::string& name);

/// Nodal Lagrange element of order m on the reference triangle with
/// vertices (0,0), (1,0), (0,1). Node layout: 3 vertices, then m-1 nodes
/// per local edge (0,1), (1,2), (2,0) traversed from first to second
/// vertex, then interior nodes.
class ScalarElement {
 public:
  explicit ScalarElement(int order);

  int order() const { return order_; }
  int dim() const { return static_cast<int>(nodes_.size()); }
  int nodes_per_edge() const { return order_ - 1; }
  int interior_nodes() const { return (order_ - 1) * (order_ - 2) / 2; }
  const std::vector<Eigen::Vector2d>& nodes() const { return nodes_; }

  /// Basis values and reference gradients at a reference point.
  void eval(const Eigen::Vector2d& xhat, Eigen::VectorXd& values,
            Eigen::Matrix<double, Eigen::Dynamic, 2>& gradients) const;

 private:
  int order_;
  std::vector<Eigen::Vector2d> nodes_;
  Eigen::MatrixXd coeff_;  // column i = monomial coefficients of basis i
};

/// Reference H(div) element: RT_k (k=0..2) or BDM_k (k=1..2).
///
/// Exposes a generator basis spanning the local space (monomial vector
/// fields, plus x * homogeneous P_k for RT) and a dual nodal basis with
/// respect to the reference degrees of freedom: per local edge, moments
/// of v.n_out against shifted Legendre polynomials in the edge parameter
/// (from first to second local vertex), then interior moments (against
/// [P_{k-1}]^2 for RT; against {e_x, e_y scaled, curl of the cubic
/// bubble, ...} for BDM).
class FluxElement {
 public:
  FluxElement(FluxFamily family, int order);

  FluxFamily family() const { return family_; }
  int order() const { return order_; }
  int dim() const { return dim_; }
  int edge_dofs() const { return order_ + 1; }  // per edge
  int interior_dofs() const { return dim_ - 3 * (order_ + 1); }

  /// Generator fields and their divergences at a reference point.
  void eval_generators(const Eigen::Vector2d& xhat,
                       Eigen::Matrix<double, Eigen::Dynamic, 2>& values,
                       Eigen::VectorXd& divergences) const;

  /// Dual (nodal) basis with respect to the reference DOFs.
  void eval(const Eigen::Vector2d& xhat,
            Eigen::Matrix<double, Eigen::Dynamic, 2>& values,
            Eigen::VectorXd& divergences) const;

  /// Reference DOF functionals applied to an arbitrary smooth field,
  /// evaluated by quadrature. Used by duality tests.
  Eigen::VectorXd apply_dofs(
      const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& field) const;

 private:
  void build_dual();

  FluxFamily family_;
  int order_;
  int dim_;
  Eigen::MatrixXd dual_;  // generator coefficients of the dual basis
};

/// Contravariant Piola transform: value -> J v / det J, divergence ->
/// div / det J. J is the Jacobian of the affine reference-to-physical map.
void piola_map(const Eigen::Matrix2d& jacobian, const Eigen::Vector2d& ref_value,
               double ref_divergence, Eigen::Vector2d& value, double& divergence);

/// Shifted Legendre polynomial L_j on [0,1], L_j(1) = 1.
double legendre01(int j, double t);

/// Monomial helpers on scaled coordinates: count and evaluation of all
/// monomials of total degree <= deg in the graded ordering 1, x, y, x^2, ...
int monomial_count(int deg);
void monomial_eval(int deg, const Eigen::Vector2d& p, Eigen::VectorXd& values);
void monomial_eval_grad(int deg, const Eigen::Vector2d& p, Eigen::VectorXd& values,
                        Eigen::Matrix<double, Eigen::Dynamic, 2>& gradients);

}  // namespace lsfem
