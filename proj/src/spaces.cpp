#include "lsfem/spaces.hpp"

#include <cmath>
#include <stdexcept>

#include "lsfem/assembly.hpp"  // for_each_quad_point
#include "lsfem/quadrature.hpp"

namespace lsfem {

ElementGeometry element_geometry(const Mesh& mesh, int t) {
  ElementGeometry g;
  auto c = mesh.triangle_coords(t);
  g.origin = c[0];
  g.jac.col(0) = c[1] - c[0];
  g.jac.col(1) = c[2] - c[0];
  g.det = g.jac.determinant();
  g.jac_inv = g.jac.inverse();
  g.area = 0.5 * g.det;
  g.diameter = std::max({(c[1] - c[0]).norm(), (c[2] - c[1]).norm(),
                         (c[0] - c[2]).norm()});
  g.centroid = (c[0] + c[1] + c[2]) / 3.0;
  return g;
}

// ---------------------------------------------------------------------------
// ScalarSpace
// ---------------------------------------------------------------------------

ScalarSpace::ScalarSpace(const Mesh& mesh, int order)
    : mesh_(&mesh), elem_(order) {
  const int m = order;
  const int v = mesh.num_vertices();
  const int e = mesh.num_edges();
  const int t = mesh.num_triangles();
  const int per_edge = m - 1;
  const int per_tri = elem_.interior_nodes();
  n_full_ = v + e * per_edge + t * per_tri;

  positions_.resize(n_full_);
  for (int i = 0; i < v; ++i) positions_[i] = mesh.vertices[i];
  for (int i = 0; i < e; ++i) {
    const Eigen::Vector2d lo = mesh.vertices[mesh.edges[i][0]];
    const Eigen::Vector2d hi = mesh.vertices[mesh.edges[i][1]];
    for (int s = 0; s < per_edge; ++s)
      positions_[v + i * per_edge + s] =
          lo + (static_cast<double>(s + 1) / m) * (hi - lo);
  }
  for (int i = 0; i < t; ++i) {
    auto c = mesh.triangle_coords(i);
    for (int s = 0; s < per_tri; ++s)  // m <= 3: single centroid node
      positions_[v + e * per_edge + i * per_tri + s] = (c[0] + c[1] + c[2]) / 3.0;
  }

  element_dofs_.resize(t);
  for (int i = 0; i < t; ++i) {
    auto& dofs = element_dofs_[i];
    dofs.reserve(elem_.dim());
    const auto& tri = mesh.triangles[i];
    for (int j = 0; j < 3; ++j) dofs.push_back(tri[j]);
    for (int le = 0; le < 3; ++le) {
      const int a = tri[le], b = tri[(le + 1) % 3];
      const int ge = mesh.tri_edges[i][le];
      const int base = v + ge * per_edge;
      for (int s = 0; s < per_edge; ++s)
        dofs.push_back(a < b ? base + s : base + (per_edge - 1 - s));
    }
    for (int s = 0; s < per_tri; ++s)
      dofs.push_back(v + e * per_edge + i * per_tri + s);
  }

  is_boundary_.assign(n_full_, 0);
  for (int ge : mesh.boundary_edges) {
    if (mesh.edge_tag[ge] != BoundaryTag::Dirichlet) continue;
    is_boundary_[mesh.edges[ge][0]] = 1;
    is_boundary_[mesh.edges[ge][1]] = 1;
    for (int s = 0; s < per_edge; ++s) is_boundary_[v + ge * per_edge + s] = 1;
  }

  free_index_.assign(n_full_, -1);
  for (int i = 0; i < n_full_; ++i)
    if (!is_boundary_[i]) free_index_[i] = n_free_++;
  if (n_free_ == 0)
    throw std::runtime_error(
        "degenerate scalar space: no interior DOFs (P" + std::to_string(m) +
        " with full Dirichlet boundary on this mesh)");
}

void ScalarSpace::eval_basis(int t, const Eigen::Vector2d& xhat,
                             Eigen::VectorXd& values,
                             Eigen::Matrix<double, Eigen::Dynamic, 2>& gradients) const {
  elem_.eval(xhat, values, gradients);
  const ElementGeometry g = element_geometry(*mesh_, t);
  gradients = (gradients * g.jac_inv).eval();
}

Eigen::VectorXd ScalarSpace::interpolate(
    const std::function<double(const Eigen::Vector2d&)>& f) const {
  Eigen::VectorXd u(n_full_);
  for (int i = 0; i < n_full_; ++i) u[i] = f(positions_[i]);
  return u;
}

Eigen::VectorXd ScalarSpace::expand(
    const Eigen::VectorXd& free,
    const std::function<double(const Eigen::Vector2d&)>* dirichlet) const {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(n_full_);
  for (int i = 0; i < n_full_; ++i) {
    if (free_index_[i] >= 0)
      full[i] = free[free_index_[i]];
    else if (dirichlet)
      full[i] = (*dirichlet)(positions_[i]);
  }
  return full;
}

// ---------------------------------------------------------------------------
// FluxSpace
// ---------------------------------------------------------------------------

namespace {

// The interior moment test fields at a physical point: [P_{k-1}]^2 monomials
// in centered coordinates for RT_k; constants plus the curl of the cubic
// barycentric bubble for BDM_2. Scaled by 1/area in the caller.
void interior_fields(FluxFamily family, int order, const ElementGeometry& g,
                     const Eigen::Vector2d& x,
                     Eigen::Matrix<double, Eigen::Dynamic, 2>& fields) {
  if (family == FluxFamily::RT) {
    const int nm = monomial_count(order - 1);
    Eigen::VectorXd mono;
    monomial_eval(order - 1, (x - g.centroid) / g.diameter, mono);
    fields.setZero(2 * nm, 2);
    for (int j = 0; j < nm; ++j) {
      fields(j, 0) = mono[j];
      fields(nm + j, 1) = mono[j];
    }
  } else {
    // BDM_2 only (BDM_1 has no interior DOFs).
    const Eigen::Vector2d lam12 = g.jac_inv * (x - g.origin);
    const double l1 = lam12[0], l2 = lam12[1], l0 = 1.0 - l1 - l2;
    const Eigen::Vector2d grad_l1 = g.jac_inv.row(0);
    const Eigen::Vector2d grad_l2 = g.jac_inv.row(1);
    const Eigen::Vector2d grad_l0 = -grad_l1 - grad_l2;
    const Eigen::Vector2d grad_b =
        l1 * l2 * grad_l0 + l0 * l2 * grad_l1 + l0 * l1 * grad_l2;
    fields.setZero(3, 2);
    fields(0, 0) = 1.0;
    fields(1, 1) = 1.0;
    fields(2, 0) = grad_b.y() * g.diameter;
    fields(2, 1) = -grad_b.x() * g.diameter;
  }
}

}  // namespace

FluxSpace::FluxSpace(const Mesh& mesh, FluxFamily family, int order)
    : mesh_(&mesh), elem_(family, order) {
  const int k = order;
  const int e = mesh.num_edges();
  const int t = mesh.num_triangles();
  const int nint = elem_.interior_dofs();
  n_dofs_ = e * (k + 1) + t * nint;

  element_dofs_.resize(t);
  for (int i = 0; i < t; ++i) {
    auto& dofs = element_dofs_[i];
    dofs.reserve(elem_.dim());
    for (int le = 0; le < 3; ++le) {
      const int ge = mesh.tri_edges[i][le];
      for (int j = 0; j <= k; ++j) dofs.push_back(ge * (k + 1) + j);
    }
    for (int s = 0; s < nint; ++s) dofs.push_back(e * (k + 1) + i * nint + s);
  }
  build_element_matrices();
}

void FluxSpace::build_element_matrices() {
  const int k = order();
  const int dim = elem_.dim();
  const int nint = elem_.interior_dofs();
  const QuadratureRule erule = edge_rule(2 * k + 4);
  const QuadratureRule trule = triangle_rule(2 * k + 6);

  coeff_.resize(mesh_->num_triangles());
  Eigen::Matrix<double, Eigen::Dynamic, 2> gvals, piola_vals(dim, 2), fields;
  Eigen::VectorXd gdivs;
  for (int t = 0; t < mesh_->num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(*mesh_, t);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
    for (int le = 0; le < 3; ++le) {
      const int ge = mesh_->tri_edges[t][le];
      const Eigen::Vector2d p0 = mesh_->vertices[mesh_->edges[ge][0]];
      const Eigen::Vector2d p1 = mesh_->vertices[mesh_->edges[ge][1]];
      const double len = (p1 - p0).norm();
      const Eigen::Vector2d n = mesh_->edge_normal(ge);
      for (int q = 0; q < erule.size(); ++q) {
        const double tq = erule.points[q][0];
        const Eigen::Vector2d x = p0 + tq * (p1 - p0);
        const Eigen::Vector2d xhat = g.jac_inv * (x - g.origin);
        elem_.eval_generators(xhat, gvals, gdivs);
        for (int j = 0; j < dim; ++j)
          piola_vals.row(j) = (g.jac * gvals.row(j).transpose() / g.det).transpose();
        const Eigen::VectorXd vn = piola_vals * n;
        for (int l = 0; l <= k; ++l)
          M.row(le * (k + 1) + l) +=
              (erule.weights[q] * len * legendre01(l, tq)) * vn.transpose();
      }
    }
    if (nint > 0) {
      for (int q = 0; q < trule.size(); ++q) {
        const Eigen::Vector2d xhat = trule.ref_point(q);
        const Eigen::Vector2d x = g.origin + g.jac * xhat;
        elem_.eval_generators(xhat, gvals, gdivs);
        for (int j = 0; j < dim; ++j)
          piola_vals.row(j) = (g.jac * gvals.row(j).transpose() / g.det).transpose();
        interior_fields(family(), k, g, x, fields);
        const double w = trule.weights[q] * g.det / g.area;
        M.bottomRows(nint) += w * (fields * piola_vals.transpose());
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible())
      throw std::runtime_error("FluxSpace: singular DOF matrix on element " +
                               std::to_string(t));
    coeff_[t] = lu.inverse();
  }
}

void FluxSpace::eval_basis(int t, const Eigen::Vector2d& xhat,
                           Eigen::Matrix<double, Eigen::Dynamic, 2>& values,
                           Eigen::VectorXd& divergences) const {
  const ElementGeometry g = element_geometry(*mesh_, t);
  Eigen::Matrix<double, Eigen::Dynamic, 2> gvals;
  Eigen::VectorXd gdivs;
  elem_.eval_generators(xhat, gvals, gdivs);
  const int dim = elem_.dim();
  Eigen::Matrix<double, Eigen::Dynamic, 2> piola_vals(dim, 2);
  for (int j = 0; j < dim; ++j)
    piola_vals.row(j) = (g.jac * gvals.row(j).transpose() / g.det).transpose();
  values = coeff_[t].transpose() * piola_vals;
  divergences = coeff_[t].transpose() * (gdivs / g.det);
}

namespace {

// 1D counterpart of the graded element splitting: visit quadrature points
// of [ta, tb] (pre-mapped edge parameters), halving toward the point where
// the physical x-coordinate (linear in t) vanishes.
void edge_quad_graded(const QuadratureRule& rule, double ta, double xa, double tb,
                      double xb, int levels,
                      const std::function<void(double, double)>& cb) {
  const double tol = 1e-12;
  const double xmin = std::min(xa, xb), xmax = std::max(xa, xb);
  if (levels <= 0 || xmin > tol || xmax < -tol || xmax - xmin < tol) {
    for (int qp = 0; qp < rule.size(); ++qp)
      cb(ta + rule.points[qp][0] * (tb - ta), rule.weights[qp] * (tb - ta));
    return;
  }
  const double cut = (xmin < -tol && xmax > tol)
                         ? 0.0
                         : (xmax > tol ? 0.5 * xmax : 0.5 * xmin);
  const double s = (cut - xa) / (xb - xa);
  const double tc = ta + s * (tb - ta);
  edge_quad_graded(rule, ta, xa, tc, cut, levels - 1, cb);
  edge_quad_graded(rule, tc, cut, tb, xb, levels - 1, cb);
}

}  // namespace

Eigen::VectorXd FluxSpace::interpolate(
    const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& q,
    int quad_degree, bool split_x0, int split_levels) const {
  const int k = order();
  Eigen::VectorXd dofs = Eigen::VectorXd::Zero(n_dofs_);
  const QuadratureRule erule = edge_rule(std::min(quad_degree, 40));
  for (int e = 0; e < mesh_->num_edges(); ++e) {
    const Eigen::Vector2d p0 = mesh_->vertices[mesh_->edges[e][0]];
    const Eigen::Vector2d p1 = mesh_->vertices[mesh_->edges[e][1]];
    const double len = (p1 - p0).norm();
    const Eigen::Vector2d n = mesh_->edge_normal(e);
    const int levels = split_x0 ? split_levels : 0;
    edge_quad_graded(erule, 0.0, p0.x(), 1.0, p1.x(), levels,
                     [&](double t, double w) {
                       const double qn = q(p0 + t * (p1 - p0)).dot(n);
                       for (int l = 0; l <= k; ++l)
                         dofs[e * (k + 1) + l] += w * len * legendre01(l, t) * qn;
                     });
  }
  const int nint = elem_.interior_dofs();
  if (nint > 0) {
    const QuadratureRule trule = triangle_rule(std::min(quad_degree, 24));
    const int base = mesh_->num_edges() * (k + 1);
    Eigen::Matrix<double, Eigen::Dynamic, 2> fields;
    for (int t = 0; t < mesh_->num_triangles(); ++t) {
      const ElementGeometry g = element_geometry(*mesh_, t);
      for_each_quad_point(
          *mesh_, t, trule, split_x0, split_levels,
          [&](const Eigen::Vector2d& xhat, double wref) {
            const Eigen::Vector2d x = g.origin + g.jac * xhat;
            const Eigen::Vector2d qv = q(x);
            interior_fields(family(), k, g, x, fields);
            const double w = wref * g.det / g.area;
            for (int s = 0; s < nint; ++s)
              dofs[base + t * nint + s] +=
                  w * (fields(s, 0) * qv.x() + fields(s, 1) * qv.y());
          });
    }
  }
  return dofs;
}

}  // namespace lsfem
