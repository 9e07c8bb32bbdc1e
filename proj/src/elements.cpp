#include "lsfem/elements.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "lsfem/quadrature.hpp"

namespace lsfem {

SpaceDescriptor parse_space(const std::string& name) {
  SpaceDescriptor d;
  d.name = name;
  auto fail = [&]() {
    throw std::runtime_error("unknown space descriptor '" + name +
                             "' (valid: P1..P3, RT0..RT2, BDM1..BDM2)");
  };
  if (name.size() == 2 && name[0] == 'P') {
    d.is_flux = false;
    d.order = name[1] - '0';
    if (d.order < 1 || d.order > 3) fail();
  } else if (name.size() == 3 && name.substr(0, 2) == "RT") {
    d.is_flux = true;
    d.family = FluxFamily::RT;
    d.order = name[2] - '0';
    if (d.order < 0 || d.order > 2) fail();
  } else if (name.size() == 4 && name.substr(0, 3) == "BDM") {
    d.is_flux = true;
    d.family = FluxFamily::BDM;
    d.order = name[3] - '0';
    if (d.order < 1 || d.order > 2) fail();
  } else {
    fail();
  }
  return d;
}

int monomial_count(int deg) { return (deg + 1) * (deg + 2) / 2; }

void monomial_eval(int deg, const Eigen::Vector2d& p, Eigen::VectorXd& values) {
  values.resize(monomial_count(deg));
  int idx = 0;
  for (int d = 0; d <= deg; ++d)
    for (int i = 0; i <= d; ++i)
      values[idx++] = std::pow(p.x(), d - i) * std::pow(p.y(), i);
}

void monomial_eval_grad(int deg, const Eigen::Vector2d& p, Eigen::VectorXd& values,
                        Eigen::Matrix<double, Eigen::Dynamic, 2>& gradients) {
  const int n = monomial_count(deg);
  values.resize(n);
  gradients.resize(n, 2);
  int idx = 0;
  for (int d = 0; d <= deg; ++d) {
    for (int i = 0; i <= d; ++i) {
      const int a = d - i, b = i;
      values[idx] = std::pow(p.x(), a) * std::pow(p.y(), b);
      gradients(idx, 0) = a == 0 ? 0.0 : a * std::pow(p.x(), a - 1) * std::pow(p.y(), b);
      gradients(idx, 1) = b == 0 ? 0.0 : b * std::pow(p.x(), a) * std::pow(p.y(), b - 1);
      ++idx;
    }
  }
}

double legendre01(int j, double t) {
  const double x = 2.0 * t - 1.0;
  double p0 = 1.0, p1 = x;
  if (j == 0) return 1.0;
  if (j == 1) return x;
  for (int k = 2; k <= j; ++k) {
    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// ---------------------------------------------------------------------------
// ScalarElement
// ---------------------------------------------------------------------------

ScalarElement::ScalarElement(int order) : order_(order) {
  if (order < 1 || order > 3)
    throw std::runtime_error("ScalarElement: order must be in 1..3");
  const Eigen::Vector2d v[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  for (int i = 0; i < 3; ++i) nodes_.push_back(v[i]);
  for (int le = 0; le < 3; ++le) {
    const Eigen::Vector2d a = v[le], b = v[(le + 1) % 3];
    for (int s = 1; s < order; ++s)
      nodes_.push_back(a + (static_cast<double>(s) / order) * (b - a));
  }
  if (order == 3) nodes_.push_back({1.0 / 3.0, 1.0 / 3.0});

  const int n = dim();
  Eigen::MatrixXd vand(n, n);
  Eigen::VectorXd mono;
  for (int i = 0; i < n; ++i) {
    monomial_eval(order_, nodes_[i], mono);
    vand.row(i) = mono;
  }
  coeff_ = vand.inverse();
}

void ScalarElement::eval(const Eigen::Vector2d& xhat, Eigen::VectorXd& values,
                         Eigen::Matrix<double, Eigen::Dynamic, 2>& gradients) const {
  Eigen::VectorXd mono;
  Eigen::Matrix<double, Eigen::Dynamic, 2> mono_grad;
  monomial_eval_grad(order_, xhat, mono, mono_grad);
  values = coeff_.transpose() * mono;
  gradients = coeff_.transpose() * mono_grad;
}

// ---------------------------------------------------------------------------
// FluxElement
// ---------------------------------------------------------------------------

namespace {

// Cubic bubble on the reference triangle and the rotated gradient
// curl b = (db/dy, -db/dx).
Eigen::Vector2d bubble_curl(const Eigen::Vector2d& p) {
  const double x = p.x(), y = p.y();
  // b = (1-x-y) x y
  const double bx = y - 2.0 * x * y - y * y;
  const double by = x - x * x - 2.0 * x * y;
  return {by, -bx};
}

}  // namespace

FluxElement::FluxElement(FluxFamily family, int order)
    : family_(family), order_(order) {
  if (family == FluxFamily::RT) {
    if (order < 0 || order > 2) throw std::runtime_error("FluxElement: RT order 0..2");
    dim_ = (order + 1) * (order + 3);
  } else {
    if (order < 1 || order > 2) throw std::runtime_error("FluxElement: BDM order 1..2");
    dim_ = (order + 1) * (order + 2);
  }
  build_dual();
}

void FluxElement::eval_generators(const Eigen::Vector2d& xhat,
                                  Eigen::Matrix<double, Eigen::Dynamic, 2>& values,
                                  Eigen::VectorXd& divergences) const {
  const int k = order_;
  const int nm = monomial_count(k);
  Eigen::VectorXd mono;
  Eigen::Matrix<double, Eigen::Dynamic, 2> mono_grad;
  monomial_eval_grad(k, xhat, mono, mono_grad);

  values.resize(dim_, 2);
  divergences.resize(dim_);
  for (int j = 0; j < nm; ++j) {
    values(j, 0) = mono[j];
    values(j, 1) = 0.0;
    divergences[j] = mono_grad(j, 0);
    values(nm + j, 0) = 0.0;
    values(nm + j, 1) = mono[j];
    divergences[nm + j] = mono_grad(j, 1);
  }
  if (family_ == FluxFamily::RT) {
    // x * (homogeneous monomials of degree k); div(x p) = (k+2) p.
    for (int i = 0; i <= k; ++i) {
      const double p = std::pow(xhat.x(), k - i) * std::pow(xhat.y(), i);
      const int row = 2 * nm + i;
      values(row, 0) = xhat.x() * p;
      values(row, 1) = xhat.y() * p;
      divergences[row] = (k + 2.0) * p;
    }
  }
}

namespace {

// Applies the reference DOF functionals to a set of fields given as a
// pointwise evaluator: eval(xhat) returns an (nfields x 2) matrix.
Eigen::MatrixXd apply_reference_dofs(
    FluxFamily family, int order, int dim, int nfields,
    const std::function<Eigen::Matrix<double, Eigen::Dynamic, 2>(
        const Eigen::Vector2d&)>& eval) {
  const int k = order;
  Eigen::MatrixXd dofs = Eigen::MatrixXd::Zero(dim, nfields);
  const Eigen::Vector2d v[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};

  const QuadratureRule erule = edge_rule(2 * k + 4);
  int row = 0;
  for (int le = 0; le < 3; ++le) {
    const Eigen::Vector2d a = v[le], b = v[(le + 1) % 3];
    const double len = (b - a).norm();
    const Eigen::Vector2d n((b - a).y() / len, -(b - a).x() / len);
    for (int j = 0; j <= k; ++j, ++row) {
      for (int q = 0; q < erule.size(); ++q) {
        const double t = erule.points[q][0];
        const Eigen::Vector2d x = a + t * (b - a);
        const auto vals = eval(x);
        const double scale = erule.weights[q] * len * legendre01(j, t);
        for (int f = 0; f < nfields; ++f)
          dofs(row, f) += scale * (vals(f, 0) * n.x() + vals(f, 1) * n.y());
      }
    }
  }

  const int nint = dim - 3 * (k + 1);
  if (nint > 0) {
    const QuadratureRule trule = triangle_rule(2 * k + 4);
    for (int q = 0; q < trule.size(); ++q) {
      const Eigen::Vector2d x = trule.ref_point(q);
      const auto vals = eval(x);
      const double w = trule.weights[q];
      if (family == FluxFamily::RT) {
        // moments against [P_{k-1}]^2
        Eigen::VectorXd mono;
        monomial_eval(k - 1, x, mono);
        const int nm = monomial_count(k - 1);
        for (int c = 0; c < 2; ++c)
          for (int j = 0; j < nm; ++j)
            for (int f = 0; f < nfields; ++f)
              dofs(row + c * nm + j, f) += w * mono[j] * vals(f, c);
      } else {
        // BDM_2: moments against gradients of P_1 (constant fields) and
        // the curl of the cubic bubble.
        const Eigen::Vector2d cb = bubble_curl(x);
        for (int f = 0; f < nfields; ++f) {
          dofs(row + 0, f) += w * vals(f, 0);
          dofs(row + 1, f) += w * vals(f, 1);
          dofs(row + 2, f) += w * (vals(f, 0) * cb.x() + vals(f, 1) * cb.y());
        }
      }
    }
  }
  return dofs;
}

}  // namespace

void FluxElement::build_dual() {
  auto eval = [this](const Eigen::Vector2d& x) {
    Eigen::Matrix<double, Eigen::Dynamic, 2> vals;
    Eigen::VectorXd divs;
    eval_generators(x, vals, divs);
    return vals;
  };
  Eigen::MatrixXd M = apply_reference_dofs(family_, order_, dim_, dim_, eval);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible())
    throw std::runtime_error("FluxElement: reference DOF set is not unisolvent");
  dual_ = lu.inverse();
}

void FluxElement::eval(const Eigen::Vector2d& xhat,
                       Eigen::Matrix<double, Eigen::Dynamic, 2>& values,
                       Eigen::VectorXd& divergences) const {
  Eigen::Matrix<double, Eigen::Dynamic, 2> gvals;
  Eigen::VectorXd gdivs;
  eval_generators(xhat, gvals, gdivs);
  values = dual_.transpose() * gvals;
  divergences = dual_.transpose() * gdivs;
}

Eigen::VectorXd FluxElement::apply_dofs(
    const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& field) const {
  auto eval = [&field](const Eigen::Vector2d& x) {
    Eigen::Matrix<double, Eigen::Dynamic, 2> vals(1, 2);
    const Eigen::Vector2d v = field(x);
    vals(0, 0) = v.x();
    vals(0, 1) = v.y();
    return vals;
  };
  return apply_reference_dofs(family_, order_, dim_, 1, eval).col(0);
}

void piola_map(const Eigen::Matrix2d& jacobian, const Eigen::Vector2d& ref_value,
               double ref_divergence, Eigen::Vector2d& value, double& divergence) {
  const double det = jacobian.determinant();
  value = jacobian * ref_value / det;
  divergence = ref_divergence / det;
}

}  // namespace lsfem
