#pragma once

#include <functional>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace lsfem {

using ScalarField = std::function<double(const Eigen::Vector2d&)>;
using VectorField = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

/// Coefficients, data and (optional) exact solution of
///   sigma^-1 q - grad u = g,  -div q - omega^2 eta u = f,  u = 0 on the
/// boundary, with q = sigma grad u.
struct Problem {
  std::string name;
  double omega = 1.0;
  ScalarField sigma;
  ScalarField eta;
  ScalarField f;
  VectorField g;  // may be null (zero)

  bool has_exact = false;
  ScalarField exact_u;
  VectorField exact_grad_u;
  VectorField exact_q;       // sigma * grad u
  ScalarField exact_div_q;

  /// True when data is singular along the line x = 0 (drives quadrature
  /// cell splitting).
  bool singular_line_x0 = false;

  /// Sobolev-exponent hint: smooth problems are unbounded, the singular
  /// built-in sits just below t = 1/4 (u not in H^{2+t} for t >= 1/4).
  double regularity_t = std::numeric_limits<double>::infinity();
};

/// Built-ins: "smooth1", "smooth-var", "singular". omega is configurable
/// for the smooth problems (singular forces omega = 0).
Problem builtin_problem(const std::string& name, double omega = 1.0);

double regularity_hint(const Problem& p);

/// PDE consistency self-check at random points:
/// |-div q - omega^2 eta u - f| <= 1e-10 * scale and |q - sigma grad u|
/// <= 1e-12 * scale. For singular data, points with |x| < 1e-3 are skipped.
/// Throws on failure.
void check_consistency(const Problem& p, int npoints = 50, unsigned seed = 7);

}  // namespace lsfem
