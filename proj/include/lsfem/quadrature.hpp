#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace lsfem {

/// Quadrature rule on the reference triangle {x,y >= 0, x+y <= 1}
/// (weights sum to 1/2) or on the reference segment [0,1]
/// (weights sum to 1). Triangle points are stored as barycentric
/// triples (l0, l1, l2) with respect to (0,0), (1,0), (0,1).
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;

  int size() const { return static_cast<int>(weights.size()); }
  Eigen::Vector2d ref_point(int i) const { return {points[i][1], points[i][2]}; }
};

/// Tensorized Gauss rule collapsed to the triangle (Duffy transform),
/// exact for total degree <= degree. Supported degrees 0..24.
QuadratureRule triangle_rule(int degree);

/// Gauss-Legendre rule on [0,1], exact to the degree (point stored in
/// the first barycentric slot). Supported degrees 0..40.
QuadratureRule edge_rule(int degree);

/// Gauss-Legendre nodes/weights on [0,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace lsfem
