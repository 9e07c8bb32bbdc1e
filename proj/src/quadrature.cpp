#include "lsfem/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace lsfem {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  // Nodes on [-1,1] by Newton iteration on P_n, then shifted to [0,1].
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (n == 1) p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double pn = (n == 1) ? x : p1;
      double pn1 = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = 0.5 * (1.0 + x);
    weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

QuadratureRule triangle_rule(int degree) {
  if (degree < 0 || degree > 24)
    throw std::runtime_error("triangle_rule: unsupported degree " +
                             std::to_string(degree));
  // Duffy collapse x = u, y = v*(1-u) with Jacobian (1-u): a total-degree-d
  // polynomial becomes degree <= d+1 in u and <= d in v.
  const int n = degree / 2 + 2;
  std::vector<double> xu, wu;
  gauss_legendre(n, xu, wu);
  QuadratureRule rule;
  rule.degree = degree;
  rule.points.reserve(n * n);
  rule.weights.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double x = xu[i];
      double y = xu[j] * (1.0 - xu[i]);
      rule.points.push_back({1.0 - x - y, x, y});
      rule.weights.push_back(wu[i] * wu[j] * (1.0 - xu[i]));
    }
  }
  return rule;
}

QuadratureRule edge_rule(int degree) {
  if (degree < 0 || degree > 40)
    throw std::runtime_error("edge_rule: unsupported degree " +
                             std::to_string(degree));
  const int n = degree / 2 + 1;
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  QuadratureRule rule;
  rule.degree = degree;
  for (int i = 0; i < n; ++i) {
    rule.points.push_back({x[i], 0.0, 0.0});
    rule.weights.push_back(w[i]);
  }
  return rule;
}

}  // namespace lsfem
