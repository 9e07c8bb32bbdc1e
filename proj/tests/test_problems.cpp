#include <doctest.h>

#include <cmath>
#include <random>

#include "lsfem/problems.hpp"

using namespace lsfem;

namespace {

// Central finite differences of the exact solution.
double fd_laplacian(const ScalarField& u, const Eigen::Vector2d& x, double h) {
  const double c = u(x);
  const double xp = u({x.x() + h, x.y()}), xm = u({x.x() - h, x.y()});
  const double yp = u({x.x(), x.y() + h}), ym = u({x.x(), x.y() - h});
  return (xp + xm + yp + ym - 4.0 * c) / (h * h);
}

Eigen::Vector2d fd_gradient(const ScalarField& u, const Eigen::Vector2d& x,
                            double h) {
  return {(u({x.x() + h, x.y()}) - u({x.x() - h, x.y()})) / (2 * h),
          (u({x.x(), x.y() + h}) - u({x.x(), x.y() - h})) / (2 * h)};
}

// div(sigma grad u) by finite differences of the flux components.
double fd_div_q(const Problem& p, const Eigen::Vector2d& x, double h) {
  auto q = [&p](const Eigen::Vector2d& y) { return p.exact_q(y); };
  return (q({x.x() + h, x.y()}).x() - q({x.x() - h, x.y()}).x()) / (2 * h) +
         (q({x.x(), x.y() + h}).y() - q({x.x(), x.y() - h}).y()) / (2 * h);
}

}  // namespace

TEST_CASE("builtin problems exist, unknown names are rejected") {
  CHECK(builtin_problem("smooth1").name == "smooth1");
  CHECK(builtin_problem("smooth-var").name == "smooth-var");
  CHECK(builtin_problem("singular").name == "singular");
  CHECK_THROWS_AS(builtin_problem("nope"), std::runtime_error);
}

TEST_CASE("smooth1: boundary values and center value") {
  const Problem p = builtin_problem("smooth1", 1.0);
  CHECK(p.exact_u({0.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));
  for (double s = -1.0; s <= 1.0; s += 0.25) {
    CHECK(std::abs(p.exact_u({1.0, s})) <= 1e-14);
    CHECK(std::abs(p.exact_u({-1.0, s})) <= 1e-14);
    CHECK(std::abs(p.exact_u({s, 1.0})) <= 1e-14);
    CHECK(std::abs(p.exact_u({s, -1.0})) <= 1e-14);
  }
  CHECK(p.sigma({0.3, 0.4}) == doctest::Approx(1.0));
  CHECK(p.eta({0.3, 0.4}) == doctest::Approx(1.0));
}

TEST_CASE("smooth problems: f matches a finite-difference oracle") {
  // f = -div(sigma grad u) - omega^2 eta u, checked with central differences.
  for (const char* name : {"smooth1", "smooth-var"}) {
    const Problem p = builtin_problem(name, 1.0);
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> dist(-0.9, 0.9);
    for (int i = 0; i < 20; ++i) {
      const Eigen::Vector2d x(dist(gen), dist(gen));
      const double divq = fd_div_q(p, x, 1e-5);
      const double f_fd = -divq - p.omega * p.omega * p.eta(x) * p.exact_u(x);
      const double scale = std::max(1.0, std::abs(p.f(x)));
      CHECK(std::abs(p.f(x) - f_fd) <= 1e-6 * scale);
    }
  }
}

TEST_CASE("smooth1: f at the origin against the hand-derived Laplacian") {
  const Problem p = builtin_problem("smooth1", 1.0);
  const Eigen::Vector2d x(0.0, 0.0);
  const double lap = fd_laplacian(p.exact_u, x, 1e-4);
  const double expected = -lap - p.exact_u(x);
  CHECK(p.f(x) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("exact derivatives agree with finite differences") {
  for (const char* name : {"smooth1", "smooth-var"}) {
    const Problem p = builtin_problem(name, 2.0);
    std::mt19937 gen(17);
    std::uniform_real_distribution<double> dist(-0.9, 0.9);
    for (int i = 0; i < 20; ++i) {
      const Eigen::Vector2d x(dist(gen), dist(gen));
      const Eigen::Vector2d g_fd = fd_gradient(p.exact_u, x, 1e-6);
      CHECK((p.exact_grad_u(x) - g_fd).norm() <= 1e-7 * (1.0 + g_fd.norm()));
      const Eigen::Vector2d q = p.exact_q(x);
      CHECK((q - p.sigma(x) * p.exact_grad_u(x)).norm() <= 1e-12 * (1.0 + q.norm()));
      CHECK(std::abs(p.exact_div_q(x) - fd_div_q(p, x, 1e-5)) <=
            1e-5 * (1.0 + std::abs(p.exact_div_q(x))));
    }
  }
}

TEST_CASE("built-in consistency self-check passes") {
  check_consistency(builtin_problem("smooth1", 1.0));
  check_consistency(builtin_problem("smooth1", 4.0));
  check_consistency(builtin_problem("smooth-var", 1.0));
  check_consistency(builtin_problem("smooth-var", 8.0));
  check_consistency(builtin_problem("singular"));
}

TEST_CASE("singular problem: data away from the singular line") {
  const Problem p = builtin_problem("singular");
  CHECK(p.omega == 0.0);
  CHECK(p.singular_line_x0);
  // u = v(x) w(y), v = x |x|^{3/4} (1 - x^2), w = 1 - y^2
  auto v = [](double x) {
    return x * std::pow(std::abs(x), 0.75) * (1.0 - x * x);
  };
  std::mt19937 gen(23);
  std::uniform_real_distribution<double> dist(-0.9, 0.9);
  for (int i = 0; i < 20; ++i) {
    Eigen::Vector2d x(dist(gen), dist(gen));
    if (std::abs(x.x()) < 1e-2) x.x() += 0.1;
    CHECK(p.exact_u(x) ==
          doctest::Approx(v(x.x()) * (1.0 - x.y() * x.y())).epsilon(1e-12));
    // -div q = f since omega = 0
    CHECK(std::abs(-fd_div_q(p, x, 1e-6) - p.f(x)) <=
          1e-4 * (1.0 + std::abs(p.f(x))));
  }
  // odd symmetry in x
  CHECK(p.exact_u({0.4, 0.2}) == doctest::Approx(-p.exact_u({-0.4, 0.2})));
  CHECK(p.f({0.4, 0.2}) == doctest::Approx(-p.f({-0.4, 0.2})));
}

TEST_CASE("regularity hints") {
  CHECK(regularity_hint(builtin_problem("singular")) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::isinf(regularity_hint(builtin_problem("smooth1"))));
  CHECK(std::isinf(regularity_hint(builtin_problem("smooth-var"))));
}

TEST_CASE("smooth1 flux has nonzero normal component on the boundary") {
  const Problem p = builtin_problem("smooth1", 1.0);
  // q.n = q_x at x = 1: u vanishes there but its x-derivative does not.
  const Eigen::Vector2d q = p.exact_q({1.0, 0.0});
  CHECK(std::abs(q.x()) > 0.1);
}
