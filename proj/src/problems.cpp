#include "lsfem/problems.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace lsfem {

namespace {

// u = (x^2-1)(y^2-1)e^x and its derivatives (shared by the smooth problems).
struct SmoothExact {
  static double u(const Eigen::Vector2d& p) {
    return (p.x() * p.x() - 1.0) * (p.y() * p.y() - 1.0) * std::exp(p.x());
  }
  static double ux(const Eigen::Vector2d& p) {
    return (p.x() * p.x() + 2.0 * p.x() - 1.0) * (p.y() * p.y() - 1.0) *
           std::exp(p.x());
  }
  static double uy(const Eigen::Vector2d& p) {
    return (p.x() * p.x() - 1.0) * 2.0 * p.y() * std::exp(p.x());
  }
  static double uxx(const Eigen::Vector2d& p) {
    return (p.x() * p.x() + 4.0 * p.x() + 1.0) * (p.y() * p.y() - 1.0) *
           std::exp(p.x());
  }
  static double uyy(const Eigen::Vector2d& p) {
    return 2.0 * (p.x() * p.x() - 1.0) * std::exp(p.x());
  }
};

Problem make_smooth1(double omega) {
  Problem p;
  p.name = "smooth1";
  p.omega = omega;
  p.sigma = [](const Eigen::Vector2d&) { return 1.0; };
  p.eta = [](const Eigen::Vector2d&) { return 1.0; };
  p.has_exact = true;
  p.exact_u = SmoothExact::u;
  p.exact_grad_u = [](const Eigen::Vector2d& x) {
    return Eigen::Vector2d(SmoothExact::ux(x), SmoothExact::uy(x));
  };
  p.exact_q = p.exact_grad_u;
  p.exact_div_q = [](const Eigen::Vector2d& x) {
    return SmoothExact::uxx(x) + SmoothExact::uyy(x);
  };
  const double w2 = omega * omega;
  p.f = [w2](const Eigen::Vector2d& x) {
    return -(SmoothExact::uxx(x) + SmoothExact::uyy(x)) - w2 * SmoothExact::u(x);
  };
  return p;
}

Problem make_smooth_var(double omega) {
  Problem p;
  p.name = "smooth-var";
  p.omega = omega;
  auto sigma = [](const Eigen::Vector2d& x) {
    return x.x() * x.x() + x.y() * x.y() + 1.0;
  };
  auto eta = [](const Eigen::Vector2d& x) {
    return (x.x() * x.x() - x.x()) * (x.y() * x.y() - x.y());
  };
  p.sigma = sigma;
  p.eta = eta;
  p.has_exact = true;
  p.exact_u = SmoothExact::u;
  p.exact_grad_u = [](const Eigen::Vector2d& x) {
    return Eigen::Vector2d(SmoothExact::ux(x), SmoothExact::uy(x));
  };
  p.exact_q = [sigma](const Eigen::Vector2d& x) {
    return Eigen::Vector2d(sigma(x) * SmoothExact::ux(x),
                           sigma(x) * SmoothExact::uy(x));
  };
  p.exact_div_q = [sigma](const Eigen::Vector2d& x) {
    // div(sigma grad u) = grad sigma . grad u + sigma * lap u
    return 2.0 * x.x() * SmoothExact::ux(x) + 2.0 * x.y() * SmoothExact::uy(x) +
           sigma(x) * (SmoothExact::uxx(x) + SmoothExact::uyy(x));
  };
  const double w2 = omega * omega;
  auto div_q = p.exact_div_q;
  p.f = [w2, eta, div_q](const Eigen::Vector2d& x) {
    return -div_q(x) - w2 * eta(x) * SmoothExact::u(x);
  };
  return p;
}

// u = v(x) w(y), v = x|x|^{3/4}(1-x^2) = sign(x)(|x|^{7/4} - |x|^{15/4}),
// w = 1 - y^2. The x^{1/4} in the printed source term is read as |x|^{1/4}
// with the sign(x) prefactor carrying the odd symmetry.
struct SingularExact {
  static double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }
  static double v(double x) {
    const double a = std::abs(x);
    return sgn(x) * (std::pow(a, 1.75) - std::pow(a, 3.75));
  }
  static double vp(double x) {
    const double a = std::abs(x);
    return 1.75 * std::pow(a, 0.75) - 3.75 * std::pow(a, 2.75);
  }
  static double vpp(double x) {
    if (x == 0.0) return 0.0;
    const double a = std::abs(x);
    return sgn(x) * (21.0 / 16.0 * std::pow(a, -0.25) -
                     165.0 / 16.0 * std::pow(a, 1.75));
  }
  static double w(double y) { return 1.0 - y * y; }
};

Problem make_singular() {
  Problem p;
  p.name = "singular";
  p.omega = 0.0;
  p.sigma = [](const Eigen::Vector2d&) { return 1.0; };
  p.eta = [](const Eigen::Vector2d&) { return 1.0; };
  p.singular_line_x0 = true;
  p.regularity_t = 0.25;
  p.has_exact = true;
  p.exact_u = [](const Eigen::Vector2d& x) {
    return SingularExact::v(x.x()) * SingularExact::w(x.y());
  };
  p.exact_grad_u = [](const Eigen::Vector2d& x) {
    return Eigen::Vector2d(SingularExact::vp(x.x()) * SingularExact::w(x.y()),
                           SingularExact::v(x.x()) * (-2.0 * x.y()));
  };
  p.exact_q = p.exact_grad_u;
  p.exact_div_q = [](const Eigen::Vector2d& x) {
    return SingularExact::vpp(x.x()) * SingularExact::w(x.y()) -
           2.0 * SingularExact::v(x.x());
  };
  p.f = [](const Eigen::Vector2d& x) {
    if (x.x() == 0.0) return 0.0;
    const double a = std::abs(x.x());
    return SingularExact::sgn(x.x()) * (165.0 * x.x() * x.x() - 21.0) /
               (16.0 * std::pow(a, 0.25)) * SingularExact::w(x.y()) +
           2.0 * SingularExact::v(x.x());
  };
  return p;
}

}  // namespace

Problem builtin_problem(const std::string& name, double omega) {
  Problem p;
  if (name == "smooth1")
    p = make_smooth1(omega);
  else if (name == "smooth-var")
    p = make_smooth_var(omega);
  else if (name == "singular")
    p = make_singular();
  else
    throw std::runtime_error("unknown problem '" + name +
                             "' (valid: smooth1, smooth-var, singular)");
  check_consistency(p);
  return p;
}

double regularity_hint(const Problem& p) { return p.regularity_t; }

void check_consistency(const Problem& p, int npoints, unsigned seed) {
  if (!p.has_exact) return;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const double w2 = p.omega * p.omega;
  for (int i = 0; i < npoints; ++i) {
    Eigen::Vector2d x(dist(rng), dist(rng));
    if (p.singular_line_x0 && std::abs(x.x()) < 1e-3) continue;
    const double f = p.f(x);
    const double scale = std::max(1.0, std::abs(f));
    const double pde = -p.exact_div_q(x) - w2 * p.eta(x) * p.exact_u(x) - f;
    if (std::abs(pde) > 1e-10 * scale)
      throw std::runtime_error("problem '" + p.name +
                               "': PDE consistency check failed, residual " +
                               std::to_string(pde));
    const Eigen::Vector2d qres =
        p.exact_q(x) - p.sigma(x) * p.exact_grad_u(x);
    if (qres.norm() > 1e-12 * std::max(1.0, p.exact_q(x).norm()))
      throw std::runtime_error("problem '" + p.name +
                               "': q != sigma grad u at a sample point");
  }
}

}  // namespace lsfem
