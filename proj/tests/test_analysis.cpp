#include <doctest.h>

#include <cmath>

#include "lsfem/analysis.hpp"
#include "lsfem/mesh.hpp"
#include "lsfem/problems.hpp"
#include "lsfem/projections.hpp"
#include "test_util.hpp"

using namespace lsfem;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("expected rates: div supercloseness of BDM1/P2 depends on omega") {
  const ExpectedRates w1 = expected_rates(FluxFamily::BDM, 1, 2, kInf, 1.0);
  CHECK(w1.sc_div_q.rate == doctest::Approx(2.0));
  const ExpectedRates w0 = expected_rates(FluxFamily::BDM, 1, 2, kInf, 0.0);
  CHECK(w0.sc_div_q.rate == doctest::Approx(3.0));
  // BDM2/P3: k > 1, so omega no longer reduces the rate
  const ExpectedRates b23 = expected_rates(FluxFamily::BDM, 2, 3, kInf, 1.0);
  CHECK(b23.sc_div_q.rate == doctest::Approx(4.0));
}

TEST_CASE("expected rates: smooth table spot values") {
  // RT0/P1: scalar L2 rate k+2 = 2, gradient supercloseness k+2 for k=0
  const ExpectedRates rt0 = expected_rates(FluxFamily::RT, 0, 1, kInf, 1.0);
  CHECK(rt0.u.rate == doctest::Approx(2.0));
  CHECK(rt0.sc_grad_u.rate == doctest::Approx(2.0));
  // RT1/P1: div supercloseness k+1 = 2
  const ExpectedRates rt1 = expected_rates(FluxFamily::RT, 1, 1, kInf, 1.0);
  CHECK(rt1.sc_div_q.rate == doctest::Approx(2.0));
  // BDM2/P1: flux supercloseness (k+k1)* = 2*, gated at the unstarred value
  const ExpectedRates bdm2 = expected_rates(FluxFamily::BDM, 2, 1, kInf, 1.0);
  CHECK(bdm2.sc_q.rate == doctest::Approx(2.0));
  CHECK(bdm2.sc_q.starred);
  CHECK(bdm2.sc_q.gate == doctest::Approx(2.0));
  // BDM2/P1: scalar L2 rate k = 2
  CHECK(bdm2.u.rate == doctest::Approx(2.0));
}

TEST_CASE("expected rates: singular data caps") {
  const double t = 0.25;
  // RT1/P2 singular: (sc_q, sc_div_q, sc_u, sc_grad_u) = (1.25, 2.25, 2.25, 1.25)
  const ExpectedRates rt12 = expected_rates(FluxFamily::RT, 1, 2, t, 0.0);
  CHECK(rt12.sc_q.rate == doctest::Approx(1.25));
  CHECK(rt12.sc_div_q.rate == doctest::Approx(2.25));
  CHECK(rt12.sc_u.rate == doctest::Approx(2.25));
  CHECK(rt12.sc_grad_u.rate == doctest::Approx(1.25));
  CHECK_FALSE(rt12.sc_q.paren);
  // BDM1/P1 singular: (1.25, 2.00, 1.25, 1.25), first and third parenthesized
  const ExpectedRates b11 = expected_rates(FluxFamily::BDM, 1, 1, t, 0.0);
  CHECK(b11.sc_q.rate == doctest::Approx(1.25));
  CHECK(b11.sc_div_q.rate == doctest::Approx(2.0));
  CHECK(b11.sc_u.rate == doctest::Approx(1.25));
  CHECK(b11.sc_grad_u.rate == doctest::Approx(1.25));
  CHECK(b11.sc_q.paren);
  CHECK(b11.sc_u.paren);
  CHECK_FALSE(b11.sc_div_q.paren);
}

TEST_CASE("expected rates: unsupported pair rejected") {
  CHECK_THROWS_AS(expected_rates(FluxFamily::RT, 0, 3, kInf, 1.0),
                  std::runtime_error);
}

TEST_CASE("ErrorReport norm lookup") {
  ErrorReport r;
  r.u_l2 = 1.0;
  r.sc_div_q_l2 = 2.0;
  CHECK(r.norm("u_l2") == doctest::Approx(1.0));
  CHECK(r.norm("sc_div_q_l2") == doctest::Approx(2.0));
  CHECK_THROWS_AS(r.norm("bogus"), std::runtime_error);
  CHECK(ErrorReport::norm_names().size() == 10);
}

TEST_CASE("compute_errors: supercloseness terms vanish when u_h is the projection") {
  const Problem p = builtin_problem("smooth1", 1.0);
  const Mesh m = build_structured(4);
  const FluxSpace flux(m, FluxFamily::RT, 1);
  const ScalarSpace scalar(m, 1);
  const Eigen::VectorXd pi_q = hdiv_interpolate(flux, p.exact_q, 20);
  const Eigen::VectorXd pi_u = elliptic_project(scalar, p.exact_grad_u, p.sigma, 1e-13);

  Solution sol;
  sol.flux = pi_q;
  sol.scalar_full = pi_u;
  const ErrorReport rep = compute_errors(flux, scalar, sol, pi_q, pi_u, p);
  CHECK(rep.sc_u_l2 <= 1e-10);
  CHECK(rep.sc_grad_u_l2 <= 1e-10);
  CHECK(rep.sc_q_l2 <= 1e-10);
  CHECK(rep.sc_div_q_l2 <= 1e-10);
  CHECK(rep.u_l2 > 0.0);
  CHECK(rep.q_l2 > 0.0);
}

TEST_CASE("compute_errors: zero fields give the norm of the exact solution") {
  const Problem p = builtin_problem("smooth1", 1.0);
  const Mesh m = build_structured(4);
  const FluxSpace flux(m, FluxFamily::RT, 0);
  const ScalarSpace scalar(m, 1);
  Solution sol;
  sol.flux = Eigen::VectorXd::Zero(flux.dim());
  sol.scalar_full = Eigen::VectorXd::Zero(scalar.dim_full());
  const Eigen::VectorXd pi_q = Eigen::VectorXd::Zero(flux.dim());
  const Eigen::VectorXd pi_u = Eigen::VectorXd::Zero(scalar.dim_full());
  const ErrorReport rep = compute_errors(flux, scalar, sol, pi_q, pi_u, p);

  const double u_norm = testutil::l2_norm(
      m,
      [&](int, const Eigen::Vector2d&, const Eigen::Vector2d& x) {
        return p.exact_u(x);
      },
      24);
  CHECK(rep.u_l2 == doctest::Approx(u_norm).epsilon(1e-10));
}

TEST_CASE("compute_errors: energy norm is consistent with its components") {
  // With sigma = eta = omega = 1 the energy norm squared of the error is
  // the sum of the four squared component norms.
  const Problem p = builtin_problem("smooth1", 1.0);
  const Mesh m = build_structured(4);
  const FluxSpace flux(m, FluxFamily::RT, 0);
  const ScalarSpace scalar(m, 1);
  const Solution sol = solve_lsfem(flux, scalar, p);
  const Eigen::VectorXd pi_q = hdiv_interpolate(flux, p.exact_q, 20);
  const Eigen::VectorXd pi_u = elliptic_project(scalar, p.exact_grad_u, p.sigma, 1e-12);
  const ErrorReport rep = compute_errors(flux, scalar, sol, pi_q, pi_u, p);
  const double sum = rep.q_l2 * rep.q_l2 + rep.div_q_l2 * rep.div_q_l2 +
                     rep.grad_u_l2 * rep.grad_u_l2 + rep.u_l2 * rep.u_l2;
  CHECK(rep.energy * rep.energy == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("compute_errors: triangle inequality bookkeeping") {
  const Problem p = builtin_problem("smooth1", 1.0);
  const Mesh m = build_structured(8);
  const FluxSpace flux(m, FluxFamily::RT, 0);
  const ScalarSpace scalar(m, 1);
  const Solution sol = solve_lsfem(flux, scalar, p);
  const Eigen::VectorXd pi_q = hdiv_interpolate(flux, p.exact_q, 20);
  const Eigen::VectorXd pi_u = elliptic_project(scalar, p.exact_grad_u, p.sigma, 1e-12);
  const ErrorReport rep = compute_errors(flux, scalar, sol, pi_q, pi_u, p);
  // || u - Pi u ||_0 by quadrature
  const double proj_err = testutil::l2_norm(
      m,
      [&](int t, const Eigen::Vector2d& xhat, const Eigen::Vector2d& x) {
        Eigen::VectorXd vals;
        Eigen::Matrix<double, Eigen::Dynamic, 2> grads;
        scalar.eval_basis(t, xhat, vals, grads);
        const auto& dofs = scalar.element_dofs(t);
        double v = 0.0;
        for (size_t i = 0; i < dofs.size(); ++i) v += pi_u[dofs[i]] * vals[i];
        return p.exact_u(x) - v;
      },
      16);
  CHECK(rep.u_l2 <= proj_err + rep.sc_u_l2 + 1e-12);
}

TEST_CASE("postprocessing: stationarity and mean preservation") {
  const Problem p = builtin_problem("smooth1", 1.0);
  const Mesh m = build_structured(2);
  const FluxSpace flux(m, FluxFamily::BDM, 2);
  const ScalarSpace scalar(m, 2);

  // Take u_h in P2 and q_h its exact gradient interpolant ([P1]^2 is in
  // BDM2); the postprocessed field in P3 must reproduce u_h.
  auto u2 = [](const Eigen::Vector2d& x) {
    return x.x() * x.x() - 0.5 * x.x() * x.y() + x.y();
  };
  auto grad_u2 = [](const Eigen::Vector2d& x) {
    return Eigen::Vector2d(2.0 * x.x() - 0.5 * x.y(), -0.5 * x.x() + 1.0);
  };
  Solution sol;
  sol.scalar_full = scalar.interpolate(u2);
  sol.flux = flux.interpolate(grad_u2, 12);
  const PiecewisePoly post = postprocess(flux, scalar, sol, p.sigma);
  CHECK(post.degree == 3);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(m, t);
    CHECK(post.eval(m, t, g.centroid) ==
          doctest::Approx(u2(g.centroid)).epsilon(1e-10));
  }

  // Mean preservation on a genuine discrete solution.
  const Solution real = solve_lsfem(flux, scalar, p);
  const PiecewisePoly star = postprocess(flux, scalar, real, p.sigma);
  const QuadratureRule rule = triangle_rule(12);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(m, t);
    const auto& dofs = scalar.element_dofs(t);
    double mean_diff = 0.0;
    Eigen::VectorXd vals;
    Eigen::Matrix<double, Eigen::Dynamic, 2> grads;
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d xhat = rule.ref_point(q);
      const Eigen::Vector2d x = g.origin + g.jac * xhat;
      scalar.eval_basis(t, xhat, vals, grads);
      double uh = 0.0;
      for (size_t i = 0; i < dofs.size(); ++i) uh += real.scalar_full[dofs[i]] * vals[i];
      mean_diff += rule.weights[q] * g.det * (star.eval(m, t, x) - uh);
    }
    CHECK(std::abs(mean_diff) <= 1e-12);
  }
}
