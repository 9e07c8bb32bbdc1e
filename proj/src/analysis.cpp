#include "lsfem/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "lsfem/quadrature.hpp"

namespace lsfem {

const std::vector<std::string>& ErrorReport::norm_names() {
  static const std::vector<std::string> names = {
      "u_l2",    "grad_u_l2",    "q_l2",    "div_q_l2", "sc_u_l2",
      "sc_grad_u_l2", "sc_q_l2", "sc_div_q_l2", "energy",   "post_grad"};
  return names;
}

double ErrorReport::norm(const std::string& name) const {
  if (name == "u_l2") return u_l2;
  if (name == "grad_u_l2") return grad_u_l2;
  if (name == "q_l2") return q_l2;
  if (name == "div_q_l2") return div_q_l2;
  if (name == "sc_u_l2") return sc_u_l2;
  if (name == "sc_grad_u_l2") return sc_grad_u_l2;
  if (name == "sc_q_l2") return sc_q_l2;
  if (name == "sc_div_q_l2") return sc_div_q_l2;
  if (name == "energy") return energy;
  if (name == "post_grad") return post_grad;
  throw std::runtime_error("unknown norm name '" + name + "'");
}

ErrorReport compute_errors(const FluxSpace& flux, const ScalarSpace& scalar,
                           const Solution& sol, const Eigen::VectorXd& pi_q,
                           const Eigen::VectorXd& pi_u_full, const Problem& problem,
                           const PiecewisePoly* postprocessed,
                           const ErrorOptions& opts) {
  if (!problem.has_exact)
    throw std::runtime_error("compute_errors: problem has no exact solution");
  const Mesh& mesh = flux.mesh();
  const int qdeg = opts.quad_degree > 0
                       ? opts.quad_degree
                       : 2 * std::max(flux.order() + 1, scalar.order()) + 8;
  const QuadratureRule rule = triangle_rule(std::min(qdeg, 24));
  const double w2 = problem.omega * problem.omega;

  const int nf = flux.local_dim();
  const int ns = scalar.element().dim();

  double acc[9] = {0};  // squared norms: 8 table norms + post_grad
  double energy2 = 0.0;

  Eigen::Matrix<double, Eigen::Dynamic, 2> fv, sg;
  Eigen::VectorXd fd, sv;
  Eigen::VectorXd fq(nf), fpq(nf), su(ns), spu(ns);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    const auto& fdofs = flux.element_dofs(t);
    const auto& sdofs = scalar.element_dofs(t);
    for (int i = 0; i < nf; ++i) {
      fq[i] = sol.flux[fdofs[i]];
      fpq[i] = pi_q[fdofs[i]];
    }
    for (int i = 0; i < ns; ++i) {
      su[i] = sol.scalar_full[sdofs[i]];
      spu[i] = pi_u_full[sdofs[i]];
    }
    for_each_quad_point(
        mesh, t, rule, problem.singular_line_x0, opts.singular_levels,
        [&](const Eigen::Vector2d& xhat, double wref) {
          const Eigen::Vector2d x = g.origin + g.jac * xhat;
          const double w = wref * g.det;
          flux.eval_basis(t, xhat, fv, fd);
          scalar.eval_basis(t, xhat, sv, sg);

          const double uh = sv.dot(su);
          const Eigen::Vector2d guh = sg.transpose() * su;
          const Eigen::Vector2d qh = fv.transpose() * fq;
          const double dqh = fd.dot(fq);
          const double piu = sv.dot(spu);
          const Eigen::Vector2d gpiu = sg.transpose() * spu;
          const Eigen::Vector2d piq = fv.transpose() * fpq;
          const double dpiq = fd.dot(fpq);

          const double ue = problem.exact_u(x);
          const Eigen::Vector2d gue = problem.exact_grad_u(x);
          const Eigen::Vector2d qe = problem.exact_q(x);
          const double dqe = problem.exact_div_q(x);
          const double sig = problem.sigma(x);
          const double eta = problem.eta(x);

          acc[0] += w * (ue - uh) * (ue - uh);
          acc[1] += w * (gue - guh).squaredNorm();
          acc[2] += w * (qe - qh).squaredNorm();
          acc[3] += w * (dqe - dqh) * (dqe - dqh);
          acc[4] += w * (piu - uh) * (piu - uh);
          acc[5] += w * (gpiu - guh).squaredNorm();
          acc[6] += w * (piq - qh).squaredNorm();
          acc[7] += w * (dpiq - dqh) * (dpiq - dqh);
          energy2 += w * ((qe - qh).squaredNorm() / sig +
                          (dqe - dqh) * (dqe - dqh) +
                          sig * (gue - guh).squaredNorm() +
                          w2 * w2 * eta * eta * (ue - uh) * (ue - uh));
          if (postprocessed) {
            const Eigen::Vector2d gp = postprocessed->eval_grad(mesh, t, x);
            acc[8] += w * (gue - gp).squaredNorm();
          }
        });
  }

  ErrorReport r;
  r.h = mesh.h;
  r.ndof_flux = flux.dim();
  r.ndof_scalar = scalar.dim_free();
  r.u_l2 = std::sqrt(acc[0]);
  r.grad_u_l2 = std::sqrt(acc[1]);
  r.q_l2 = std::sqrt(acc[2]);
  r.div_q_l2 = std::sqrt(acc[3]);
  r.sc_u_l2 = std::sqrt(acc[4]);
  r.sc_grad_u_l2 = std::sqrt(acc[5]);
  r.sc_q_l2 = std::sqrt(acc[6]);
  r.sc_div_q_l2 = std::sqrt(acc[7]);
  r.energy = std::sqrt(energy2);
  r.post_grad = postprocessed ? std::sqrt(acc[8]) : -1.0;
  return r;
}

PiecewisePoly postprocess(const FluxSpace& flux, const ScalarSpace& scalar,
                          const Solution& sol, const ScalarField& sigma,
                          int quad_degree) {
  const Mesh& mesh = flux.mesh();
  const int m = scalar.order();
  const int deg = m + 1;
  const int nm = monomial_count(deg);
  const int qdeg = quad_degree > 0 ? quad_degree
                                   : 2 * std::max(deg, flux.order() + 1) + 4;
  const QuadratureRule rule = triangle_rule(std::min(qdeg, 24));

  PiecewisePoly out;
  out.degree = deg;
  out.coeffs.resize(nm, mesh.num_triangles());

  const int nf = flux.local_dim();
  const int ns = scalar.element().dim();
  Eigen::Matrix<double, Eigen::Dynamic, 2> fv, sg, mg;
  Eigen::VectorXd fd, sv, mono;
  Eigen::VectorXd fq(nf), su(ns);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const ElementGeometry g = element_geometry(mesh, t);
    const auto& fdofs = flux.element_dofs(t);
    const auto& sdofs = scalar.element_dofs(t);
    for (int i = 0; i < nf; ++i) fq[i] = sol.flux[fdofs[i]];
    for (int i = 0; i < ns; ++i) su[i] = sol.scalar_full[sdofs[i]];

    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(nm + 1, nm + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nm + 1);
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d xhat = rule.ref_point(q);
      const Eigen::Vector2d x = g.origin + g.jac * xhat;
      const double w = rule.weights[q] * g.det;
      monomial_eval_grad(deg, (x - g.centroid) / g.diameter, mono, mg);
      mg /= g.diameter;
      flux.eval_basis(t, xhat, fv, fd);
      scalar.eval_basis(t, xhat, sv, sg);
      const Eigen::Vector2d qh = fv.transpose() * fq;
      const double uh = sv.dot(su);
      const double sig = sigma(x);

      sys.topLeftCorner(nm, nm) += (w * sig) * (mg * mg.transpose());
      sys.block(0, nm, nm, 1) += w * mono;   // (lambda, v)_T
      sys.block(nm, 0, 1, nm) += w * mono.transpose();  // (u*, zeta)_T
      rhs.head(nm) += w * (mg * qh);
      rhs[nm] += w * uh;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
    if (!lu.isInvertible())
      throw std::runtime_error("postprocess: singular local system on element " +
                               std::to_string(t));
    out.coeffs.col(t) = lu.solve(rhs).head(nm);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Expected rates
// ---------------------------------------------------------------------------

const RateEntry* ExpectedRates::entry(const std::string& norm) const {
  if (norm == "q_l2") return &q;
  if (norm == "div_q_l2") return &div_q;
  if (norm == "u_l2") return &u;
  if (norm == "grad_u_l2") return &grad_u;
  if (norm == "sc_q_l2") return &sc_q;
  if (norm == "sc_div_q_l2") return &sc_div_q;
  if (norm == "sc_u_l2") return &sc_u;
  if (norm == "sc_grad_u_l2") return &sc_grad_u;
  return nullptr;
}

namespace {

RateEntry plain(double r) { return {r, false, r, false}; }
RateEntry star(double r, double gate) { return {r, true, gate, false}; }

void cap(RateEntry& e, double c) {
  e.rate = std::min(e.rate, c);
  e.gate = std::min(e.gate, c);
}

}  // namespace

ExpectedRates expected_rates(FluxFamily family, int k, int m, double reg_t,
                             double omega) {
  const bool rt = family == FluxFamily::RT;
  const int kmin = rt ? 0 : 1;
  const int kmax = 2;
  if (k < kmin || k > kmax || m < 1 || m > 3 || std::abs(m - k) > 1)
    throw std::runtime_error("expected_rates: unsupported pair " +
                             std::string(rt ? "RT" : "BDM") + std::to_string(k) +
                             "/P" + std::to_string(m));

  const int k1 = std::min(k - 2, 1);
  const int k2 = std::min(k, 2);
  const int k3 = std::min(k, 1);

  ExpectedRates e;
  if (m == k - 1) {
    e.q = star(k + k1, k);  // state-of-the-art fallback rate k
    e.div_q = plain(k);
    e.u = plain(k);
    e.grad_u = plain(k - 1);
    e.sc_q = star(k + k1, k);
    e.sc_div_q = plain(k);
    e.sc_u = star(k + k1, k);
    e.sc_grad_u = plain(k);
  } else if (m == k) {
    e.q = plain(k + 1);
    e.div_q = plain(rt ? k + 1 : k);
    e.u = plain(k + 1);
    e.grad_u = plain(k);
    e.sc_q = plain(k + 1);
    e.sc_div_q = plain(k + 1);
    e.sc_u = star(k + k2, k + 1);
    e.sc_grad_u = plain(k + 1);
  } else {  // m == k + 1
    e.q = plain(k + 1);
    e.div_q = plain(rt ? k + 1 : k);
    e.u = plain(rt ? k + 2 : k + k2);
    e.grad_u = plain(k + 1);
    e.sc_q = plain(k + 1);
    if (rt) {
      e.sc_div_q = plain(k + 2);
      e.sc_u = star(k + 2 + k3, k + 2);
      e.sc_grad_u = k > 0 ? star(k + 2, k + 1) : plain(k + 2);
    } else {
      // BDM_k/P_{k+1}: the div supercloseness order depends on omega.
      e.sc_div_q = plain((omega == 0.0 || k > 1) ? k + 2 : k + 1);
      e.sc_u = plain(k + k2);
      e.sc_grad_u = plain(k + 1);
    }
  }

  if (std::isfinite(reg_t)) {
    // Printed singular-data rates for the six pairs run in the experiments;
    // parenthesized entries were observed better than predicted.
    auto printed = [&](double sq, bool pq, double sdq, double su, bool pu,
                       double sgu, bool pgu) {
      e.sc_q = plain(sq);
      e.sc_q.paren = pq;
      e.sc_div_q = plain(sdq);
      e.sc_u = plain(su);
      e.sc_u.paren = pu;
      e.sc_grad_u = plain(sgu);
      e.sc_grad_u.paren = pgu;
    };
    bool matched = true;
    if (rt && k == 0 && m == 1)
      printed(1.25, true, 2.00, 1.25, false, 1.25, false);
    else if (rt && k == 1 && m == 1)
      printed(1.25, false, 2.00, 2.00, false, 1.25, true);
    else if (rt && k == 1 && m == 2)
      printed(1.25, false, 2.25, 2.25, false, 1.25, false);
    else if (!rt && k == 1 && m == 1)
      printed(1.25, true, 2.00, 1.25, true, 1.25, false);
    else if (!rt && k == 1 && m == 2)
      printed(1.25, false, 2.25, 1.25, false, 1.25, false);
    else if (!rt && k == 2 && m == 2)
      printed(1.25, false, 2.25, 2.25, false, 1.25, false);
    else
      matched = false;
    if (!matched) {
      cap(e.sc_q, 1.0 + reg_t);
      cap(e.sc_grad_u, 1.0 + reg_t);
      cap(e.sc_u, 2.0 + reg_t);
      cap(e.sc_div_q, 2.0 + reg_t);
    }
    cap(e.q, 1.0 + reg_t);
    cap(e.grad_u, 1.0 + reg_t);
    cap(e.u, 2.0 + reg_t);
    cap(e.div_q, reg_t);
  }
  return e;
}

}  // namespace lsfem
