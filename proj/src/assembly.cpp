#include "lsfem/assembly.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace lsfem {

int default_thread_count() {
  if (const char* env = std::getenv("LSFEM_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

namespace {

void run_parallel(int count, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || count < 2 * threads) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        body(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

// Sub-cell of the reference triangle, used for graded quadrature toward
// the physical line x = 0. phys holds the physical x-coordinate at each
// corner (affine, so linear interpolation is exact).
struct RefTri {
  Eigen::Vector2d c0, c1, c2;
  double x0, x1, x2;
};

constexpr double kLineTol = 1e-12;

bool touches_x0(const RefTri& cell) {
  return std::min({cell.x0, cell.x1, cell.x2}) <= kLineTol &&
         std::max({cell.x0, cell.x1, cell.x2}) >= -kLineTol;
}

void emit_points(const QuadratureRule& rule, const RefTri& cell,
                 const std::function<void(const Eigen::Vector2d&, double)>& cb) {
  // rule weights are for the unit reference triangle (area 1/2)
  const Eigen::Vector2d e1 = cell.c1 - cell.c0, e2 = cell.c2 - cell.c0;
  const double scale = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
  if (scale == 0.0) return;
  for (int q = 0; q < rule.size(); ++q) {
    const auto& b = rule.points[q];
    const Eigen::Vector2d xhat = b[0] * cell.c0 + b[1] * cell.c1 + b[2] * cell.c2;
    cb(xhat, rule.weights[q] * scale);
  }
}

RefTri make_cell(const Eigen::Vector2d& a, double xa, const Eigen::Vector2d& b,
                 double xb, const Eigen::Vector2d& c, double xc) {
  return {a, b, c, xa, xb, xc};
}

// Cut the cell with the level set {physical x = cut}; the singular line is
// on one side, so only sub-cells still touching it keep splitting. Each
// level halves the cell's extent normal to the line, giving a geometric
// grading with O(levels) sub-cells.
void emit_cell(const QuadratureRule& rule, const RefTri& cell, int levels,
               const std::function<void(const Eigen::Vector2d&, double)>& cb) {
  const double xmin = std::min({cell.x0, cell.x1, cell.x2});
  const double xmax = std::max({cell.x0, cell.x1, cell.x2});
  if (levels <= 0 || !touches_x0(cell) || xmax - xmin < kLineTol) {
    emit_points(rule, cell, cb);
    return;
  }
  // straddling cells are first cut at the line itself
  const double cut = (xmin < -kLineTol && xmax > kLineTol)
                         ? 0.0
                         : (xmax > kLineTol ? 0.5 * xmax : 0.5 * xmin);

  const Eigen::Vector2d pts[3] = {cell.c0, cell.c1, cell.c2};
  const double xs[3] = {cell.x0, cell.x1, cell.x2};
  const double eps = kLineTol + 1e-14 * (xmax - xmin);
  int pos = -1, neg = -1, on = -1;
  int npos = 0, nneg = 0;
  for (int i = 0; i < 3; ++i) {
    const double s = xs[i] - cut;
    if (s > eps) {
      pos = i;
      ++npos;
    } else if (s < -eps) {
      neg = i;
      ++nneg;
    } else {
      on = i;
    }
  }
  if (npos == 0 || nneg == 0) {  // degenerate cut; integrate as is
    emit_points(rule, cell, cb);
    return;
  }
  auto lerp = [&](int i, int j, Eigen::Vector2d& p, double& x) {
    const double s = (cut - xs[i]) / (xs[j] - xs[i]);
    p = pts[i] + s * (pts[j] - pts[i]);
    x = cut;
  };
  if (npos == 1 && nneg == 1) {
    // cut passes through vertex `on` and the opposite edge
    Eigen::Vector2d p;
    double xp;
    lerp(pos, neg, p, xp);
    emit_cell(rule, make_cell(pts[on], xs[on], pts[pos], xs[pos], p, xp),
              levels - 1, cb);
    emit_cell(rule, make_cell(pts[on], xs[on], p, xp, pts[neg], xs[neg]),
              levels - 1, cb);
    return;
  }
  // one vertex alone on its side, two (possibly including `on`) opposite
  const int lone = npos == 1 ? pos : neg;
  const int o1 = (lone + 1) % 3, o2 = (lone + 2) % 3;
  Eigen::Vector2d p1, p2;
  double xp1, xp2;
  lerp(lone, o1, p1, xp1);
  lerp(lone, o2, p2, xp2);
  emit_cell(rule, make_cell(pts[lone], xs[lone], p1, xp1, p2, xp2), levels - 1, cb);
  emit_cell(rule, make_cell(p1, xp1, pts[o1], xs[o1], pts[o2], xs[o2]), levels - 1,
            cb);
  emit_cell(rule, make_cell(p2, xp2, p1, xp1, pts[o2], xs[o2]), levels - 1, cb);
}

}  // namespace

void for_each_quad_point(
    const Mesh& mesh, int t, const QuadratureRule& rule, bool split_x0,
    int levels, const std::function<void(const Eigen::Vector2d&, double)>& cb) {
  if (split_x0) {
    const ElementGeometry g = element_geometry(mesh, t);
    const auto phys_x = [&](double a, double b) {
      return (g.origin + g.jac * Eigen::Vector2d(a, b)).x();
    };
    const RefTri whole = make_cell({0.0, 0.0}, phys_x(0, 0), {1.0, 0.0},
                                   phys_x(1, 0), {0.0, 1.0}, phys_x(0, 1));
    if (touches_x0(whole)) {
      emit_cell(rule, whole, levels, cb);
      return;
    }
  }
  for (int q = 0; q < rule.size(); ++q) cb(rule.ref_point(q), rule.weights[q]);
}

SparseSystem assemble(const FluxSpace& flux, const ScalarSpace& scalar,
                      const Problem& problem, const AssemblyOptions& opts) {
  const Mesh& mesh = flux.mesh();
  if (&mesh != &scalar.mesh())
    throw std::runtime_error("assemble: spaces built on different meshes");
  const int nf = flux.local_dim();
  const int ns = scalar.element().dim();
  const int nloc = nf + ns;
  const int n_flux = flux.dim();
  const int n_free = scalar.dim_free();
  const int nt = mesh.num_triangles();

  const int qdeg = opts.quad_degree > 0
                       ? opts.quad_degree
                       : 2 * std::max(flux.order() + 1, scalar.order()) + 2;
  const QuadratureRule rule = triangle_rule(qdeg);
  const double w2 = problem.omega * problem.omega;
  const double w4 = w2 * w2;
  const bool split = problem.singular_line_x0;

  // Boundary values for the (optional) Dirichlet lifting.
  Eigen::VectorXd bval = Eigen::VectorXd::Zero(scalar.dim_full());
  if (opts.dirichlet) {
    for (int i = 0; i < scalar.dim_full(); ++i)
      if (scalar.is_boundary(i)) bval[i] = (*opts.dirichlet)(scalar.dof_position(i));
  }

  std::vector<Eigen::MatrixXd> local_mats(nt);
  std::vector<Eigen::VectorXd> local_rhs(nt);
  std::vector<std::string> errors(nt);

  auto element_kernel = [&](int t) {
    try {
      const ElementGeometry g = element_geometry(mesh, t);
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nloc, nloc);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(nloc);
      Eigen::Matrix<double, Eigen::Dynamic, 2> fv, sg;
      Eigen::VectorXd fd, sv;
      for_each_quad_point(
          mesh, t, rule, split, opts.singular_levels,
          [&](const Eigen::Vector2d& xhat, double wref) {
            const Eigen::Vector2d x = g.origin + g.jac * xhat;
            const double sig = problem.sigma(x);
            if (sig <= 0.0)
              throw std::runtime_error("assemble: sigma <= 0 at quadrature point");
            const double eta = problem.eta(x);
            const double fval = problem.f(x);
            const double w = wref * g.det;
            flux.eval_basis(t, xhat, fv, fd);
            scalar.eval_basis(t, xhat, sv, sg);

            a.topLeftCorner(nf, nf) +=
                w * ((fv * fv.transpose()) / sig + fd * fd.transpose());
            a.topRightCorner(nf, ns) +=
                w * (-fv * sg.transpose() + (w2 * eta) * fd * sv.transpose());
            a.bottomRightCorner(ns, ns) +=
                w * (sig * sg * sg.transpose() +
                     (w4 * eta * eta) * sv * sv.transpose());
            b.tail(ns) += (-w * w2 * eta * fval) * sv;
            b.head(nf) += (-w * fval) * fd;
            if (problem.g) {
              const Eigen::Vector2d gv = problem.g(x);
              b.head(nf) += w * (fv * gv);
              b.tail(ns) += (-w * sig) * (sg * gv);
            }
          });
      a.bottomLeftCorner(ns, nf) = a.topRightCorner(nf, ns).transpose();
      local_mats[t] = std::move(a);
      local_rhs[t] = std::move(b);
    } catch (const std::exception& ex) {
      errors[t] = ex.what();
    }
  };

  const int threads = opts.sequential
                          ? 1
                          : (opts.threads > 0 ? opts.threads : default_thread_count());
  run_parallel(nt, threads, element_kernel);
  for (int t = 0; t < nt; ++t)
    if (!errors[t].empty()) throw std::runtime_error(errors[t]);

  // Deterministic scatter in ascending element order.
  const int n = n_flux + n_free;
  std::vector<std::tuple<int, int, double>> triplets;
  triplets.reserve(static_cast<size_t>(nt) * nloc * nloc);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  std::vector<int> gidx(nloc);
  for (int t = 0; t < nt; ++t) {
    const auto& fdofs = flux.element_dofs(t);
    const auto& sdofs = scalar.element_dofs(t);
    for (int i = 0; i < nf; ++i) gidx[i] = fdofs[i];
    for (int i = 0; i < ns; ++i) {
      const int full = sdofs[i];
      gidx[nf + i] = scalar.is_boundary(full) ? -1 - full
                                              : n_flux + scalar.free_index(full);
    }
    const auto& a = local_mats[t];
    const auto& b = local_rhs[t];
    for (int i = 0; i < nloc; ++i) {
      if (gidx[i] < 0) continue;
      rhs[gidx[i]] += b[i];
      for (int j = 0; j < nloc; ++j) {
        if (gidx[j] >= 0)
          triplets.emplace_back(gidx[i], gidx[j], a(i, j));
        else
          rhs[gidx[i]] -= a(i, j) * bval[-1 - gidx[j]];
      }
    }
    local_mats[t].resize(0, 0);
  }

  SparseSystem sys;
  sys.n_flux = n_flux;
  sys.n_scalar_free = n_free;
  sys.matrix = SparseMatrix::from_triplets(n, std::move(triplets));
  sys.rhs = std::move(rhs);
  return sys;
}

Solution solve_lsfem(const FluxSpace& flux, const ScalarSpace& scalar,
                     const Problem& problem, const AssemblyOptions& opts,
                     double tol) {
  SparseSystem sys = assemble(flux, scalar, problem, opts);
  auto [x, report] = solve_spd(sys.matrix, sys.rhs, tol);
  Solution sol;
  sol.flux = x.head(sys.n_flux);
  sol.scalar_full = scalar.expand(x.tail(sys.n_scalar_free), opts.dirichlet);
  sol.report = report;
  return sol;
}

}  // namespace lsfem
