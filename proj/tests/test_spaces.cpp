#include <doctest.h>

#include <cmath>
#include <set>

#include "lsfem/mesh.hpp"
#include "lsfem/spaces.hpp"
#include "test_util.hpp"

using namespace lsfem;

namespace {

int interior_edge_count(const Mesh& m) {
  return m.num_edges() - static_cast<int>(m.boundary_edges.size());
}

}  // namespace

TEST_CASE("flux space global DOF counts") {
  // RT_k: (k+1) E + k(k+1) T; BDM_k: (k+1) E + (k-1)(k+1) T.
  const Mesh m1 = build_structured(1);
  CHECK(FluxSpace(m1, FluxFamily::RT, 0).dim() == 5);

  const Mesh m2 = build_structured(2);
  const int E = m2.num_edges(), T = m2.num_triangles();
  CHECK(FluxSpace(m2, FluxFamily::BDM, 1).dim() == 32);
  CHECK(FluxSpace(m2, FluxFamily::RT, 1).dim() == 2 * E + 2 * T);
  CHECK(FluxSpace(m2, FluxFamily::RT, 2).dim() == 3 * E + 6 * T);
  CHECK(FluxSpace(m2, FluxFamily::BDM, 2).dim() == 3 * E + 3 * T);
}

TEST_CASE("scalar space DOF counts with full Dirichlet boundary") {
  const Mesh m = build_structured(2);
  const ScalarSpace p1(m, 1);
  CHECK(p1.dim_free() == 1);  // one interior vertex
  const int iv = 1;           // interior vertices of the n=2 grid
  const int ie = interior_edge_count(m);
  const ScalarSpace p2(m, 2);
  CHECK(p2.dim_free() == iv + ie);
  const ScalarSpace p3(m, 3);
  CHECK(p3.dim_free() == iv + 2 * ie + m.num_triangles());
  CHECK(p2.dim_full() == m.num_vertices() + m.num_edges());
}

TEST_CASE("degenerate scalar space is rejected") {
  const Mesh m = build_structured(1);
  CHECK_THROWS_AS(ScalarSpace(m, 1), std::runtime_error);
}

TEST_CASE("scalar boundary DOFs sit on the boundary") {
  const Mesh m = build_structured(2);
  const ScalarSpace space(m, 2);
  for (int i = 0; i < space.dim_full(); ++i) {
    const Eigen::Vector2d& x = space.dof_position(i);
    const bool on_boundary = std::abs(std::abs(x.x()) - 1.0) < 1e-12 ||
                             std::abs(std::abs(x.y()) - 1.0) < 1e-12;
    CHECK(space.is_boundary(i) == on_boundary);
    if (space.is_boundary(i))
      CHECK(space.free_index(i) == -1);
    else
      CHECK(space.free_index(i) >= 0);
  }
}

TEST_CASE("nodal interpolation reproduces polynomials in the space") {
  const Mesh m = build_structured(2);
  const ScalarSpace space(m, 2);
  auto f = [](const Eigen::Vector2d& x) {
    return 1.0 + 2.0 * x.x() - x.y() + 0.5 * x.x() * x.y();
  };
  const Eigen::VectorXd full = space.interpolate(f);
  for (const Eigen::Vector2d p :
       {Eigen::Vector2d(0.3, -0.2), Eigen::Vector2d(-0.7, 0.4),
        Eigen::Vector2d(0.1, 0.9)}) {
    CHECK(testutil::eval_scalar(space, full, p) ==
          doctest::Approx(f(p)).epsilon(1e-12));
  }
}

TEST_CASE("global flux fields have continuous normal traces") {
  const Mesh m = build_structured(3);
  struct Pair {
    FluxFamily family;
    int k;
  };
  const Pair pairs[] = {{FluxFamily::RT, 0}, {FluxFamily::RT, 1},
                        {FluxFamily::RT, 2}, {FluxFamily::BDM, 1},
                        {FluxFamily::BDM, 2}};
  auto gen = testutil::rng(3);
  const QuadratureRule erule = edge_rule(8);
  for (const auto& pr : pairs) {
    const FluxSpace space(m, pr.family, pr.k);
    const Eigen::VectorXd coeffs = testutil::random_vector(space.dim(), gen);
    std::set<int> boundary(m.boundary_edges.begin(), m.boundary_edges.end());
    double scale = coeffs.cwiseAbs().maxCoeff();
    for (int e = 0; e < m.num_edges(); ++e) {
      if (boundary.count(e)) continue;
      const Eigen::Vector2d a = m.vertices[m.edges[e][0]];
      const Eigen::Vector2d b = m.vertices[m.edges[e][1]];
      const Eigen::Vector2d n = m.edge_normal(e);
      for (int q = 0; q < erule.size(); ++q) {
        const double t = erule.points[q][0];
        const Eigen::Vector2d x = a + t * (b - a);
        // evaluate from both incident triangles
        double vn[2];
        int found = 0;
        for (int tri = 0; tri < m.num_triangles() && found < 2; ++tri) {
          bool has = false;
          for (int le = 0; le < 3; ++le) has = has || m.tri_edges[tri][le] == e;
          if (!has) continue;
          const ElementGeometry g = element_geometry(m, tri);
          const Eigen::Vector2d xhat = g.jac_inv * (x - g.origin);
          Eigen::Matrix<double, Eigen::Dynamic, 2> vals;
          Eigen::VectorXd divs;
          space.eval_basis(tri, xhat, vals, divs);
          const auto& dofs = space.element_dofs(tri);
          Eigen::Vector2d v = Eigen::Vector2d::Zero();
          for (size_t i = 0; i < dofs.size(); ++i)
            v += coeffs[dofs[i]] * vals.row(i).transpose();
          vn[found++] = v.dot(n);
        }
        REQUIRE(found == 2);
        CHECK(std::abs(vn[0] - vn[1]) <= 1e-11 * std::max(1.0, scale));
      }
    }
  }
}

TEST_CASE("canonical interpolation is idempotent on discrete fields") {
  const Mesh m = build_structured(2);
  auto gen = testutil::rng(11);
  struct Pair {
    FluxFamily family;
    int k;
  };
  const Pair pairs[] = {{FluxFamily::RT, 0}, {FluxFamily::RT, 1},
                        {FluxFamily::BDM, 1}, {FluxFamily::BDM, 2}};
  for (const auto& pr : pairs) {
    const FluxSpace space(m, pr.family, pr.k);
    const Eigen::VectorXd coeffs = testutil::random_vector(space.dim(), gen);
    auto field = [&](const Eigen::Vector2d& x) {
      return testutil::eval_flux(space, coeffs, x);
    };
    const Eigen::VectorXd back = space.interpolate(field, 16);
    CHECK((back - coeffs).cwiseAbs().maxCoeff() <=
          1e-11 * std::max(1.0, coeffs.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("interpolation reproduces constant fields exactly in value") {
  const Mesh m = build_structured(2);
  const FluxSpace space(m, FluxFamily::RT, 0);
  auto field = [](const Eigen::Vector2d&) { return Eigen::Vector2d(1.0, 0.0); };
  const Eigen::VectorXd coeffs = space.interpolate(field, 8);
  for (const Eigen::Vector2d p :
       {Eigen::Vector2d(0.3, -0.2), Eigen::Vector2d(-0.6, 0.55)}) {
    const Eigen::Vector2d v = testutil::eval_flux(space, coeffs, p);
    CHECK(v.x() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v.y() == doctest::Approx(0.0).epsilon(1e-12));
  }
}
