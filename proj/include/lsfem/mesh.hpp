#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lsfem {

enum class BoundaryTag : std::uint8_t { Interior = 0, Dirichlet = 1, Neumann = 2 };

/// Conforming triangulation of a planar domain with globally oriented edges.
///
/// Triangles are counterclockwise. Edge i stores its vertex pair with the
/// lower index first; the global edge direction runs from the lower to the
/// higher vertex index and the global edge normal is the direction rotated
/// by -90 degrees. tri_edge_signs[t][le] is +1 when the outward normal of
/// triangle t on its local edge le coincides with the global edge normal.
struct Mesh {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> tri_edges;       // local edge le = (v[le], v[(le+1)%3])
  std::vector<std::array<int, 3>> tri_edge_signs;  // +-1, see above
  std::vector<BoundaryTag> edge_tag;               // Interior / Dirichlet / Neumann
  std::vector<int> boundary_edges;
  double h = 0.0;  // max over triangles of the longest edge

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  std::array<Eigen::Vector2d, 3> triangle_coords(int t) const {
    const auto& tri = triangles[t];
    return {vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]};
  }

  double triangle_area(int t) const;

  /// Midpoint of the two global endpoints, length and unit normal of edge e.
  Eigen::Vector2d edge_vector(int e) const {
    return vertices[edges[e][1]] - vertices[edges[e][0]];
  }
  double edge_length(int e) const { return edge_vector(e).norm(); }
  Eigen::Vector2d edge_normal(int e) const {
    Eigen::Vector2d t = edge_vector(e).normalized();
    return {t.y(), -t.x()};
  }
};

/// Uniform n x n grid of squares on (-1,1)^2, each square split along the
/// diagonal from its lower-left to upper-right corner.
Mesh build_structured(int n);

/// Split every triangle into 4 congruent children via edge midpoints.
Mesh refine_uniform(const Mesh& m);

/// Plain-text triangle list: line 1 "V E T", then V lines "x y", then
/// T lines "v0 v1 v2" (0-based). Edges are derived. Clockwise triangles
/// are reordered.
Mesh load_mesh(const std::string& path);
void save_mesh(const Mesh& m, const std::string& path);

/// Rebuild edges/tags/h from vertices+triangles and check all invariants.
/// Throws std::runtime_error naming the violated invariant.
void finalize_mesh(Mesh& m);

}  // namespace lsfem
