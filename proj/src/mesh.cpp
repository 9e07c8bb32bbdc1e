#include "lsfem/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lsfem {

double Mesh::triangle_area(int t) const {
  auto c = triangle_coords(t);
  return 0.5 * ((c[1] - c[0]).x() * (c[2] - c[0]).y() -
                (c[1] - c[0]).y() * (c[2] - c[0]).x());
}

namespace {

double signed_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                   const Eigen::Vector2d& c) {
  return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

}  // namespace

void finalize_mesh(Mesh& m) {
  const int nv = m.num_vertices();
  const int nt = m.num_triangles();
  for (int t = 0; t < nt; ++t) {
    for (int v : m.triangles[t]) {
      if (v < 0 || v >= nv)
        throw std::runtime_error("mesh: triangle " + std::to_string(t) +
                                 " references invalid vertex " + std::to_string(v));
    }
    if (m.triangle_area(t) <= 0.0)
      throw std::runtime_error("mesh: triangle " + std::to_string(t) +
                               " has non-positive area");
  }

  // Derive globally oriented edges (lower vertex index first).
  std::map<std::array<int, 2>, int> edge_index;
  m.edges.clear();
  m.tri_edges.assign(nt, {});
  m.tri_edge_signs.assign(nt, {});
  std::vector<int> edge_count;
  for (int t = 0; t < nt; ++t) {
    for (int le = 0; le < 3; ++le) {
      int a = m.triangles[t][le];
      int b = m.triangles[t][(le + 1) % 3];
      std::array<int, 2> key = {std::min(a, b), std::max(a, b)};
      auto it = edge_index.find(key);
      int e;
      if (it == edge_index.end()) {
        e = static_cast<int>(m.edges.size());
        edge_index.emplace(key, e);
        m.edges.push_back(key);
        edge_count.push_back(0);
      } else {
        e = it->second;
      }
      edge_count[e]++;
      m.tri_edges[t][le] = e;
      // Outward normal of a ccw triangle on edge (a,b) is rot(-90) of b-a,
      // the global normal is rot(-90) of (lo->hi); they agree iff a == lo.
      m.tri_edge_signs[t][le] = (a == key[0]) ? 1 : -1;
    }
  }

  const int ne = m.num_edges();
  m.edge_tag.assign(ne, BoundaryTag::Interior);
  m.boundary_edges.clear();
  for (int e = 0; e < ne; ++e) {
    if (edge_count[e] > 2)
      throw std::runtime_error("mesh: edge " + std::to_string(e) +
                               " shared by more than 2 triangles");
    if (edge_count[e] == 1) {
      m.edge_tag[e] = BoundaryTag::Dirichlet;
      m.boundary_edges.push_back(e);
    }
  }

  if (nv - ne + nt != 1)
    throw std::runtime_error("mesh: Euler relation V-E+T=1 violated");

  m.h = 0.0;
  for (int t = 0; t < nt; ++t)
    for (int le = 0; le < 3; ++le)
      m.h = std::max(m.h, m.edge_length(m.tri_edges[t][le]));
}

Mesh build_structured(int n) {
  if (n < 1) throw std::runtime_error("build_structured: n must be >= 1");
  Mesh m;
  const int s = n + 1;
  m.vertices.reserve(s * s);
  for (int j = 0; j < s; ++j)
    for (int i = 0; i < s; ++i)
      m.vertices.emplace_back(-1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n);
  auto idx = [s](int i, int j) { return i + j * s; };
  m.triangles.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      int ll = idx(i, j), lr = idx(i + 1, j);
      int ul = idx(i, j + 1), ur = idx(i + 1, j + 1);
      m.triangles.push_back({ll, lr, ur});
      m.triangles.push_back({ll, ur, ul});
    }
  }
  finalize_mesh(m);
  return m;
}

Mesh refine_uniform(const Mesh& parent) {
  Mesh m;
  m.vertices = parent.vertices;
  const int nv = parent.num_vertices();
  // One midpoint vertex per parent edge.
  std::vector<int> mid(parent.num_edges());
  for (int e = 0; e < parent.num_edges(); ++e) {
    mid[e] = nv + e;
    m.vertices.push_back(0.5 * (parent.vertices[parent.edges[e][0]] +
                                parent.vertices[parent.edges[e][1]]));
  }
  m.triangles.reserve(4 * parent.num_triangles());
  for (int t = 0; t < parent.num_triangles(); ++t) {
    const auto& tri = parent.triangles[t];
    int m01 = mid[parent.tri_edges[t][0]];
    int m12 = mid[parent.tri_edges[t][1]];
    int m20 = mid[parent.tri_edges[t][2]];
    m.triangles.push_back({tri[0], m01, m20});
    m.triangles.push_back({m01, tri[1], m12});
    m.triangles.push_back({m20, m12, tri[2]});
    m.triangles.push_back({m01, m12, m20});
  }
  finalize_mesh(m);
  return m;
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mesh: cannot open " + path);
  std::string line;
  int lineno = 0;
  auto next_line = [&]() -> std::istringstream {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r\n") != std::string::npos &&
          line[line.find_first_not_of(" \t")] != '#')
        return std::istringstream(line);
    }
    throw std::runtime_error("load_mesh: unexpected end of file at line " +
                             std::to_string(lineno));
  };
  auto parse_error = [&](const std::string& what) {
    return std::runtime_error("load_mesh: " + what + " at line " +
                              std::to_string(lineno));
  };

  int nv, ne, nt;
  {
    auto ss = next_line();
    if (!(ss >> nv >> ne >> nt)) throw parse_error("expected header 'V E T'");
  }
  if (nv < 3 || nt < 1) throw parse_error("invalid counts in header");

  Mesh m;
  m.vertices.resize(nv);
  for (int i = 0; i < nv; ++i) {
    auto ss = next_line();
    if (!(ss >> m.vertices[i].x() >> m.vertices[i].y()))
      throw parse_error("expected vertex coordinates");
  }
  m.triangles.resize(nt);
  for (int t = 0; t < nt; ++t) {
    auto ss = next_line();
    auto& tri = m.triangles[t];
    if (!(ss >> tri[0] >> tri[1] >> tri[2]))
      throw parse_error("expected triangle vertex indices");
    for (int v : tri)
      if (v < 0 || v >= nv)
        throw std::runtime_error("load_mesh: dangling vertex reference " +
                                 std::to_string(v) + " at line " +
                                 std::to_string(lineno));
    if (signed_area(m.vertices[tri[0]], m.vertices[tri[1]], m.vertices[tri[2]]) < 0.0)
      std::swap(tri[1], tri[2]);
  }
  finalize_mesh(m);
  if (m.num_edges() != ne)
    throw std::runtime_error("load_mesh: header claims " + std::to_string(ne) +
                             " edges, derived " + std::to_string(m.num_edges()));
  return m;
}

void save_mesh(const Mesh& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_mesh: cannot open " + path);
  out.precision(17);
  out << m.num_vertices() << " " << m.num_edges() << " " << m.num_triangles() << "\n";
  for (const auto& v : m.vertices) out << v.x() << " " << v.y() << "\n";
  for (const auto& t : m.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
}

}  // namespace lsfem
