#include "wg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "wg/rng.hpp"

namespace wg {

namespace {

double polygon_signed_area(const std::vector<Point>& pts) {
  double a = 0.0;
  const int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; ++i) {
    const Point& p = pts[i];
    const Point& q = pts[(i + 1) % n];
    a += cross2(p, q);
  }
  return 0.5 * a;
}

Point polygon_centroid(const std::vector<Point>& pts, double area) {
  Point c = Point::Zero();
  const int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; ++i) {
    const Point& p = pts[i];
    const Point& q = pts[(i + 1) % n];
    c += (p + q) * cross2(p, q);
  }
  return c / (6.0 * area);
}

void compute_cell_metrics(const std::vector<Point>& vertices, Cell& cell) {
  std::vector<Point> pts;
  pts.reserve(cell.vertex_ids.size());
  for (int v : cell.vertex_ids) pts.push_back(vertices[v]);

  cell.area = polygon_signed_area(pts);
  if (!(cell.area > 0.0))
    throw std::invalid_argument("mesh: cell is not counter-clockwise or has non-positive area");
  cell.centroid = polygon_centroid(pts, cell.area);

  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      d = std::max(d, (pts[i] - pts[j]).norm());
  cell.diameter = d;
}

}  // namespace

int Mesh::local_edge_index(int c, int e) const {
  const auto& es = cell_edges[c];
  for (int l = 0; l < static_cast<int>(es.size()); ++l)
    if (es[l] == e) return l;
  return -1;
}

double Mesh::normal_sign(int c, int e) const {
  const Edge& ed = edges[e];
  if (ed.left_cell == c) return 1.0;
  if (ed.right_cell == c) return -1.0;
  throw std::invalid_argument("mesh: cell is not incident to edge");
}

Point Mesh::outward_normal(int c, int e) const { return normal_sign(c, e) * edges[e].normal; }

Mesh build_mesh(std::vector<Point> vertices, std::vector<std::vector<int>> cell_vertices) {
  Mesh m;
  m.vertices = std::move(vertices);
  m.cells.resize(cell_vertices.size());

  const int nv = m.n_vertices();
  for (std::size_t c = 0; c < cell_vertices.size(); ++c) {
    if (cell_vertices[c].size() < 3)
      throw std::invalid_argument("mesh: cell with fewer than 3 vertices");
    for (int v : cell_vertices[c])
      if (v < 0 || v >= nv) throw std::invalid_argument("mesh: vertex id out of range");
    m.cells[c].vertex_ids = std::move(cell_vertices[c]);
    compute_cell_metrics(m.vertices, m.cells[c]);
  }

  // Discover undirected edges; key = sorted vertex pair. Map iteration order is
  // deterministic but edge ids are assigned in first-seen (cell loop) order so
  // that generated meshes number edges reproducibly.
  std::map<std::pair<int, int>, int> edge_of_pair;
  m.cell_edges.assign(m.cells.size(), {});
  for (int c = 0; c < m.n_cells(); ++c) {
    const auto& vs = m.cells[c].vertex_ids;
    const int ne = static_cast<int>(vs.size());
    m.cell_edges[c].resize(ne);
    for (int l = 0; l < ne; ++l) {
      const int a = vs[l];
      const int b = vs[(l + 1) % ne];
      const auto key = std::minmax(a, b);
      auto it = edge_of_pair.find(key);
      int eid;
      if (it == edge_of_pair.end()) {
        eid = m.n_edges();
        edge_of_pair.emplace(key, eid);
        Edge e;
        e.endpoint_ids = {a, b};  // provisional; re-oriented once left cell is fixed
        e.left_cell = c;
        m.edges.push_back(e);
      } else {
        eid = it->second;
        Edge& e = m.edges[eid];
        if (e.right_cell != -1)
          throw std::invalid_argument("mesh: edge shared by more than two cells");
        e.right_cell = c;
        if (e.left_cell > c) std::swap(e.left_cell, e.right_cell);
      }
      m.cell_edges[c][l] = eid;
    }
  }

  // Fix orientation: endpoints follow the left cell's traversal, normal points
  // out of the left cell (rot90cw of the tangent).
  for (int eid = 0; eid < m.n_edges(); ++eid) {
    Edge& e = m.edges[eid];
    e.is_boundary = (e.right_cell == -1);
    const Cell& lc = m.cells[e.left_cell];
    const auto& vs = lc.vertex_ids;
    const int ne = static_cast<int>(vs.size());
    bool found = false;
    for (int l = 0; l < ne; ++l) {
      const int a = vs[l];
      const int b = vs[(l + 1) % ne];
      const auto key0 = std::minmax(a, b);
      const auto key1 = std::minmax(e.endpoint_ids[0], e.endpoint_ids[1]);
      if (key0 == key1) {
        e.endpoint_ids = {a, b};
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("mesh: inconsistent edge incidence");

    const Point pa = m.vertices[e.endpoint_ids[0]];
    const Point pb = m.vertices[e.endpoint_ids[1]];
    e.length = (pb - pa).norm();
    if (!(e.length > 0.0)) throw std::invalid_argument("mesh: zero-length edge");
    e.tangent = (pb - pa) / e.length;
    e.normal = rot90cw(e.tangent);
    if (e.is_boundary) m.boundary_edge_ids.push_back(eid);
  }

  m.interior_index_of_edge.assign(m.n_edges(), -1);
  for (int eid = 0; eid < m.n_edges(); ++eid) {
    if (!m.edges[eid].is_boundary) {
      m.interior_index_of_edge[eid] = static_cast<int>(m.interior_edges.size());
      m.interior_edges.push_back(eid);
    }
  }

  m.mesh_size = 0.0;
  for (const Cell& c : m.cells) m.mesh_size = std::max(m.mesh_size, c.diameter);
  return m;
}

Mesh structured_triangle_mesh(int n) {
  if (n < 1) throw std::invalid_argument("structured_triangle_mesh: n must be >= 1");
  std::vector<Point> verts;
  verts.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      verts.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);

  auto idx = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::vector<int>> cells;
  cells.reserve(2u * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = idx(i, j), v10 = idx(i + 1, j);
      const int v11 = idx(i + 1, j + 1), v01 = idx(i, j + 1);
      cells.push_back({v00, v10, v11});  // lower triangle, diagonal v00-v11
      cells.push_back({v00, v11, v01});  // upper triangle
    }
  }
  return build_mesh(std::move(verts), std::move(cells));
}

Mesh structured_quad_mesh(int n) {
  if (n < 1) throw std::invalid_argument("structured_quad_mesh: n must be >= 1");
  std::vector<Point> verts;
  verts.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      verts.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);

  auto idx = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::vector<int>> cells;
  cells.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      cells.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)});
  return build_mesh(std::move(verts), std::move(cells));
}

Mesh perturb_interior(const Mesh& mesh, double factor, std::uint64_t seed) {
  if (factor < 0.0 || factor > 0.2)
    throw std::invalid_argument("perturb_interior: factor must lie in [0, 0.2]");
  if (factor == 0.0) return mesh;

  std::vector<bool> on_boundary(mesh.n_vertices(), false);
  for (int eid : mesh.boundary_edge_ids) {
    on_boundary[mesh.edges[eid].endpoint_ids[0]] = true;
    on_boundary[mesh.edges[eid].endpoint_ids[1]] = true;
  }

  std::vector<std::vector<int>> cell_vertices(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) cell_vertices[c] = mesh.cells[c].vertex_ids;

  double f = factor;
  for (int attempt = 0; attempt <= 10; ++attempt) {
    Rng rng(seed);
    std::vector<Point> verts = mesh.vertices;
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      if (on_boundary[v]) continue;
      const double r = f * mesh.mesh_size * std::sqrt(rng.uniform());
      const double phi = 2.0 * M_PI * rng.uniform();
      verts[v] += Point(r * std::cos(phi), r * std::sin(phi));
    }
    bool ok = true;
    for (int c = 0; c < mesh.n_cells() && ok; ++c) {
      std::vector<Point> pts;
      for (int v : cell_vertices[c]) pts.push_back(verts[v]);
      if (!(polygon_signed_area(pts) > 0.0)) ok = false;
    }
    if (ok) return build_mesh(std::move(verts), cell_vertices);
    f *= 0.5;
  }
  throw std::runtime_error("perturb_interior: could not keep all cell areas positive");
}

void validate_mesh(const Mesh& m) {
  auto fail = [](const std::string& what) { throw std::runtime_error("mesh validation: " + what); };

  if (m.n_vertices() - m.n_edges() + m.n_cells() != 1) fail("Euler relation V - E + C != 1");
  if (!(m.mesh_size > 0.0) || !std::isfinite(m.mesh_size)) fail("mesh size not positive/finite");

  for (int c = 0; c < m.n_cells(); ++c) {
    const Cell& cell = m.cells[c];
    if (!(cell.area > 0.0)) fail("non-positive cell area");
    std::vector<Point> pts;
    for (int v : cell.vertex_ids) pts.push_back(m.vertices[v]);
    if (polygon_signed_area(pts) <= 0.0) fail("cell not counter-clockwise");
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
    if (std::abs(d - cell.diameter) > 1e-12 * (1.0 + d)) fail("stored diameter mismatch");

    // Closed polygon: sum of outward normals weighted by edge lengths vanishes.
    Point s = Point::Zero();
    for (int e : m.cell_edges[c]) s += m.outward_normal(c, e) * m.edges[e].length;
    if (s.norm() > 1e-12 * cell.diameter * m.cell_edges[c].size())
      fail("outward normals do not close around cell");
  }

  std::vector<int> incidence(m.n_edges(), 0);
  for (int c = 0; c < m.n_cells(); ++c)
    for (int e : m.cell_edges[c]) ++incidence[e];

  for (int eid = 0; eid < m.n_edges(); ++eid) {
    const Edge& e = m.edges[eid];
    if (e.is_boundary && incidence[eid] != 1) fail("boundary edge without exactly one cell");
    if (!e.is_boundary && incidence[eid] != 2) fail("interior edge without exactly two cells");
    if (!e.is_boundary && e.left_cell >= e.right_cell) fail("left/right cell order violated");
    if (std::abs(e.normal.norm() - 1.0) > 1e-12) fail("normal not unit");
    if (std::abs(e.tangent.norm() - 1.0) > 1e-12) fail("tangent not unit");
    if (std::abs(e.normal.dot(e.tangent)) > 1e-12) fail("normal and tangent not orthogonal");
    if ((e.tangent - rot90ccw(e.normal)).norm() > 1e-12) fail("tangent != rot90ccw(normal)");
    if (!(e.length > 0.0)) fail("non-positive edge length");

    // The left cell must traverse the edge in the stored endpoint order, the
    // right cell (if any) in the opposite order.
    auto traversal = [&](int c) {
      const auto& vs = m.cells[c].vertex_ids;
      const int nv = static_cast<int>(vs.size());
      for (int l = 0; l < nv; ++l) {
        if (vs[l] == e.endpoint_ids[0] && vs[(l + 1) % nv] == e.endpoint_ids[1]) return +1;
        if (vs[l] == e.endpoint_ids[1] && vs[(l + 1) % nv] == e.endpoint_ids[0]) return -1;
      }
      return 0;
    };
    if (traversal(e.left_cell) != +1) fail("normal does not point out of left cell");
    if (!e.is_boundary && traversal(e.right_cell) != -1)
      fail("normal does not point into right cell");
  }
}

void save_mesh(const Mesh& m, std::ostream& out) {
  out << "wgmesh 1\n";
  out << m.n_vertices() << "\n";
  out.precision(17);
  for (const Point& p : m.vertices) out << p.x() << " " << p.y() << "\n";
  out << m.n_cells() << "\n";
  for (const Cell& c : m.cells) {
    out << c.vertex_ids.size();
    for (int v : c.vertex_ids) out << " " << v;
    out << "\n";
  }
}

Mesh load_mesh(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "wgmesh" || version != 1)
    throw std::runtime_error("load_mesh: not a 'wgmesh 1' file");
  int nv = 0;
  in >> nv;
  if (!in || nv < 3) throw std::runtime_error("load_mesh: bad vertex count");
  std::vector<Point> verts(nv);
  for (int i = 0; i < nv; ++i) in >> verts[i].x() >> verts[i].y();
  int nc = 0;
  in >> nc;
  if (!in || nc < 1) throw std::runtime_error("load_mesh: bad cell count");
  std::vector<std::vector<int>> cells(nc);
  for (int c = 0; c < nc; ++c) {
    int k = 0;
    in >> k;
    if (!in || k < 3) throw std::runtime_error("load_mesh: bad cell vertex count");
    cells[c].resize(k);
    for (int l = 0; l < k; ++l) in >> cells[c][l];
  }
  if (!in) throw std::runtime_error("load_mesh: truncated file");
  return build_mesh(std::move(verts), std::move(cells));
}

Mesh load_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mesh: cannot open " + path);
  return load_mesh(in);
}

void save_mesh_file(const Mesh& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_mesh: cannot open " + path);
  save_mesh(m, out);
}

}  // namespace wg
