#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wg/geometry.hpp"

namespace wg {

struct Cell {
  std::vector<int> vertex_ids;  // CCW loop
  Point centroid = Point::Zero();
  double diameter = 0.0;  // h_T = max pairwise vertex distance
  double area = 0.0;
};

// Undirected edge with a fixed orientation convention:
//   * left_cell is the incident cell with the smaller cell index,
//   * endpoints are ordered the way the left cell traverses the edge in its
//     CCW loop, so tangent = (b - a)/|b - a| and normal = rot90cw(tangent)
//     points out of the left cell (and out of the domain on the boundary),
//   * tangent == rot90ccw(normal).
struct Edge {
  std::array<int, 2> endpoint_ids{-1, -1};
  int left_cell = -1;
  int right_cell = -1;  // -1 on boundary edges
  double length = 0.0;  // h_e
  Point normal = Point::Zero();
  Point tangent = Point::Zero();
  bool is_boundary = false;
};

class Mesh {
 public:
  std::vector<Point> vertices;
  std::vector<Cell> cells;
  std::vector<Edge> edges;
  std::vector<int> boundary_edge_ids;

  // cell_edges[c][l] is the edge between cell c's vertices l and l+1.
  std::vector<std::vector<int>> cell_edges;

  // Compact numbering of interior edges (Xi_h / reduced-system dofs live there).
  std::vector<int> interior_edges;              // interior edge ids, ascending
  std::vector<int> interior_index_of_edge;      // edge id -> compact index, -1 on boundary

  double mesh_size = 0.0;  // h = max_T h_T

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
  int n_interior_edges() const { return static_cast<int>(interior_edges.size()); }
  int n_boundary_edges() const { return static_cast<int>(boundary_edge_ids.size()); }

  // Local index of edge e within cell c (position in cell_edges[c]); -1 if absent.
  int local_edge_index(int c, int e) const;

  // Outward normal of cell c on edge e: +normal if c is the left cell, else -normal.
  Point outward_normal(int c, int e) const;
  double normal_sign(int c, int e) const;
};

// Builds edges, orientation data and metrics from a vertex/cell description.
// Throws std::invalid_argument on malformed input (non-CCW cells, dangling
// vertex ids, an edge shared by more than two cells).
Mesh build_mesh(std::vector<Point> vertices, std::vector<std::vector<int>> cell_vertices);

// n x n grid of sub-squares, each split along the (i,j)->(i+1,j+1) diagonal.
Mesh structured_triangle_mesh(int n);

// n x n grid of axis-aligned squares.
Mesh structured_quad_mesh(int n);

// Displaces interior vertices by deterministic pseudo-random offsets of
// magnitude <= factor * h. Boundary vertices stay put. If any cell degenerates
// the whole perturbation is retried from the input mesh with factor/2, up to
// 10 times; throws std::runtime_error if positivity cannot be restored.
Mesh perturb_interior(const Mesh& mesh, double factor, std::uint64_t seed);

// Full invariant check: positive CCW areas, Euler relation V - E + C = 1,
// edge incidence counts, unit and mutually orthogonal normal/tangent pairs,
// left/right orientation consistency, closed normal sum per cell.
// Throws std::runtime_error naming the first violated invariant.
void validate_mesh(const Mesh& mesh);

// Plain-text mesh format, version header "wgmesh 1" (see docs/file_formats.md).
void save_mesh(const Mesh& mesh, std::ostream& out);
Mesh load_mesh(std::istream& in);
Mesh load_mesh_file(const std::string& path);
void save_mesh_file(const Mesh& mesh, const std::string& path);

}  // namespace wg
