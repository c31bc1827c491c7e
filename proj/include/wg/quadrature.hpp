#pragma once

#include <vector>

#include "wg/geometry.hpp"
#include "wg/mesh.hpp"

namespace wg {

// Quadrature on a 2D cell. Exact for bivariate polynomials of total degree
// <= exactness; weights are positive and sum to the cell area.
struct CellQuad {
  std::vector<Point> points;
  std::vector<double> weights;
  int exactness = 0;
};

// Quadrature on an edge. `arclen[q]` is the arc-length coordinate of point q
// measured from the edge's first endpoint; weights sum to the edge length.
struct EdgeQuad {
  std::vector<Point> points;
  std::vector<double> weights;
  std::vector<double> arclen;
  int exactness = 0;
};

// Gauss-Legendre nodes/weights on [0, 1]; exact for degree <= 2n-1.
void gauss_legendre01(int n, std::vector<double>& x, std::vector<double>& w);

// Gauss-Jacobi nodes/weights on [0, 1] for the weight (1-x)^alpha;
// exact for degree <= 2n-1 against that weight.
void gauss_jacobi01(int n, double alpha, std::vector<double>& x, std::vector<double>& w);

// Conical-product rule on the triangle (a, b, c), exact for total degree <= d.
void triangle_rule(const Point& a, const Point& b, const Point& c, int d,
                   std::vector<Point>& pts, std::vector<double>& wts);

// Fan-triangulates the (star-shaped) cell from its centroid and applies a
// triangle rule of the requested exactness on each sub-triangle.
// Throws std::invalid_argument for d < 0 or a cell not star-shaped w.r.t. its
// centroid, std::runtime_error above the supported exactness (d <= 40).
CellQuad cell_quadrature(const Mesh& mesh, int cell_id, int exactness);

// Gauss-Legendre with ceil((d+1)/2) points mapped to the edge.
EdgeQuad edge_quadrature(const Mesh& mesh, int edge_id, int exactness);

}  // namespace wg
