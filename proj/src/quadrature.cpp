#include "wg/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace wg {

namespace {

// Golub-Welsch for the Jacobi weight (1-x)^alpha (1+x)^beta on [-1, 1]:
// nodes are the eigenvalues of the symmetric tridiagonal recurrence matrix,
// weights mu0 * (first eigenvector component)^2.
void jacobi_rule_m11(int n, double alpha, double beta, std::vector<double>& x,
                     std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("quadrature: need at least one point");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  const double ab = alpha + beta;
  for (int i = 0; i < n; ++i) {
    const double den = (2.0 * i + ab) * (2.0 * i + ab + 2.0);
    J(i, i) = (den == 0.0) ? 0.0 : (beta * beta - alpha * alpha) / den;
  }
  for (int i = 1; i < n; ++i) {
    const double num = 4.0 * i * (i + alpha) * (i + beta) * (i + ab);
    const double den =
        (2.0 * i + ab) * (2.0 * i + ab) * (2.0 * i + ab + 1.0) * (2.0 * i + ab - 1.0);
    const double b = std::sqrt(num / den);
    J(i, i - 1) = J(i - 1, i) = b;
  }
  const double mu0 =
      std::pow(2.0, ab + 1.0) * std::tgamma(alpha + 1.0) * std::tgamma(beta + 1.0) /
      std::tgamma(ab + 2.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("quadrature: Jacobi matrix eigendecomposition failed");
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    w[i] = mu0 * v0 * v0;
  }
}

}  // namespace

void gauss_legendre01(int n, std::vector<double>& x, std::vector<double>& w) {
  jacobi_rule_m11(n, 0.0, 0.0, x, w);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5 * (x[i] + 1.0);
    w[i] *= 0.5;
  }
}

void gauss_jacobi01(int n, double alpha, std::vector<double>& x, std::vector<double>& w) {
  jacobi_rule_m11(n, alpha, 0.0, x, w);
  const double scale = std::pow(2.0, -alpha - 1.0);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5 * (x[i] + 1.0);
    w[i] *= scale;
  }
}

void triangle_rule(const Point& a, const Point& b, const Point& c, int d,
                   std::vector<Point>& pts, std::vector<double>& wts) {
  if (d < 0) throw std::invalid_argument("triangle_rule: negative exactness");
  const int n = (d + 2) / 2;  // ceil((d+1)/2)

  // Conical product on the reference triangle {x,y >= 0, x+y <= 1} via the
  // collapsed map (xi, eta) -> (xi (1-eta), eta) with Jacobian (1-eta):
  // Gauss-Legendre in xi, Gauss-Jacobi weight (1-eta) in eta.
  std::vector<double> xg, wg, xj, wj;
  gauss_legendre01(n, xg, wg);
  gauss_jacobi01(n, 1.0, xj, wj);

  const double area2 = cross2(b - a, c - a);  // 2 * signed area
  pts.clear();
  wts.clear();
  pts.reserve(static_cast<std::size_t>(n) * n);
  wts.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = xg[i] * (1.0 - xj[j]);
      const double y = xj[j];
      pts.push_back(a + x * (b - a) + y * (c - a));
      wts.push_back(wg[i] * wj[j] * area2);  // ref weights sum to 1/2
    }
  }
}

CellQuad cell_quadrature(const Mesh& mesh, int cell_id, int exactness) {
  if (exactness < 0) throw std::invalid_argument("cell_quadrature: negative exactness");
  if (exactness > 40) throw std::runtime_error("cell_quadrature: exactness above supported table");

  const Cell& cell = mesh.cells[cell_id];
  CellQuad rule;
  rule.exactness = exactness;
  const int nv = static_cast<int>(cell.vertex_ids.size());
  std::vector<Point> pts;
  std::vector<double> wts;
  for (int l = 0; l < nv; ++l) {
    const Point a = mesh.vertices[cell.vertex_ids[l]];
    const Point b = mesh.vertices[cell.vertex_ids[(l + 1) % nv]];
    if (triangle_signed_area(cell.centroid, a, b) <= 0.0)
      throw std::invalid_argument("cell_quadrature: cell not star-shaped w.r.t. centroid");
    triangle_rule(cell.centroid, a, b, exactness, pts, wts);
    rule.points.insert(rule.points.end(), pts.begin(), pts.end());
    rule.weights.insert(rule.weights.end(), wts.begin(), wts.end());
  }
  return rule;
}

EdgeQuad edge_quadrature(const Mesh& mesh, int edge_id, int exactness) {
  if (exactness < 0) throw std::invalid_argument("edge_quadrature: negative exactness");
  const Edge& e = mesh.edges[edge_id];
  const Point a = mesh.vertices[e.endpoint_ids[0]];
  const Point b = mesh.vertices[e.endpoint_ids[1]];

  const int n = (exactness + 2) / 2;
  std::vector<double> x, w;
  gauss_legendre01(n, x, w);

  EdgeQuad rule;
  rule.exactness = exactness;
  rule.points.resize(n);
  rule.weights.resize(n);
  rule.arclen.resize(n);
  for (int q = 0; q < n; ++q) {
    rule.points[q] = a + x[q] * (b - a);
    rule.weights[q] = w[q] * e.length;
    rule.arclen[q] = x[q] * e.length;
  }
  return rule;
}

}  // namespace wg
