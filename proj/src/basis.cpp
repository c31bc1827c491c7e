#include "wg/basis.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace wg {

CellBasis::CellBasis(const Mesh& mesh, int cell_id, int degree, const CellQuad& quad) {
  if (degree < 0) throw std::invalid_argument("cell_basis: negative degree");
  cell_id_ = cell_id;
  degree_ = degree;
  dim_ = poly_space_dim(degree);
  center_ = mesh.cells[cell_id].centroid;
  scale_ = mesh.cells[cell_id].diameter;

  powers_.reserve(dim_);
  for (int d = 0; d <= degree; ++d)
    for (int a = d; a >= 0; --a) powers_.push_back({a, d - a});

  // Gram matrix of the scaled monomials under exact quadrature, then Cholesky:
  // columns of L^{-T} express the orthonormal functions in the monomials.
  Eigen::MatrixXd mono = monomials(quad.points, 0, 0);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(dim_, dim_);
  for (int q = 0; q < static_cast<int>(quad.points.size()); ++q)
    G += quad.weights[q] * (mono.row(q).transpose() * mono.row(q));

  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("cell_basis: singular Gram matrix (degenerate cell)");
  coeff_ = Eigen::MatrixXd::Identity(dim_, dim_);
  llt.matrixU().solveInPlace(coeff_);  // coeff = U^{-1} = L^{-T}
}

Eigen::MatrixXd CellBasis::monomials(const std::vector<Point>& pts, int dx, int dy) const {
  const int np = static_cast<int>(pts.size());
  Eigen::MatrixXd out(np, dim_);
  const double inv_h = 1.0 / scale_;
  for (int q = 0; q < np; ++q) {
    const double x = (pts[q].x() - center_.x()) * inv_h;
    const double y = (pts[q].y() - center_.y()) * inv_h;
    for (int i = 0; i < dim_; ++i) {
      const int a = powers_[i][0];
      const int b = powers_[i][1];
      if (a < dx || b < dy) {
        out(q, i) = 0.0;
        continue;
      }
      double c = 1.0;
      for (int r = 0; r < dx; ++r) c *= (a - r);
      for (int r = 0; r < dy; ++r) c *= (b - r);
      out(q, i) = c * std::pow(x, a - dx) * std::pow(y, b - dy) * std::pow(inv_h, dx + dy);
    }
  }
  return out;
}

Eigen::MatrixXd CellBasis::values(const std::vector<Point>& pts) const {
  return monomials(pts, 0, 0) * coeff_;
}

void CellBasis::gradients(const std::vector<Point>& pts, Eigen::MatrixXd& gx,
                          Eigen::MatrixXd& gy) const {
  gx = monomials(pts, 1, 0) * coeff_;
  gy = monomials(pts, 0, 1) * coeff_;
}

void CellBasis::hessians(const std::vector<Point>& pts, Eigen::MatrixXd& hxx,
                         Eigen::MatrixXd& hxy, Eigen::MatrixXd& hyy) const {
  hxx = monomials(pts, 2, 0) * coeff_;
  hxy = monomials(pts, 1, 1) * coeff_;
  hyy = monomials(pts, 0, 2) * coeff_;
}

EdgeBasis::EdgeBasis(const Mesh& mesh, int edge_id, int degree) {
  if (degree < 0) throw std::invalid_argument("edge_basis: negative degree");
  edge_id_ = edge_id;
  degree_ = degree;
  length_ = mesh.edges[edge_id].length;
  if (!(length_ > 0.0)) throw std::runtime_error("edge_basis: degenerate edge");
}

Eigen::MatrixXd EdgeBasis::values(const std::vector<double>& arclen) const {
  const int np = static_cast<int>(arclen.size());
  Eigen::MatrixXd out(np, degree_ + 1);
  for (int q = 0; q < np; ++q) {
    // Legendre recurrence in t = 2 s/L - 1, normalized to unit L2(e) norm.
    const double t = 2.0 * arclen[q] / length_ - 1.0;
    double pm1 = 1.0, p = t;
    for (int m = 0; m <= degree_; ++m) {
      double val;
      if (m == 0) {
        val = 1.0;
      } else if (m == 1) {
        val = t;
      } else {
        val = ((2.0 * m - 1.0) * t * p - (m - 1.0) * pm1) / m;
        pm1 = p;
        p = val;
      }
      out(q, m) = val * std::sqrt((2.0 * m + 1.0) / length_);
    }
  }
  return out;
}

CellBasis cell_basis(const Mesh& mesh, int cell_id, int degree) {
  const CellQuad quad = cell_quadrature(mesh, cell_id, 2 * degree);
  return CellBasis(mesh, cell_id, degree, quad);
}

EdgeBasis edge_basis(const Mesh& mesh, int edge_id, int degree) {
  return EdgeBasis(mesh, edge_id, degree);
}

}  // namespace wg
