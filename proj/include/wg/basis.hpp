#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "wg/mesh.hpp"
#include "wg/quadrature.hpp"

namespace wg {

inline int poly_space_dim(int degree) { return (degree + 1) * (degree + 2) / 2; }

// L2(T)-orthonormal basis of P_r(T), built by Cholesky orthonormalization of
// scaled centered monomials ((x-x_T)/h_T)^a ((y-y_T)/h_T)^b in graded
// lexicographic order. Because the order is graded, the leading
// poly_space_dim(s) functions form an orthonormal basis of P_s(T) for any
// s <= r.
class CellBasis {
 public:
  CellBasis() = default;
  CellBasis(const Mesh& mesh, int cell_id, int degree, const CellQuad& quad);

  int cell_id() const { return cell_id_; }
  int degree() const { return degree_; }
  int dim() const { return dim_; }

  // values(q, i) = phi_i at points[q]; gradients/Hessians analogous.
  Eigen::MatrixXd values(const std::vector<Point>& pts) const;
  void gradients(const std::vector<Point>& pts, Eigen::MatrixXd& gx, Eigen::MatrixXd& gy) const;
  void hessians(const std::vector<Point>& pts, Eigen::MatrixXd& hxx, Eigen::MatrixXd& hxy,
                Eigen::MatrixXd& hyy) const;

  // Coefficients of each basis function in the scaled monomial family
  // (column i = function i); exposed for tests.
  const Eigen::MatrixXd& monomial_coefficients() const { return coeff_; }
  const std::vector<std::array<int, 2>>& monomial_powers() const { return powers_; }
  const Point& center() const { return center_; }
  double scale() const { return scale_; }

 private:
  // raw scaled-monomial values and derivatives at the given points
  Eigen::MatrixXd monomials(const std::vector<Point>& pts, int dx, int dy) const;

  int cell_id_ = -1;
  int degree_ = -1;
  int dim_ = 0;
  Point center_ = Point::Zero();
  double scale_ = 1.0;
  std::vector<std::array<int, 2>> powers_;
  Eigen::MatrixXd coeff_;
};

// L2(e)-orthonormal Legendre basis in the arc-length parameter of the edge;
// function m has polynomial degree exactly m.
class EdgeBasis {
 public:
  EdgeBasis() = default;
  EdgeBasis(const Mesh& mesh, int edge_id, int degree);

  int edge_id() const { return edge_id_; }
  int degree() const { return degree_; }
  int dim() const { return degree_ + 1; }
  double length() const { return length_; }

  // values(q, m) = phi_m at arc-length arclen[q]
  Eigen::MatrixXd values(const std::vector<double>& arclen) const;

 private:
  int edge_id_ = -1;
  int degree_ = -1;
  double length_ = 0.0;
};

CellBasis cell_basis(const Mesh& mesh, int cell_id, int degree);
EdgeBasis edge_basis(const Mesh& mesh, int edge_id, int degree);

}  // namespace wg
