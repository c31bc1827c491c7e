#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "wg/basis.hpp"
#include "wg/mesh.hpp"
#include "wg/quadrature.hpp"

namespace wg {

using ScalarFunc = std::function<double(const Point&)>;
using VectorFunc = std::function<Point(const Point&)>;

// Local unknowns of a discrete weak function on one cell:
//   [ v_0 : N_k ] then per local edge l: [ v_b : m ][ v_gx : m ][ v_gy : m ]
// with m = k-1 (dim of P_{k-2} on an edge).
struct LocalDofLayout {
  int cell_id = -1;
  int k = 0;
  int n_edges = 0;
  int n_cell = 0;  // N_k
  int m = 0;
  int total = 0;

  int edge_block(int l) const { return n_cell + 3 * m * l; }
  int vb(int l) const { return edge_block(l); }
  int vg(int l, int comp) const { return edge_block(l) + m + comp * m; }
};

// Per-cell matrices of the method. W[2i+j] maps local dofs to the
// orthonormal P_{k-2}(T) coefficients of the discrete weak second derivative
// in directions (i, j); A = sum_ij W_ij' W_ij, S the stabilizer, As = A + S.
struct LocalElementOperators {
  LocalDofLayout layout;
  std::array<Eigen::MatrixXd, 4> W;
  Eigen::MatrixXd S;
  Eigen::MatrixXd A;
  Eigen::MatrixXd As;

  // Per local edge: trace projections onto the edge basis (m x N_k):
  // Qb_v0 projects the v_0 trace, Qb_gx/Qb_gy the components of its gradient.
  std::vector<Eigen::MatrixXd> Qb_v0, Qb_gx, Qb_gy;
};

// Everything assembled once per (mesh, k): bases, quadrature, local operators.
// Immutable after construction; safe to share across threads.
struct Discretization {
  const Mesh* mesh = nullptr;
  int k = 0;
  int Nk = 0;   // dim P_k(T)
  int Nk2 = 0;  // dim P_{k-2}(T)
  int m = 0;    // k-1

  std::vector<CellBasis> cbasis;              // degree k, one per cell
  std::vector<EdgeBasis> ebasis;              // degree k-2, one per edge
  std::vector<CellQuad> cquad;                // exactness 2k+2 (forms and loads)
  std::vector<EdgeQuad> equad;                // exactness 2k (forms)
  std::vector<EdgeQuad> equad_data;           // exactness 2k+4 (analytic data)
  std::vector<LocalElementOperators> ops;
};

Discretization build_discretization(const Mesh& mesh, int k, int threads = 1);

// Standalone per-cell construction (used by build_discretization; also the
// spec-level entry point for tests).
LocalElementOperators local_operators(const Mesh& mesh, int cell_id, int k);

// The four weak-Hessian maps alone, production form: row m of W_ij is
// (v_0, d2_ji phi_m)_T - <v_b n_i, d_j phi_m>_dT + <v_gi, phi_m n_j>_dT
// with n the outward normal of the cell on each edge.
std::array<Eigen::MatrixXd, 4> weak_hessian_maps(const Mesh& mesh, int cell_id, int k);

// Integrated-by-parts form (test path):
// (d2_ij v_0, phi)_T + <(v_0 - v_b) n_i, d_j phi>_dT - <(d_i v_0 - v_gi) n_j, phi>_dT.
std::array<Eigen::MatrixXd, 4> weak_hessian_maps_ibp(const Mesh& mesh, int cell_id, int k);

Eigen::MatrixXd local_stabilizer(const Mesh& mesh, int cell_id, int k);

// Coefficients of the L2 projection onto P_r(T) in the leading block of the
// cell's orthonormal basis (requires r <= basis degree).
Eigen::VectorXd project_cell(const CellBasis& basis, const CellQuad& quad, int r,
                             const ScalarFunc& f);

// Coefficients of the L2(e) projection onto the edge basis.
Eigen::VectorXd project_edge(const EdgeBasis& basis, const EdgeQuad& quad, const ScalarFunc& f);

// Discrete weak functions. Shared layout stores one trace copy per edge
// (the space V_h), two_sided one copy per (cell, edge) incidence (W_h).
enum class TraceLayout { shared, two_sided };

struct WGField {
  TraceLayout layout = TraceLayout::shared;
  int k = 0;
  const Mesh* mesh = nullptr;
  Eigen::VectorXd coeffs;
};

// Q_h u = {Q_0 u, Q_b u, Q_b(grad u)} in shared-trace layout.
WGField project_Qh(const Discretization& disc, const ScalarFunc& u, const VectorFunc& grad_u);

}  // namespace wg
