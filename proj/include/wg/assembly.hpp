#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "wg/mesh.hpp"
#include "wg/weakops.hpp"

namespace wg {

// ---------------------------------------------------------------------------
// Global dof layouts
// ---------------------------------------------------------------------------

// Shared-trace layout (V_h): all cell blocks first, then one trace block
// [v_b | v_gx | v_gy] per edge.
struct SharedDofMap {
  int Nk = 0, m = 0, ncells = 0, nedges = 0, total = 0;

  SharedDofMap() = default;
  explicit SharedDofMap(const Discretization& d)
      : Nk(d.Nk), m(d.m), ncells(d.mesh->n_cells()), nedges(d.mesh->n_edges()) {
    total = ncells * Nk + nedges * 3 * m;
  }
  int cell_base(int c) const { return c * Nk; }
  int edge_base(int e) const { return ncells * Nk + e * 3 * m; }
  int vb(int e) const { return edge_base(e); }
  int vg(int e, int comp) const { return edge_base(e) + m + comp * m; }
};

// Two-sided layout (W_h): cell blocks first, then one trace block per
// (cell, local edge) incidence, so interior edges carry two copies.
struct TwoSidedDofMap {
  int Nk = 0, m = 0, ncells = 0, total = 0;
  std::vector<int> incidence_prefix;  // per cell, start index of its edge slots

  TwoSidedDofMap() = default;
  explicit TwoSidedDofMap(const Discretization& d);
  int cell_base(int c) const { return c * Nk; }
  int side_base(int c, int l) const {
    return ncells * Nk + (incidence_prefix[c] + l) * 3 * m;
  }
  int side_vb(int c, int l) const { return side_base(c, l); }
  int side_vg(int c, int l, int comp) const { return side_base(c, l) + m + comp * m; }
};

// Lagrange multiplier in Xi_h: one L-side copy per interior edge, blocks
// [lambda_b | lambda_gx | lambda_gy]; the R-side value is the negation, and
// boundary edges carry no multiplier (this storage enforces both).
struct Multiplier {
  const Mesh* mesh = nullptr;
  int m = 0;
  Eigen::VectorXd coeffs;  // 3 m per interior edge, compact interior order
  int base(int interior_index) const { return interior_index * 3 * m; }
};

// Interface unknowns of the reduced system (B_h): one block per edge,
// boundary edges included (they hold the boundary lift).
struct TraceField {
  const Mesh* mesh = nullptr;
  int m = 0;
  Eigen::VectorXd coeffs;  // 3 m per edge
  int base(int edge) const { return edge * 3 * m; }
};

TraceField zero_trace_field(const Discretization& d);
Multiplier zero_multiplier(const Discretization& d);

// ---------------------------------------------------------------------------
// Boundary data
// ---------------------------------------------------------------------------

struct BoundaryData {
  ScalarFunc xi;  // u on the boundary
  // du/dn with n the outward domain normal at the evaluation point
  std::function<double(const Point&, const Point& n)> nu;
  // tangential derivative of xi along a boundary edge with tangent tau
  std::function<double(const Point&, const Point& tau)> dxi_dtau;
};

// Boundary lift G = {G_b, G_g}: G_b = Q_b xi and
// G_g = (Q_b nu) n + (Q_b(grad xi . tau)) tau on boundary edges, zero on
// interior ones.
TraceField apply_boundary_conditions(const BoundaryData& bc, const Discretization& d);

// ---------------------------------------------------------------------------
// Jump / similarity and form evaluation helpers
// ---------------------------------------------------------------------------

// Local dofs of a field on one cell, in LocalDofLayout order. Works for both
// layouts; a shared-trace field is read as its two-sided embedding.
Eigen::VectorXd gather_local(const Discretization& d, const WGField& v, int cell);

// Jump of a two-sided field across an edge: L-copy minus R-copy
// ([v_b | v_gx | v_gy], one-sided value on boundary edges).
Eigen::VectorXd jump(const Discretization& d, const WGField& v, int edge);

// Similarity of per-side trace data: L + R on interior edges, the single
// value on boundary edges.
Eigen::VectorXd similarity(const Eigen::VectorXd& left, const Eigen::VectorXd& right,
                           bool boundary);

// Duplicates shared traces into a two-sided field.
WGField embed_two_sided(const Discretization& d, const WGField& shared);

// a_s(u, v) = sum_T loc(u)' A_T^s loc(v); accepts any layout combination.
double as_form(const Discretization& d, const WGField& u, const WGField& v);

// b(v, lambda) = sum_e <jump(v), lambda_L>_e via the signed coefficient
// scatter (+1 on L copies, -1 on R copies).
double b_form(const Discretization& d, const WGField& v, const Multiplier& lambda);

// Same form evaluated the per-element way, sum_T <v|_dT, lambda|_dT>_dT,
// with the multiplier seen from each side (test path for the form identity).
double b_form_per_element(const Discretization& d, const WGField& v, const Multiplier& lambda);

// ---------------------------------------------------------------------------
// Global systems
// ---------------------------------------------------------------------------

struct LinearSystem {
  Eigen::SparseMatrix<double> A;  // symmetric, free unknowns only
  Eigen::VectorXd rhs;
  // free unknown <-> full layout translation
  std::vector<int> free_to_global;
  std::vector<int> global_to_free;  // -1 for eliminated (boundary lift) dofs
  Eigen::VectorXd lift;             // full-layout vector holding boundary values
};

struct WgSystem {
  LinearSystem sys;
  SharedDofMap map;
};

struct HwgSystem {
  LinearSystem sys;  // saddle blocks [[A, B'], [B, 0]] over (u free; lambda)
  TwoSidedDofMap map;
  int n_u_free = 0;
  int n_lambda = 0;
};

// SPD system over interior V_h dofs (boundary trace dofs eliminated by the
// lift, right-hand side corrected accordingly).
WgSystem assemble_wg(const Discretization& d, const ScalarFunc& f, const BoundaryData& bc);

// Symmetric indefinite saddle system over (interior W_h dofs; Xi_h dofs).
// The multiplier is coupled so that it approximates
// {dn(laplace u), -H(u) n}; see docs/method_notes.md for the convention.
HwgSystem assemble_hwg(const Discretization& d, const ScalarFunc& f, const BoundaryData& bc);

// Cell load vector (f, basis)_T.
Eigen::VectorXd cell_load(const Discretization& d, int cell, const ScalarFunc& f);

}  // namespace wg
