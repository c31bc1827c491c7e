#pragma once

#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "wg/assembly.hpp"
#include "wg/solvers.hpp"
#include "wg/weakops.hpp"

namespace wg {

// Per-cell factorizations for the variable-reduction solver: the local system
// A_T^s split into the v_0 block (Cholesky-factored; positive definite by the
// stabilizer) and its coupling to the trace block.
struct CondensedCache {
  const Discretization* disc = nullptr;
  struct CellData {
    Eigen::LLT<Eigen::MatrixXd> llt00;
    Eigen::MatrixXd A0t;  // Nk x nt
    Eigen::MatrixXd Att;  // nt x nt
  };
  std::vector<CellData> cells;

  // Exact diagonal of S_0 (per edge dof, edge-major over all edges), assembled
  // from the per-cell local Schur complements; feeds the CG preconditioner.
  Eigen::VectorXd s0_diag;
};

CondensedCache build_condensed_cache(const Discretization& d, int threads = 1);

// Step 1: w_0 = D_f({w_b, w_g}) solving a_{s,T}(w_h, {v_0,0,0}) = (f, v_0)_T.
// `traces` is the cell's trace block (3m per local edge), `fload` the cell
// load (zero vector for D_0).
Eigen::VectorXd local_solve_D(const CondensedCache& cache, int cell,
                              const Eigen::VectorXd& traces, const Eigen::VectorXd& fload);

// Step 2: zeta_{h,T} with b_T(v, zeta) = a_{s,T}(w_h, v) for trace tests v;
// in orthonormal edge bases these are the trace rows of A_T^s w_h.
Eigen::VectorXd local_multiplier_L(const CondensedCache& cache, int cell,
                                   const Eigen::VectorXd& w0, const Eigen::VectorXd& traces);

// Steps 1-3 composed: the similarity of zeta on interior edges, zero on
// boundary edges. Pass floads == nullptr for the f = 0 operator S_0.
TraceField apply_S(const CondensedCache& cache, const TraceField& w,
                   const std::vector<Eigen::VectorXd>* floads, int threads = 1);

// Applies S_0 to each unit vector of the interior-edge dofs (test utility;
// throws above the cap).
Eigen::MatrixXd densify_S0(const CondensedCache& cache, int cap = 2000);

// Recovers the Lagrange multiplier of the hybridized scheme from a solution
// in shared-trace layout: lambda = -zeta seen from the left cell.
Multiplier recover_multiplier(const Discretization& d, const WGField& u_shared);

}  // namespace wg
