#pragma once

#include <optional>
#include <string>

#include "wg/assembly.hpp"
#include "wg/schur.hpp"
#include "wg/solvers.hpp"
#include "wg/weakops.hpp"

namespace wg {

enum class Scheme { wg, hwg_dense, schur };
enum class LinearSolverKind { cg, dense };

std::string to_string(Scheme s);

struct Solution {
  WGField u;  // shared-trace layout, boundary entries equal the lift exactly
  std::optional<Multiplier> lambda;
  solvers::SolveReport report;
  Scheme scheme = Scheme::wg;
  // hybridized path only: largest interior-edge jump coefficient of the raw
  // two-sided solution, absolute and relative to ||u||.
  double max_interior_jump = 0.0;
  double rel_interior_jump = 0.0;
};

struct SolveOptions {
  LinearSolverKind solver = LinearSolverKind::cg;
  double tol = 1e-10;
  int max_iter = 0;          // 0 -> CG default
  bool diag_precond = true;
  int threads = 1;
  int dense_cap = 6000;      // hwg_dense refuses larger systems
};

// Conforming scheme: a_s(u_h, v) = (f, v_0) on V_h^0 plus the boundary lift.
Solution solve_wg(const Discretization& d, const ScalarFunc& f, const BoundaryData& bc,
                  const SolveOptions& opts = {});

// Full saddle system (u_h; lambda_h) by dense LU; cross-validation path.
Solution solve_hwg_dense(const Discretization& d, const ScalarFunc& f, const BoundaryData& bc,
                         const SolveOptions& opts = {});

// Variable reduction: matrix-free CG on the interface operator, then local
// reconstruction (the production path).
Solution solve_schur(const Discretization& d, const ScalarFunc& f, const BoundaryData& bc,
                     const SolveOptions& opts = {});

Solution solve(Scheme scheme, const Discretization& d, const ScalarFunc& f,
               const BoundaryData& bc, const SolveOptions& opts = {});

struct EquivalenceReport {
  double max_coeff_diff = 0.0;  // max |a - b| over coefficients
  double rel_coeff_diff = 0.0;  // ||a - b|| / ||a||
  double energy_diff = 0.0;     // |||a - b|||
};

// Both solutions must live on the same discretization.
EquivalenceReport check_equivalence(const Discretization& d, const Solution& a,
                                    const Solution& b);

}  // namespace wg
