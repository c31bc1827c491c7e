#pragma once

#include <functional>

#include <Eigen/Dense>

namespace wg::solvers {

struct SolveReport {
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = true;
  double seconds = 0.0;
};

// LU with partial pivoting. Throws std::runtime_error when a pivot falls
// below 1e-13 * ||A||_max or the residual check ||Ax-b|| <= 1e-10 (||A|| ||x|| + ||b||)
// fails.
Eigen::VectorXd dense_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

// Cholesky; a non-positive pivot throws (non-SPD input).
Eigen::VectorXd cholesky_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

// y = A x for the matrix-free operators fed to CG.
using ApplyFn = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y)>;

struct CgOptions {
  double tol_rel = 1e-10;   // on ||b - A x|| / ||b||
  int max_iter = 0;         // 0 -> 50 * sqrt(N)
  const Eigen::VectorXd* diag_precond = nullptr;  // entries of diag(A), optional
};

// Preconditioned conjugate gradients. Convergence is verified against the
// recomputed true residual; if the recurrence residual passed but the true one
// has drifted, iteration continues from the current iterate. Breakdown
// (p'Ap <= 0) throws: the operator is not positive definite.
Eigen::VectorXd conjugate_gradient(const ApplyFn& apply, const Eigen::VectorXd& b,
                                   const CgOptions& opts, SolveReport& report);

}  // namespace wg::solvers
