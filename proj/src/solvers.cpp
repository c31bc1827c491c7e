#include "wg/solvers.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "wg/kernels.hpp"

namespace wg::solvers {

Eigen::VectorXd dense_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw std::invalid_argument("dense_solve: dimension mismatch");
  const double scale = A.cwiseAbs().maxCoeff();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (min_pivot <= 1e-13 * scale)
    throw std::runtime_error("dense_solve: matrix singular to working precision");
  Eigen::VectorXd x = lu.solve(b);
  const double res = (A * x - b).norm();
  const double gate = 1e-10 * (scale * x.norm() + b.norm());
  if (res > gate && gate > 0.0)
    throw std::runtime_error("dense_solve: residual check failed (ill-conditioned system)");
  return x;
}

Eigen::VectorXd cholesky_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw std::invalid_argument("cholesky_solve: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("cholesky_solve: non-positive pivot (matrix not SPD)");
  return llt.solve(b);
}

Eigen::VectorXd conjugate_gradient(const ApplyFn& apply, const Eigen::VectorXd& b,
                                   const CgOptions& opts, SolveReport& report) {
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::Index n = b.size();
  report = SolveReport{};

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  const double bnorm = std::sqrt(kernels::nrm2_sq(b.data(), n));
  if (bnorm == 0.0) {
    report.converged = true;
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return x;
  }

  Eigen::VectorXd inv_diag;
  if (opts.diag_precond) {
    inv_diag = opts.diag_precond->cwiseInverse();
    if (!inv_diag.allFinite() || opts.diag_precond->minCoeff() <= 0.0)
      throw std::runtime_error("conjugate_gradient: preconditioner diagonal not positive");
  }

  const int max_iter =
      opts.max_iter > 0 ? opts.max_iter : static_cast<int>(50.0 * std::sqrt(double(n))) + 10;

  Eigen::VectorXd r = b;  // x0 = 0
  Eigen::VectorXd z(n), p(n), Ap(n);
  auto precond = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    if (opts.diag_precond)
      kernels::hadamard(inv_diag.data(), in.data(), out.data(), n);
    else
      out = in;
  };

  precond(r, z);
  p = z;
  double rz = kernels::dot(r.data(), z.data(), n);
  int it = 0;
  while (it < max_iter) {
    const double rnorm = std::sqrt(kernels::nrm2_sq(r.data(), n));
    if (rnorm <= opts.tol_rel * bnorm) {
      // recurrence says converged; confirm with the true residual
      apply(x, Ap);
      r = b - Ap;
      const double true_rnorm = std::sqrt(kernels::nrm2_sq(r.data(), n));
      if (true_rnorm <= opts.tol_rel * bnorm) {
        report.converged = true;
        report.rel_residual = true_rnorm / bnorm;
        break;
      }
      precond(r, z);
      p = z;
      rz = kernels::dot(r.data(), z.data(), n);
    }
    apply(p, Ap);
    const double pAp = kernels::dot(p.data(), Ap.data(), n);
    if (pAp <= 0.0)
      throw std::runtime_error("conjugate_gradient: breakdown, operator not positive definite");
    const double alpha = rz / pAp;
    kernels::axpy(alpha, p.data(), x.data(), n);
    kernels::axpy(-alpha, Ap.data(), r.data(), n);
    precond(r, z);
    const double rz_next = kernels::dot(r.data(), z.data(), n);
    kernels::xpby(z.data(), rz_next / rz, p.data(), n);
    rz = rz_next;
    ++it;
  }

  report.iterations = it;
  if (it >= max_iter) {
    apply(x, Ap);
    const double true_rnorm = std::sqrt((b - Ap).squaredNorm());
    report.rel_residual = true_rnorm / bnorm;
    report.converged = report.rel_residual <= opts.tol_rel;
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return x;
}

}  // namespace wg::solvers
