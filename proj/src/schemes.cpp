#include "wg/schemes.hpp"

#include <chrono>
#include <stdexcept>

#include "wg/parallel.hpp"

namespace wg {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::wg: return "wg";
    case Scheme::hwg_dense: return "hwg-dense";
    case Scheme::schur: return "schur";
  }
  return "?";
}

namespace {

WGField shared_field(const Discretization& d) {
  WGField u;
  u.layout = TraceLayout::shared;
  u.k = d.k;
  u.mesh = d.mesh;
  u.coeffs = Eigen::VectorXd::Zero(SharedDofMap(d).total);
  return u;
}

}  // namespace

Solution solve_wg(const Discretization& d, const ScalarFunc& f, const BoundaryData& bc,
                  const SolveOptions& opts) {
  WgSystem sys = assemble_wg(d, f, bc);
  Eigen::VectorXd x;
  solvers::SolveReport report;

  if (opts.solver == LinearSolverKind::dense) {
    const auto t0 = std::chrono::steady_clock::now();
    x = solvers::cholesky_solve(Eigen::MatrixXd(sys.sys.A), sys.sys.rhs);
    report.converged = true;
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  } else {
    solvers::CgOptions cg;
    cg.tol_rel = opts.tol;
    cg.max_iter = opts.max_iter;
    Eigen::VectorXd diag;
    if (opts.diag_precond) {
      diag = sys.sys.A.diagonal();
      cg.diag_precond = &diag;
    }
    const Eigen::SparseMatrix<double>& A = sys.sys.A;
    x = solvers::conjugate_gradient(
        [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) { out.noalias() = A * in; },
        sys.sys.rhs, cg, report);
    if (!report.converged)
      throw std::runtime_error("solve_wg: CG did not reach tolerance (rel residual " +
                               std::to_string(report.rel_residual) + ")");
  }

  Solution sol;
  sol.scheme = Scheme::wg;
  sol.report = report;
  sol.u = shared_field(d);
  sol.u.coeffs = sys.sys.lift;  // boundary entries equal the lift exactly
  for (int i = 0; i < static_cast<int>(sys.sys.free_to_global.size()); ++i)
    sol.u.coeffs(sys.sys.free_to_global[i]) = x(i);
  sol.lambda = recover_multiplier(d, sol.u);
  return sol;
}

Solution solve_hwg_dense(const Discretization& d, const ScalarFunc& f, const BoundaryData& bc,
                         const SolveOptions& opts) {
  HwgSystem sys = assemble_hwg(d, f, bc);
  const int nsys = sys.n_u_free + sys.n_lambda;
  if (nsys > opts.dense_cap)
    throw std::runtime_error(
        "solve_hwg_dense: saddle system size " + std::to_string(nsys) + " exceeds dense cap " +
        std::to_string(opts.dense_cap) + "; use the schur scheme instead");

  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::VectorXd x = solvers::dense_solve(Eigen::MatrixXd(sys.sys.A), sys.sys.rhs);

  // raw two-sided solution
  WGField u2;
  u2.layout = TraceLayout::two_sided;
  u2.k = d.k;
  u2.mesh = d.mesh;
  u2.coeffs = sys.sys.lift;
  for (int i = 0; i < sys.n_u_free; ++i) u2.coeffs(sys.sys.free_to_global[i]) = x(i);

  Solution sol;
  sol.scheme = Scheme::hwg_dense;
  sol.report.converged = true;
  sol.report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  sol.lambda = zero_multiplier(d);
  sol.lambda->coeffs = x.segment(sys.n_u_free, sys.n_lambda);

  // post-process to shared traces: take the L copy, record the jump
  const Mesh& mesh = *d.mesh;
  sol.u = shared_field(d);
  SharedDofMap smap(d);
  for (int c = 0; c < mesh.n_cells(); ++c)
    sol.u.coeffs.segment(smap.cell_base(c), d.Nk) = u2.coeffs.segment(sys.map.cell_base(c), d.Nk);
  double max_jump = 0.0;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const Edge& ed = mesh.edges[e];
    const int lL = mesh.local_edge_index(ed.left_cell, e);
    sol.u.coeffs.segment(smap.edge_base(e), 3 * d.m) =
        u2.coeffs.segment(sys.map.side_base(ed.left_cell, lL), 3 * d.m);
    if (!ed.is_boundary)
      max_jump = std::max(max_jump, jump(d, u2, e).cwiseAbs().maxCoeff());
  }
  sol.max_interior_jump = max_jump;
  const double unorm = u2.coeffs.norm();
  sol.rel_interior_jump = unorm > 0.0 ? max_jump / unorm : max_jump;
  return sol;
}

Solution solve_schur(const Discretization& d, const ScalarFunc& f, const BoundaryData& bc,
                     const SolveOptions& opts) {
  const Mesh& mesh = *d.mesh;
  const CondensedCache cache = build_condensed_cache(d, opts.threads);

  std::vector<Eigen::VectorXd> floads(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) floads[c] = cell_load(d, c, f);

  const TraceField G = apply_boundary_conditions(bc, d);

  // Step 1: r = -S_f({0,0}) - S_0({G_b, G_g}) on interior-edge dofs.
  const TraceField zero = zero_trace_field(d);
  const TraceField sf0 = apply_S(cache, zero, &floads, opts.threads);
  const TraceField s0G = apply_S(cache, G, nullptr, opts.threads);

  const int nint = mesh.n_interior_edges();
  const int bs = 3 * d.m;
  Eigen::VectorXd rhs(nint * bs);
  for (int ie = 0; ie < nint; ++ie) {
    const int e = mesh.interior_edges[ie];
    rhs.segment(ie * bs, bs) =
        -sf0.coeffs.segment(sf0.base(e), bs) - s0G.coeffs.segment(s0G.base(e), bs);
  }

  // Step 2: CG on S_0 p = r, matrix-free (coordinates == bilinear form thanks
  // to the orthonormal edge bases).
  auto apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    TraceField w = zero_trace_field(d);
    for (int ie = 0; ie < nint; ++ie)
      w.coeffs.segment(w.base(mesh.interior_edges[ie]), bs) = in.segment(ie * bs, bs);
    const TraceField Sw = apply_S(cache, w, nullptr, opts.threads);
    out.resize(nint * bs);
    for (int ie = 0; ie < nint; ++ie)
      out.segment(ie * bs, bs) = Sw.coeffs.segment(Sw.base(mesh.interior_edges[ie]), bs);
  };

  solvers::CgOptions cg;
  cg.tol_rel = opts.tol;
  cg.max_iter = opts.max_iter;
  Eigen::VectorXd diag;
  if (opts.diag_precond) {
    diag.resize(nint * bs);
    for (int ie = 0; ie < nint; ++ie)
      diag.segment(ie * bs, bs) = cache.s0_diag.segment(mesh.interior_edges[ie] * bs, bs);
    cg.diag_precond = &diag;
  }
  solvers::SolveReport report;
  const Eigen::VectorXd p = solvers::conjugate_gradient(apply, rhs, cg, report);
  if (!report.converged)
    throw std::runtime_error("solve_schur: CG did not reach tolerance (rel residual " +
                             std::to_string(report.rel_residual) + ")");

  // Step 3: traces = p + G, then u_0 = D_f per cell.
  TraceField traces = G;
  for (int ie = 0; ie < nint; ++ie)
    traces.coeffs.segment(traces.base(mesh.interior_edges[ie]), bs) = p.segment(ie * bs, bs);

  Solution sol;
  sol.scheme = Scheme::schur;
  sol.report = report;
  sol.u = shared_field(d);
  SharedDofMap smap(d);
  for (int e = 0; e < mesh.n_edges(); ++e)
    sol.u.coeffs.segment(smap.edge_base(e), bs) = traces.coeffs.segment(traces.base(e), bs);
  std::vector<Eigen::VectorXd> w0(mesh.n_cells());
  parallel_for(mesh.n_cells(), opts.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      Eigen::VectorXd t(static_cast<int>(mesh.cell_edges[c].size()) * bs);
      for (int l = 0; l < static_cast<int>(mesh.cell_edges[c].size()); ++l)
        t.segment(l * bs, bs) =
            traces.coeffs.segment(traces.base(mesh.cell_edges[c][l]), bs);
      w0[c] = local_solve_D(cache, static_cast<int>(c), t, floads[c]);
    }
  });
  for (int c = 0; c < mesh.n_cells(); ++c)
    sol.u.coeffs.segment(smap.cell_base(c), d.Nk) = w0[c];

  sol.lambda = recover_multiplier(d, sol.u);
  return sol;
}

Solution solve(Scheme scheme, const Discretization& d, const ScalarFunc& f,
               const BoundaryData& bc, const SolveOptions& opts) {
  switch (scheme) {
    case Scheme::wg: return solve_wg(d, f, bc, opts);
    case Scheme::hwg_dense: return solve_hwg_dense(d, f, bc, opts);
    case Scheme::schur: return solve_schur(d, f, bc, opts);
  }
  throw std::invalid_argument("solve: unknown scheme");
}

EquivalenceReport check_equivalence(const Discretization& d, const Solution& a,
                                    const Solution& b) {
  if (a.u.coeffs.size() != b.u.coeffs.size() || a.u.k != b.u.k || a.u.mesh != b.u.mesh)
    throw std::invalid_argument("check_equivalence: solutions on different layouts");
  EquivalenceReport rep;
  const Eigen::VectorXd diff = a.u.coeffs - b.u.coeffs;
  rep.max_coeff_diff = diff.cwiseAbs().maxCoeff();
  const double an = a.u.coeffs.norm();
  rep.rel_coeff_diff = an > 0.0 ? diff.norm() / an : diff.norm();
  WGField dfield = a.u;
  dfield.coeffs = diff;
  rep.energy_diff = std::sqrt(std::max(0.0, as_form(d, dfield, dfield)));
  return rep;
}

}  // namespace wg
