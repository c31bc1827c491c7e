#include <cmath>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "test_util.hpp"
#include "wg/schemes.hpp"
#include "wg/schur.hpp"
#include "wg/verify.hpp"

using namespace wg;

namespace {

TraceField random_interior_trace(const Discretization& d, std::uint64_t seed) {
  Rng rng(seed);
  TraceField t = zero_trace_field(d);
  for (int e : d.mesh->interior_edges)
    for (int i = 0; i < 3 * d.m; ++i) t.coeffs(t.base(e) + i) = rng.uniform(-1.0, 1.0);
  return t;
}

Eigen::VectorXd traces_of_cell(const Discretization& d, const TraceField& t, int cell) {
  const auto& edges = d.mesh->cell_edges[cell];
  Eigen::VectorXd out(static_cast<int>(edges.size()) * 3 * d.m);
  for (int l = 0; l < static_cast<int>(edges.size()); ++l)
    out.segment(l * 3 * d.m, 3 * d.m) = t.coeffs.segment(t.base(edges[l]), 3 * d.m);
  return out;
}

// {D_0(w), w} as a shared-trace field for the quadratic-form identity
WGField lifted_field(const Discretization& d, const CondensedCache& cache, const TraceField& t) {
  WGField u;
  u.layout = TraceLayout::shared;
  u.k = d.k;
  u.mesh = d.mesh;
  SharedDofMap map(d);
  u.coeffs = Eigen::VectorXd::Zero(map.total);
  for (int e = 0; e < d.mesh->n_edges(); ++e)
    u.coeffs.segment(map.edge_base(e), 3 * d.m) = t.coeffs.segment(t.base(e), 3 * d.m);
  for (int c = 0; c < d.mesh->n_cells(); ++c)
    u.coeffs.segment(map.cell_base(c), d.Nk) =
        local_solve_D(cache, c, traces_of_cell(d, t, c), Eigen::VectorXd::Zero(d.Nk));
  return u;
}

}  // namespace

TEST_CASE("local solve D: zero data, polynomial exactness, residual") {
  Mesh mesh = perturb_interior(structured_triangle_mesh(2), 0.08, 3);
  const Discretization d = build_discretization(mesh, 2);
  const CondensedCache cache = build_condensed_cache(d);

  SUBCASE("f = 0 and zero traces give w_0 = 0") {
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const int nt = d.ops[c].layout.total - d.Nk;
      const Eigen::VectorXd w0 =
          local_solve_D(cache, c, Eigen::VectorXd::Zero(nt), Eigen::VectorXd::Zero(d.Nk));
      CHECK(w0.norm() == 0.0);
    }
  }

  SUBCASE("traces of Q_h p with f = biharmonic(p) = 0 reproduce Q_0 p") {
    // p = x^2 - y^2
    Poly2 p;
    p.add(2, 0, 1.0);
    p.add(0, 2, -1.0);
    const auto ms = make_poly_solution(p, "saddle-poly");
    const WGField qh = project_Qh(d, ms.u, ms.grad);
    SharedDofMap map(d);
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const Eigen::VectorXd loc = gather_local(d, qh, c);
      const Eigen::VectorXd traces = loc.tail(loc.size() - d.Nk);
      const Eigen::VectorXd w0 = local_solve_D(cache, c, traces, Eigen::VectorXd::Zero(d.Nk));
      CHECK((w0 - loc.head(d.Nk)).norm() < 1e-9 * (1.0 + loc.head(d.Nk).norm()));
    }
  }

  SUBCASE("random traces, f = 0: local equation residual vanishes on v0 tests") {
    Rng rng(5);
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const int nt = d.ops[c].layout.total - d.Nk;
      const Eigen::VectorXd traces = wgtest::random_vector(nt, rng);
      const Eigen::VectorXd w0 = local_solve_D(cache, c, traces, Eigen::VectorXd::Zero(d.Nk));
      Eigen::VectorXd full(d.Nk + nt);
      full << w0, traces;
      const Eigen::VectorXd res = (d.ops[c].As * full).head(d.Nk);
      CHECK(res.cwiseAbs().maxCoeff() <
            1e-11 * (1.0 + d.ops[c].As.cwiseAbs().maxCoeff() * full.norm()));
    }
  }
}

TEST_CASE("local multiplier L: definition checks") {
  Mesh mesh = perturb_interior(structured_quad_mesh(2), 0.05, 7);
  const Discretization d = build_discretization(mesh, 2);
  const CondensedCache cache = build_condensed_cache(d);
  Rng rng(31);

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const LocalDofLayout& lay = d.ops[c].layout;
    const int nt = lay.total - d.Nk;

    // w = 0 -> zeta = 0
    CHECK(local_multiplier_L(cache, c, Eigen::VectorXd::Zero(d.Nk), Eigen::VectorXd::Zero(nt))
              .norm() == 0.0);

    // random w: b_T(v, zeta) == a_{s,T}(w, v) for all trace tests v
    const Eigen::VectorXd w0 = wgtest::random_vector(d.Nk, rng);
    const Eigen::VectorXd wt = wgtest::random_vector(nt, rng);
    const Eigen::VectorXd zeta = local_multiplier_L(cache, c, w0, wt);
    Eigen::VectorXd full(lay.total);
    full << w0, wt;
    const Eigen::VectorXd as_rows = (d.ops[c].As * full).tail(nt);
    CHECK((zeta - as_rows).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + as_rows.cwiseAbs().maxCoeff()));

    // with w0 = D_f(traces): b_T(v, zeta) = a_{s,T}(w_h, v) - (f, v_0)_T for all v
    const Eigen::VectorXd fload = wgtest::random_vector(d.Nk, rng);
    const Eigen::VectorXd w0f = local_solve_D(cache, c, wt, fload);
    const Eigen::VectorXd zf = local_multiplier_L(cache, c, w0f, wt);
    Eigen::VectorXd fullf(lay.total);
    fullf << w0f, wt;
    Eigen::VectorXd rhs_all = d.ops[c].As * fullf;
    rhs_all.head(d.Nk) -= fload;  // subtract (f, v0)
    // trace rows match zeta, v0 rows vanish
    CHECK(rhs_all.head(d.Nk).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + fload.norm()));
    CHECK((rhs_all.tail(nt) - zf).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + zf.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("apply_S: superposition, linearity, kernel on the solution") {
  const Mesh mesh = structured_triangle_mesh(2);
  const Discretization d = build_discretization(mesh, 2);
  const CondensedCache cache = build_condensed_cache(d);
  const auto& ms = manufactured_solution("sinsin");
  const BoundaryData bc = boundary_data_from(ms);

  std::vector<Eigen::VectorXd> floads(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) floads[c] = cell_load(d, c, ms.f);

  SUBCASE("S_f(w) = S_0(w) + S_f(0)") {
    const TraceField w = random_interior_trace(d, 11);
    const TraceField sfw = apply_S(cache, w, &floads);
    const TraceField s0w = apply_S(cache, w, nullptr);
    const TraceField sf0 = apply_S(cache, zero_trace_field(d), &floads);
    const double scale = 1.0 + sfw.coeffs.cwiseAbs().maxCoeff();
    CHECK((sfw.coeffs - s0w.coeffs - sf0.coeffs).cwiseAbs().maxCoeff() < 1e-11 * scale);
  }

  SUBCASE("linearity of S_0") {
    const TraceField w = random_interior_trace(d, 21);
    const TraceField q = random_interior_trace(d, 22);
    TraceField combo = zero_trace_field(d);
    combo.coeffs = 0.7 * w.coeffs - 1.3 * q.coeffs;
    const TraceField s_combo = apply_S(cache, combo, nullptr);
    const Eigen::VectorXd expect =
        0.7 * apply_S(cache, w, nullptr).coeffs - 1.3 * apply_S(cache, q, nullptr).coeffs;
    CHECK((s_combo.coeffs - expect).cwiseAbs().maxCoeff() <
          1e-11 * (1.0 + expect.cwiseAbs().maxCoeff()));
  }

  SUBCASE("the hybridized solution's traces lie in the kernel of S_f") {
    const Solution sol = solve_hwg_dense(d, ms.f, bc);
    TraceField t = zero_trace_field(d);
    SharedDofMap map(d);
    for (int e = 0; e < mesh.n_edges(); ++e)
      t.coeffs.segment(t.base(e), 3 * d.m) = sol.u.coeffs.segment(map.edge_base(e), 3 * d.m);
    const TraceField sf = apply_S(cache, t, &floads);
    const double scale = std::max(1.0, t.coeffs.cwiseAbs().maxCoeff());
    CHECK(sf.coeffs.cwiseAbs().maxCoeff() < 1e-8 * scale);
  }
}

TEST_CASE("S_0 is the interface quadratic form of a_s") {
  Mesh mesh = perturb_interior(structured_triangle_mesh(2), 0.05, 51);
  const Discretization d = build_discretization(mesh, 2);
  const CondensedCache cache = build_condensed_cache(d);

  for (int trial = 0; trial < 20; ++trial) {
    const TraceField w = random_interior_trace(d, 500 + trial);
    const TraceField q = random_interior_trace(d, 600 + trial);
    const TraceField Sw = apply_S(cache, w, nullptr);
    const double lhs = Sw.coeffs.dot(q.coeffs);  // <S_0 w, q> over interior edges
    const WGField wh = lifted_field(d, cache, w);
    const WGField qh = lifted_field(d, cache, q);
    const double rhs = as_form(d, wh, qh);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("densified S_0: symmetric positive definite") {
  const Mesh mesh = structured_triangle_mesh(2);
  const Discretization d = build_discretization(mesh, 2);
  const CondensedCache cache = build_condensed_cache(d);
  const Eigen::MatrixXd S = densify_S0(cache);
  REQUIRE(S.rows() == mesh.n_interior_edges() * 3 * d.m);

  CHECK((S - S.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * S.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()));
  CHECK(es.eigenvalues().minCoeff() > 0.0);

  // diagonal used by the preconditioner matches the densified diagonal
  for (int ie = 0; ie < mesh.n_interior_edges(); ++ie)
    for (int i = 0; i < 3 * d.m; ++i)
      CHECK(S(ie * 3 * d.m + i, ie * 3 * d.m + i) ==
            doctest::Approx(cache.s0_diag(mesh.interior_edges[ie] * 3 * d.m + i))
                .epsilon(1e-10));

  CHECK_THROWS(densify_S0(cache, 3));
}

TEST_CASE("solve_schur: zero data and agreement with solve_wg") {
  const Mesh mesh = structured_triangle_mesh(4);
  const Discretization d = build_discretization(mesh, 2);

  SUBCASE("f = 0, homogeneous bc -> zero solution, zero iterations") {
    BoundaryData zero;
    zero.xi = [](const Point&) { return 0.0; };
    zero.nu = [](const Point&, const Point&) { return 0.0; };
    zero.dxi_dtau = [](const Point&, const Point&) { return 0.0; };
    const Solution sol = solve_schur(d, [](const Point&) { return 0.0; }, zero);
    CHECK(sol.u.coeffs.norm() == 0.0);
    CHECK(sol.report.iterations == 0);
  }

  SUBCASE("matches the conforming solve in the energy norm") {
    const auto& ms = manufactured_solution("sinsin");
    const BoundaryData bc = boundary_data_from(ms);
    SolveOptions dense_opts;
    dense_opts.solver = LinearSolverKind::dense;
    const Solution ref = solve_wg(d, ms.f, bc, dense_opts);
    const Solution schur = solve_schur(d, ms.f, bc);
    const EquivalenceReport rep = check_equivalence(d, ref, schur);
    CHECK(rep.energy_diff < 1e-7);
  }
}
