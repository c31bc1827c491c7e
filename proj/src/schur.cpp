#include "wg/schur.hpp"

#include <stdexcept>

#include "wg/parallel.hpp"

namespace wg {

CondensedCache build_condensed_cache(const Discretization& d, int threads) {
  const Mesh& mesh = *d.mesh;
  CondensedCache cache;
  cache.disc = &d;
  cache.cells.resize(mesh.n_cells());
  cache.s0_diag = Eigen::VectorXd::Zero(mesh.n_edges() * 3 * d.m);

  // Local Schur diagonals are accumulated per (cell, edge) slot first so the
  // parallel loop writes disjoint memory; the per-edge sum follows serially.
  std::vector<Eigen::VectorXd> slot_diag(mesh.n_cells());

  parallel_for(mesh.n_cells(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      const LocalDofLayout& lay = d.ops[c].layout;
      const int nt = lay.total - d.Nk;
      auto& cd = cache.cells[c];
      cd.llt00.compute(d.ops[c].As.topLeftCorner(d.Nk, d.Nk));
      if (cd.llt00.info() != Eigen::Success)
        throw std::runtime_error("condensed cache: v0 block of A_T^s not SPD");
      cd.A0t = d.ops[c].As.topRightCorner(d.Nk, nt);
      cd.Att = d.ops[c].As.bottomRightCorner(nt, nt);

      // diag of Att - At0 A00^{-1} A0t
      const Eigen::MatrixXd X = cd.llt00.solve(cd.A0t);
      slot_diag[c] = (cd.Att - cd.A0t.transpose() * X).diagonal();
    }
  });

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& edges = mesh.cell_edges[c];
    for (int l = 0; l < static_cast<int>(edges.size()); ++l)
      cache.s0_diag.segment(edges[l] * 3 * d.m, 3 * d.m) +=
          slot_diag[c].segment(l * 3 * d.m, 3 * d.m);
  }
  return cache;
}

Eigen::VectorXd local_solve_D(const CondensedCache& cache, int cell,
                              const Eigen::VectorXd& traces, const Eigen::VectorXd& fload) {
  const auto& cd = cache.cells[cell];
  return cd.llt00.solve(fload - cd.A0t * traces);
}

Eigen::VectorXd local_multiplier_L(const CondensedCache& cache, int cell,
                                   const Eigen::VectorXd& w0, const Eigen::VectorXd& traces) {
  const auto& cd = cache.cells[cell];
  return cd.A0t.transpose() * w0 + cd.Att * traces;
}

namespace {

Eigen::VectorXd gather_traces(const Discretization& d, const TraceField& w, int cell) {
  const auto& edges = d.mesh->cell_edges[cell];
  Eigen::VectorXd t(static_cast<int>(edges.size()) * 3 * d.m);
  for (int l = 0; l < static_cast<int>(edges.size()); ++l)
    t.segment(l * 3 * d.m, 3 * d.m) = w.coeffs.segment(w.base(edges[l]), 3 * d.m);
  return t;
}

}  // namespace

TraceField apply_S(const CondensedCache& cache, const TraceField& w,
                   const std::vector<Eigen::VectorXd>* floads, int threads) {
  const Discretization& d = *cache.disc;
  const Mesh& mesh = *d.mesh;

  std::vector<Eigen::VectorXd> zeta(mesh.n_cells());
  parallel_for(mesh.n_cells(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      const Eigen::VectorXd traces = gather_traces(d, w, static_cast<int>(c));
      const Eigen::VectorXd fload =
          floads ? (*floads)[c] : Eigen::VectorXd::Zero(d.Nk);
      const Eigen::VectorXd w0 = local_solve_D(cache, static_cast<int>(c), traces, fload);
      zeta[c] = local_multiplier_L(cache, static_cast<int>(c), w0, traces);
    }
  });

  // similarity: zeta_L + zeta_R on interior edges, zero on the boundary
  TraceField out = zero_trace_field(d);
  for (int ie = 0; ie < mesh.n_interior_edges(); ++ie) {
    const int e = mesh.interior_edges[ie];
    const Edge& ed = mesh.edges[e];
    const int lL = mesh.local_edge_index(ed.left_cell, e);
    const int lR = mesh.local_edge_index(ed.right_cell, e);
    out.coeffs.segment(out.base(e), 3 * d.m) =
        zeta[ed.left_cell].segment(lL * 3 * d.m, 3 * d.m) +
        zeta[ed.right_cell].segment(lR * 3 * d.m, 3 * d.m);
  }
  return out;
}

Eigen::MatrixXd densify_S0(const CondensedCache& cache, int cap) {
  const Discretization& d = *cache.disc;
  const Mesh& mesh = *d.mesh;
  const int n = mesh.n_interior_edges() * 3 * d.m;
  if (n > cap) throw std::runtime_error("densify_S0: interface dof count exceeds cap");

  Eigen::MatrixXd S(n, n);
  for (int j = 0; j < n; ++j) {
    TraceField w = zero_trace_field(d);
    const int ie = j / (3 * d.m);
    const int off = j % (3 * d.m);
    w.coeffs(w.base(mesh.interior_edges[ie]) + off) = 1.0;
    const TraceField Sw = apply_S(cache, w, nullptr, 1);
    for (int i = 0; i < n; ++i) {
      const int ie_i = i / (3 * d.m);
      const int off_i = i % (3 * d.m);
      S(i, j) = Sw.coeffs(Sw.base(mesh.interior_edges[ie_i]) + off_i);
    }
  }
  return S;
}

Multiplier recover_multiplier(const Discretization& d, const WGField& u_shared) {
  if (u_shared.layout != TraceLayout::shared)
    throw std::invalid_argument("recover_multiplier: expected shared-trace layout");
  const Mesh& mesh = *d.mesh;
  Multiplier lam = zero_multiplier(d);
  for (int ie = 0; ie < mesh.n_interior_edges(); ++ie) {
    const int e = mesh.interior_edges[ie];
    const int c = mesh.edges[e].left_cell;
    const int l = mesh.local_edge_index(c, e);
    const LocalDofLayout& lay = d.ops[c].layout;
    const Eigen::VectorXd zeta = d.ops[c].As * gather_local(d, u_shared, c);
    lam.coeffs.segment(lam.base(ie), 3 * d.m) = -zeta.segment(lay.edge_block(l), 3 * d.m);
  }
  return lam;
}

}  // namespace wg
