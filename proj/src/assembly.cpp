#include "wg/assembly.hpp"

#include <stdexcept>

#include "wg/parallel.hpp"

namespace wg {

TwoSidedDofMap::TwoSidedDofMap(const Discretization& d) {
  Nk = d.Nk;
  m = d.m;
  ncells = d.mesh->n_cells();
  incidence_prefix.resize(ncells + 1, 0);
  for (int c = 0; c < ncells; ++c)
    incidence_prefix[c + 1] =
        incidence_prefix[c] + static_cast<int>(d.mesh->cell_edges[c].size());
  total = ncells * Nk + incidence_prefix[ncells] * 3 * m;
}

TraceField zero_trace_field(const Discretization& d) {
  TraceField t;
  t.mesh = d.mesh;
  t.m = d.m;
  t.coeffs = Eigen::VectorXd::Zero(d.mesh->n_edges() * 3 * d.m);
  return t;
}

Multiplier zero_multiplier(const Discretization& d) {
  Multiplier mu;
  mu.mesh = d.mesh;
  mu.m = d.m;
  mu.coeffs = Eigen::VectorXd::Zero(d.mesh->n_interior_edges() * 3 * d.m);
  return mu;
}

TraceField apply_boundary_conditions(const BoundaryData& bc, const Discretization& d) {
  const Mesh& mesh = *d.mesh;
  TraceField g = zero_trace_field(d);
  for (int eid : mesh.boundary_edge_ids) {
    const Edge& e = mesh.edges[eid];
    const Eigen::VectorXd gb = project_edge(d.ebasis[eid], d.equad_data[eid], bc.xi);
    const Eigen::VectorXd gn = project_edge(
        d.ebasis[eid], d.equad_data[eid], [&](const Point& p) { return bc.nu(p, e.normal); });
    const Eigen::VectorXd gt = project_edge(
        d.ebasis[eid], d.equad_data[eid],
        [&](const Point& p) { return bc.dxi_dtau(p, e.tangent); });
    // recombine normal/tangential data into Cartesian components
    g.coeffs.segment(g.base(eid), d.m) = gb;
    g.coeffs.segment(g.base(eid) + d.m, d.m) = e.normal.x() * gn + e.tangent.x() * gt;
    g.coeffs.segment(g.base(eid) + 2 * d.m, d.m) = e.normal.y() * gn + e.tangent.y() * gt;
  }
  return g;
}

Eigen::VectorXd gather_local(const Discretization& d, const WGField& v, int cell) {
  const Mesh& mesh = *d.mesh;
  const LocalDofLayout& lay = d.ops[cell].layout;
  Eigen::VectorXd loc(lay.total);
  if (v.layout == TraceLayout::shared) {
    SharedDofMap map(d);
    loc.head(d.Nk) = v.coeffs.segment(map.cell_base(cell), d.Nk);
    for (int l = 0; l < lay.n_edges; ++l) {
      const int e = mesh.cell_edges[cell][l];
      loc.segment(lay.edge_block(l), 3 * d.m) = v.coeffs.segment(map.edge_base(e), 3 * d.m);
    }
  } else {
    TwoSidedDofMap map(d);
    loc.head(d.Nk) = v.coeffs.segment(map.cell_base(cell), d.Nk);
    for (int l = 0; l < lay.n_edges; ++l)
      loc.segment(lay.edge_block(l), 3 * d.m) = v.coeffs.segment(map.side_base(cell, l), 3 * d.m);
  }
  return loc;
}

Eigen::VectorXd jump(const Discretization& d, const WGField& v, int edge) {
  if (v.layout != TraceLayout::two_sided)
    throw std::invalid_argument("jump: field must be in two-sided layout");
  const Mesh& mesh = *d.mesh;
  const Edge& e = mesh.edges[edge];
  TwoSidedDofMap map(d);
  const int lL = mesh.local_edge_index(e.left_cell, edge);
  Eigen::VectorXd out = v.coeffs.segment(map.side_base(e.left_cell, lL), 3 * d.m);
  if (!e.is_boundary) {
    const int lR = mesh.local_edge_index(e.right_cell, edge);
    out -= v.coeffs.segment(map.side_base(e.right_cell, lR), 3 * d.m);
  }
  return out;
}

Eigen::VectorXd similarity(const Eigen::VectorXd& left, const Eigen::VectorXd& right,
                           bool boundary) {
  if (boundary) return left;
  return left + right;
}

WGField embed_two_sided(const Discretization& d, const WGField& shared) {
  if (shared.layout != TraceLayout::shared)
    throw std::invalid_argument("embed_two_sided: input must be shared-trace");
  const Mesh& mesh = *d.mesh;
  SharedDofMap smap(d);
  TwoSidedDofMap tmap(d);
  WGField out;
  out.layout = TraceLayout::two_sided;
  out.k = d.k;
  out.mesh = &mesh;
  out.coeffs = Eigen::VectorXd::Zero(tmap.total);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    out.coeffs.segment(tmap.cell_base(c), d.Nk) = shared.coeffs.segment(smap.cell_base(c), d.Nk);
    for (int l = 0; l < static_cast<int>(mesh.cell_edges[c].size()); ++l) {
      const int e = mesh.cell_edges[c][l];
      out.coeffs.segment(tmap.side_base(c, l), 3 * d.m) =
          shared.coeffs.segment(smap.edge_base(e), 3 * d.m);
    }
  }
  return out;
}

double as_form(const Discretization& d, const WGField& u, const WGField& v) {
  double s = 0.0;
  for (int c = 0; c < d.mesh->n_cells(); ++c) {
    const Eigen::VectorXd lu = gather_local(d, u, c);
    const Eigen::VectorXd lv = gather_local(d, v, c);
    s += lu.dot(d.ops[c].As * lv);
  }
  return s;
}

double b_form(const Discretization& d, const WGField& v, const Multiplier& lambda) {
  if (v.layout != TraceLayout::two_sided)
    throw std::invalid_argument("b_form: field must be in two-sided layout");
  const Mesh& mesh = *d.mesh;
  double s = 0.0;
  for (int ie = 0; ie < mesh.n_interior_edges(); ++ie) {
    const int e = mesh.interior_edges[ie];
    s += jump(d, v, e).dot(lambda.coeffs.segment(lambda.base(ie), 3 * d.m));
  }
  return s;
}

double b_form_per_element(const Discretization& d, const WGField& v, const Multiplier& lambda) {
  const Mesh& mesh = *d.mesh;
  TwoSidedDofMap map(d);
  double s = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    for (int l = 0; l < static_cast<int>(mesh.cell_edges[c].size()); ++l) {
      const int e = mesh.cell_edges[c][l];
      const int ie = mesh.interior_index_of_edge[e];
      if (ie < 0) continue;  // multipliers vanish on the boundary
      const double side = (mesh.edges[e].left_cell == c) ? 1.0 : -1.0;
      s += side * v.coeffs.segment(map.side_base(c, l), 3 * d.m)
                      .dot(lambda.coeffs.segment(lambda.base(ie), 3 * d.m));
    }
  }
  return s;
}

Eigen::VectorXd cell_load(const Discretization& d, int cell, const ScalarFunc& f) {
  return project_cell(d.cbasis[cell], d.cquad[cell], d.k, f);
}

namespace {

// Shared scatter loop for both systems: local As blocks into free/free
// triplets, free/constrained products into the rhs correction.
struct Scatter {
  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd rhs;
  const std::vector<int>& gtof;
  const Eigen::VectorXd& lift;

  Scatter(int nfree, const std::vector<int>& global_to_free, const Eigen::VectorXd& lift_full)
      : rhs(Eigen::VectorXd::Zero(nfree)), gtof(global_to_free), lift(lift_full) {}

  void add(const Eigen::MatrixXd& loc, const std::vector<int>& gids) {
    const int n = static_cast<int>(gids.size());
    for (int a = 0; a < n; ++a) {
      const int fa = gtof[gids[a]];
      if (fa < 0) continue;
      for (int b = 0; b < n; ++b) {
        const int fb = gtof[gids[b]];
        if (fb >= 0)
          trips.emplace_back(fa, fb, loc(a, b));
        else
          rhs(fa) -= loc(a, b) * lift(gids[b]);
      }
    }
  }
};

}  // namespace

WgSystem assemble_wg(const Discretization& d, const ScalarFunc& f, const BoundaryData& bc) {
  if (d.k < 2) throw std::invalid_argument("assemble_wg: k must be >= 2");
  const Mesh& mesh = *d.mesh;
  WgSystem out;
  out.map = SharedDofMap(d);
  const int total = out.map.total;

  // boundary trace dofs are eliminated by the lift
  const TraceField g = apply_boundary_conditions(bc, d);
  Eigen::VectorXd lift = Eigen::VectorXd::Zero(total);
  std::vector<int> gtof(total, 0);
  for (int eid : mesh.boundary_edge_ids) {
    for (int i = 0; i < 3 * d.m; ++i) {
      gtof[out.map.edge_base(eid) + i] = -1;
      lift(out.map.edge_base(eid) + i) = g.coeffs(g.base(eid) + i);
    }
  }
  std::vector<int> ftog;
  for (int i = 0; i < total; ++i) {
    if (gtof[i] == 0) {
      gtof[i] = static_cast<int>(ftog.size());
      ftog.push_back(i);
    }
  }
  const int nfree = static_cast<int>(ftog.size());

  Scatter sc(nfree, gtof, lift);
  std::vector<int> gids;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const LocalDofLayout& lay = d.ops[c].layout;
    gids.clear();
    for (int a = 0; a < d.Nk; ++a) gids.push_back(out.map.cell_base(c) + a);
    for (int l = 0; l < lay.n_edges; ++l) {
      const int e = mesh.cell_edges[c][l];
      for (int i = 0; i < 3 * d.m; ++i) gids.push_back(out.map.edge_base(e) + i);
    }
    sc.add(d.ops[c].As, gids);

    const Eigen::VectorXd load = cell_load(d, c, f);
    for (int a = 0; a < d.Nk; ++a) sc.rhs(gtof[out.map.cell_base(c) + a]) += load(a);
  }

  out.sys.A.resize(nfree, nfree);
  out.sys.A.setFromTriplets(sc.trips.begin(), sc.trips.end());
  out.sys.rhs = std::move(sc.rhs);
  out.sys.free_to_global = std::move(ftog);
  out.sys.global_to_free = std::move(gtof);
  out.sys.lift = std::move(lift);
  return out;
}

HwgSystem assemble_hwg(const Discretization& d, const ScalarFunc& f, const BoundaryData& bc) {
  if (d.k < 2) throw std::invalid_argument("assemble_hwg: k must be >= 2");
  const Mesh& mesh = *d.mesh;
  HwgSystem out;
  out.map = TwoSidedDofMap(d);
  const int total = out.map.total;

  const TraceField g = apply_boundary_conditions(bc, d);
  Eigen::VectorXd lift = Eigen::VectorXd::Zero(total);
  std::vector<int> gtof(total, 0);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    for (int l = 0; l < static_cast<int>(mesh.cell_edges[c].size()); ++l) {
      const int e = mesh.cell_edges[c][l];
      if (!mesh.edges[e].is_boundary) continue;
      for (int i = 0; i < 3 * d.m; ++i) {
        gtof[out.map.side_base(c, l) + i] = -1;
        lift(out.map.side_base(c, l) + i) = g.coeffs(g.base(e) + i);
      }
    }
  }
  std::vector<int> ftog;
  for (int i = 0; i < total; ++i) {
    if (gtof[i] == 0) {
      gtof[i] = static_cast<int>(ftog.size());
      ftog.push_back(i);
    }
  }
  out.n_u_free = static_cast<int>(ftog.size());
  out.n_lambda = mesh.n_interior_edges() * 3 * d.m;
  const int nsys = out.n_u_free + out.n_lambda;

  Scatter sc(nsys, gtof, lift);
  std::vector<int> gids;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const LocalDofLayout& lay = d.ops[c].layout;
    gids.clear();
    for (int a = 0; a < d.Nk; ++a) gids.push_back(out.map.cell_base(c) + a);
    for (int l = 0; l < lay.n_edges; ++l)
      for (int i = 0; i < 3 * d.m; ++i) gids.push_back(out.map.side_base(c, l) + i);
    sc.add(d.ops[c].As, gids);

    const Eigen::VectorXd load = cell_load(d, c, f);
    for (int a = 0; a < d.Nk; ++a) sc.rhs(gtof[out.map.cell_base(c) + a]) += load(a);
  }

  // Constraint coupling: in orthonormal edge bases b(v, lambda) is a signed
  // identity scatter, +1 on L copies and -1 on R copies. Coupled with +b so
  // the multiplier approximates {dn(laplace u), -H(u) n}.
  for (int ie = 0; ie < mesh.n_interior_edges(); ++ie) {
    const int e = mesh.interior_edges[ie];
    const Edge& ed = mesh.edges[e];
    const int lL = mesh.local_edge_index(ed.left_cell, e);
    const int lR = mesh.local_edge_index(ed.right_cell, e);
    for (int i = 0; i < 3 * d.m; ++i) {
      const int lam = out.n_u_free + ie * 3 * d.m + i;
      const int uL = gtof[out.map.side_base(ed.left_cell, lL) + i];
      const int uR = gtof[out.map.side_base(ed.right_cell, lR) + i];
      // interior-edge slots are never eliminated
      sc.trips.emplace_back(uL, lam, 1.0);
      sc.trips.emplace_back(lam, uL, 1.0);
      sc.trips.emplace_back(uR, lam, -1.0);
      sc.trips.emplace_back(lam, uR, -1.0);
    }
  }

  out.sys.A.resize(nsys, nsys);
  out.sys.A.setFromTriplets(sc.trips.begin(), sc.trips.end());
  out.sys.rhs = std::move(sc.rhs);
  out.sys.free_to_global = std::move(ftog);
  out.sys.global_to_free = std::move(gtof);
  out.sys.lift = std::move(lift);
  return out;
}

}  // namespace wg
