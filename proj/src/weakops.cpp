#include "wg/weakops.hpp"

#include <stdexcept>

#include "wg/assembly.hpp"
#include "wg/parallel.hpp"

namespace wg {

namespace {

struct CellContext {
  const Mesh* mesh;
  int cell_id;
  int k, Nk, Nk2, m;
  const CellBasis* cb;
  const CellQuad* cq;
  std::vector<const EdgeBasis*> eb;  // per local edge
  std::vector<const EdgeQuad*> eq;
};

// Weighted Gram helper: out = A' diag(w) B.
Eigen::MatrixXd wgram(const Eigen::MatrixXd& A, const std::vector<double>& w,
                      const Eigen::MatrixXd& B) {
  return A.transpose() * (Eigen::Map<const Eigen::VectorXd>(w.data(), w.size()).asDiagonal() * B);
}

std::array<Eigen::MatrixXd, 4> hessian_maps_impl(const CellContext& ctx, bool ibp_form) {
  const Mesh& mesh = *ctx.mesh;
  const int Nk = ctx.Nk, Nk2 = ctx.Nk2, m = ctx.m;
  const auto& edges = mesh.cell_edges[ctx.cell_id];
  const int ne = static_cast<int>(edges.size());

  LocalDofLayout lay{ctx.cell_id, ctx.k, ne, Nk, m, Nk + 3 * m * ne};

  std::array<Eigen::MatrixXd, 4> W;
  for (auto& Wij : W) Wij = Eigen::MatrixXd::Zero(Nk2, lay.total);

  // Cell term. Production form tests v_0 against the Hessian of phi_m; the
  // integrated-by-parts form tests d2 v_0 against phi_m.
  {
    const Eigen::MatrixXd V = ctx.cb->values(ctx.cq->points);
    Eigen::MatrixXd Hxx, Hxy, Hyy;
    ctx.cb->hessians(ctx.cq->points, Hxx, Hxy, Hyy);
    const std::array<const Eigen::MatrixXd*, 4> H = {&Hxx, &Hxy, &Hxy, &Hyy};
    for (int ij = 0; ij < 4; ++ij) {
      if (!ibp_form) {
        // (W_ij)_{m,a} = int_T psi_a d2_ij phi_m
        W[ij].block(0, 0, Nk2, Nk) =
            wgram(*H[ij], ctx.cq->weights, V).topRows(Nk2);
      } else {
        // (W_ij)_{m,a} = int_T phi_m d2_ij psi_a
        W[ij].block(0, 0, Nk2, Nk) = wgram(V, ctx.cq->weights, *H[ij]).topRows(Nk2);
      }
    }
  }

  for (int l = 0; l < ne; ++l) {
    const int e = edges[l];
    const double sign = mesh.normal_sign(ctx.cell_id, e);
    const Point n = sign * mesh.edges[e].normal;
    const EdgeQuad& eq = *ctx.eq[l];

    const Eigen::MatrixXd B = ctx.eb[l]->values(eq.arclen);  // nq x m
    const Eigen::MatrixXd V = ctx.cb->values(eq.points);
    Eigen::MatrixXd Gx, Gy;
    ctx.cb->gradients(eq.points, Gx, Gy);

    // int_e beta_c phi_m and int_e beta_c d_j phi_m (phi = leading Nk2 funcs)
    const Eigen::MatrixXd BV = wgram(B, eq.weights, V.leftCols(Nk2));    // m x Nk2
    const Eigen::MatrixXd BGx = wgram(B, eq.weights, Gx.leftCols(Nk2));  // m x Nk2
    const Eigen::MatrixXd BGy = wgram(B, eq.weights, Gy.leftCols(Nk2));

    const std::array<const Eigen::MatrixXd*, 2> BG = {&BGx, &BGy};
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        Eigen::MatrixXd& Wij = W[2 * i + j];
        // -<v_b n_i, d_j phi>
        Wij.block(0, lay.vb(l), Nk2, m) -= n(i) * BG[j]->transpose();
        // +<v_gi, phi n_j>
        Wij.block(0, lay.vg(l, i), Nk2, m) += n(j) * BV.transpose();
        if (ibp_form) {
          // +<v_0 n_i, d_j phi> - <d_i v_0 n_j, phi>
          const Eigen::MatrixXd VGj = wgram(V, eq.weights, (j == 0 ? Gx : Gy).leftCols(Nk2));
          const Eigen::MatrixXd GiV = wgram(i == 0 ? Gx : Gy, eq.weights, V.leftCols(Nk2));
          Wij.block(0, 0, Nk2, Nk) += n(i) * VGj.transpose();
          Wij.block(0, 0, Nk2, Nk) -= n(j) * GiV.transpose();
        }
      }
    }
  }
  return W;
}

void stabilizer_impl(const CellContext& ctx, LocalElementOperators& out) {
  const Mesh& mesh = *ctx.mesh;
  const int Nk = ctx.Nk, m = ctx.m;
  const auto& edges = mesh.cell_edges[ctx.cell_id];
  const int ne = static_cast<int>(edges.size());
  const LocalDofLayout& lay = out.layout;

  const double hT = mesh.cells[ctx.cell_id].diameter;
  const double w_b = 1.0 / (hT * hT * hT);
  const double w_g = 1.0 / hT;

  out.S = Eigen::MatrixXd::Zero(lay.total, lay.total);
  out.Qb_v0.resize(ne);
  out.Qb_gx.resize(ne);
  out.Qb_gy.resize(ne);

  for (int l = 0; l < ne; ++l) {
    const EdgeQuad& eq = *ctx.eq[l];
    const Eigen::MatrixXd B = ctx.eb[l]->values(eq.arclen);
    const Eigen::MatrixXd V = ctx.cb->values(eq.points);
    Eigen::MatrixXd Gx, Gy;
    ctx.cb->gradients(eq.points, Gx, Gy);

    out.Qb_v0[l] = wgram(B, eq.weights, V);   // m x Nk
    out.Qb_gx[l] = wgram(B, eq.weights, Gx);
    out.Qb_gy[l] = wgram(B, eq.weights, Gy);

    // Difference operators Q_b(v_0) - v_b and Q_b(grad v_0) - v_g in the
    // orthonormal edge basis; the stabilizer is their weighted normal matrix.
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(m, lay.total);
    D.block(0, 0, m, Nk) = out.Qb_v0[l];
    D.block(0, lay.vb(l), m, m) = -Eigen::MatrixXd::Identity(m, m);
    out.S += w_b * D.transpose() * D;

    D.setZero();
    D.block(0, 0, m, Nk) = out.Qb_gx[l];
    D.block(0, lay.vg(l, 0), m, m) = -Eigen::MatrixXd::Identity(m, m);
    out.S += w_g * D.transpose() * D;

    D.setZero();
    D.block(0, 0, m, Nk) = out.Qb_gy[l];
    D.block(0, lay.vg(l, 1), m, m) = -Eigen::MatrixXd::Identity(m, m);
    out.S += w_g * D.transpose() * D;
  }
}

CellContext make_context(const Mesh& mesh, int cell_id, int k, const CellBasis& cb,
                         const CellQuad& cq, const std::vector<const EdgeBasis*>& eb,
                         const std::vector<const EdgeQuad*>& eq) {
  CellContext ctx;
  ctx.mesh = &mesh;
  ctx.cell_id = cell_id;
  ctx.k = k;
  ctx.Nk = poly_space_dim(k);
  ctx.Nk2 = poly_space_dim(k - 2);
  ctx.m = k - 1;
  ctx.cb = &cb;
  ctx.cq = &cq;
  ctx.eb = eb;
  ctx.eq = eq;
  return ctx;
}

LocalElementOperators build_local_ops(const CellContext& ctx) {
  LocalElementOperators out;
  const auto& edges = ctx.mesh->cell_edges[ctx.cell_id];
  out.layout = LocalDofLayout{ctx.cell_id, ctx.k, static_cast<int>(edges.size()), ctx.Nk, ctx.m,
                              ctx.Nk + 3 * ctx.m * static_cast<int>(edges.size())};
  out.W = hessian_maps_impl(ctx, /*ibp_form=*/false);
  stabilizer_impl(ctx, out);
  out.A = Eigen::MatrixXd::Zero(out.layout.total, out.layout.total);
  for (const auto& Wij : out.W) out.A += Wij.transpose() * Wij;
  out.As = out.A + out.S;
  return out;
}

// Owning context for the standalone entry points.
struct OwnedContext {
  CellBasis cb;
  CellQuad cq;
  std::vector<EdgeBasis> eb;
  std::vector<EdgeQuad> eq;
  std::vector<const EdgeBasis*> ebp;
  std::vector<const EdgeQuad*> eqp;
};

OwnedContext own_context(const Mesh& mesh, int cell_id, int k) {
  if (k < 2) throw std::invalid_argument("weakops: k must be >= 2");
  OwnedContext o;
  o.cq = cell_quadrature(mesh, cell_id, 2 * k + 2);
  o.cb = CellBasis(mesh, cell_id, k, o.cq);
  for (int e : mesh.cell_edges[cell_id]) {
    o.eb.push_back(edge_basis(mesh, e, k - 2));
    o.eq.push_back(edge_quadrature(mesh, e, 2 * k));
  }
  for (std::size_t i = 0; i < o.eb.size(); ++i) {
    o.ebp.push_back(&o.eb[i]);
    o.eqp.push_back(&o.eq[i]);
  }
  return o;
}

}  // namespace

LocalElementOperators local_operators(const Mesh& mesh, int cell_id, int k) {
  OwnedContext o = own_context(mesh, cell_id, k);
  return build_local_ops(make_context(mesh, cell_id, k, o.cb, o.cq, o.ebp, o.eqp));
}

std::array<Eigen::MatrixXd, 4> weak_hessian_maps(const Mesh& mesh, int cell_id, int k) {
  OwnedContext o = own_context(mesh, cell_id, k);
  return hessian_maps_impl(make_context(mesh, cell_id, k, o.cb, o.cq, o.ebp, o.eqp), false);
}

std::array<Eigen::MatrixXd, 4> weak_hessian_maps_ibp(const Mesh& mesh, int cell_id, int k) {
  OwnedContext o = own_context(mesh, cell_id, k);
  return hessian_maps_impl(make_context(mesh, cell_id, k, o.cb, o.cq, o.ebp, o.eqp), true);
}

Eigen::MatrixXd local_stabilizer(const Mesh& mesh, int cell_id, int k) {
  OwnedContext o = own_context(mesh, cell_id, k);
  CellContext ctx = make_context(mesh, cell_id, k, o.cb, o.cq, o.ebp, o.eqp);
  LocalElementOperators out;
  const auto& edges = mesh.cell_edges[cell_id];
  out.layout = LocalDofLayout{cell_id, k, static_cast<int>(edges.size()), ctx.Nk, ctx.m,
                              ctx.Nk + 3 * ctx.m * static_cast<int>(edges.size())};
  stabilizer_impl(ctx, out);
  return out.S;
}

Discretization build_discretization(const Mesh& mesh, int k, int threads) {
  if (k < 2) throw std::invalid_argument("build_discretization: k must be >= 2");
  Discretization d;
  d.mesh = &mesh;
  d.k = k;
  d.Nk = poly_space_dim(k);
  d.Nk2 = poly_space_dim(k - 2);
  d.m = k - 1;

  d.ebasis.resize(mesh.n_edges());
  d.equad.resize(mesh.n_edges());
  d.equad_data.resize(mesh.n_edges());
  parallel_for(mesh.n_edges(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t eid = b; eid < e; ++eid) {
      d.ebasis[eid] = edge_basis(mesh, static_cast<int>(eid), k - 2);
      d.equad[eid] = edge_quadrature(mesh, static_cast<int>(eid), 2 * k);
      d.equad_data[eid] = edge_quadrature(mesh, static_cast<int>(eid), 2 * k + 4);
    }
  });

  d.cbasis.resize(mesh.n_cells());
  d.cquad.resize(mesh.n_cells());
  d.ops.resize(mesh.n_cells());
  parallel_for(mesh.n_cells(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      const int ci = static_cast<int>(c);
      d.cquad[c] = cell_quadrature(mesh, ci, 2 * k + 2);
      d.cbasis[c] = CellBasis(mesh, ci, k, d.cquad[c]);
      std::vector<const EdgeBasis*> eb;
      std::vector<const EdgeQuad*> eq;
      for (int eid : mesh.cell_edges[c]) {
        eb.push_back(&d.ebasis[eid]);
        eq.push_back(&d.equad[eid]);
      }
      d.ops[c] = build_local_ops(make_context(mesh, ci, k, d.cbasis[c], d.cquad[c], eb, eq));
    }
  });
  return d;
}

Eigen::VectorXd project_cell(const CellBasis& basis, const CellQuad& quad, int r,
                             const ScalarFunc& f) {
  if (r > basis.degree()) throw std::invalid_argument("project_cell: r exceeds basis degree");
  const int nr = poly_space_dim(r);
  const Eigen::MatrixXd V = basis.values(quad.points);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(nr);
  for (int q = 0; q < static_cast<int>(quad.points.size()); ++q)
    out += quad.weights[q] * f(quad.points[q]) * V.row(q).head(nr).transpose();
  return out;
}

Eigen::VectorXd project_edge(const EdgeBasis& basis, const EdgeQuad& quad, const ScalarFunc& f) {
  const Eigen::MatrixXd B = basis.values(quad.arclen);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(basis.dim());
  for (int q = 0; q < static_cast<int>(quad.points.size()); ++q)
    out += quad.weights[q] * f(quad.points[q]) * B.row(q).transpose();
  return out;
}

WGField project_Qh(const Discretization& disc, const ScalarFunc& u, const VectorFunc& grad_u) {
  const Mesh& mesh = *disc.mesh;
  SharedDofMap map(disc);
  WGField v;
  v.layout = TraceLayout::shared;
  v.k = disc.k;
  v.mesh = &mesh;
  v.coeffs = Eigen::VectorXd::Zero(map.total);

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Eigen::VectorXd q0 = project_cell(disc.cbasis[c], disc.cquad[c], disc.k, u);
    v.coeffs.segment(map.cell_base(c), disc.Nk) = q0;
  }
  for (int e = 0; e < mesh.n_edges(); ++e) {
    v.coeffs.segment(map.vb(e), disc.m) =
        project_edge(disc.ebasis[e], disc.equad_data[e], u);
    v.coeffs.segment(map.vg(e, 0), disc.m) = project_edge(
        disc.ebasis[e], disc.equad_data[e], [&](const Point& p) { return grad_u(p).x(); });
    v.coeffs.segment(map.vg(e, 1), disc.m) = project_edge(
        disc.ebasis[e], disc.equad_data[e], [&](const Point& p) { return grad_u(p).y(); });
  }
  return v;
}

}  // namespace wg
