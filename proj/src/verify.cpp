#include "wg/verify.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "wg/kernels.hpp"
#include "wg/rng.hpp"

namespace wg {

// ---------------------------------------------------------------------------
// Poly2
// ---------------------------------------------------------------------------

void Poly2::add(int i, int j, double c) {
  if (i < 0 || j < 0) throw std::invalid_argument("Poly2: negative exponent");
  if (c == 0.0) return;
  for (Term& t : terms_) {
    if (t.i == i && t.j == j) {
      t.c += c;
      return;
    }
  }
  terms_.push_back({i, j, c});
}

Poly2 Poly2::dx() const {
  Poly2 out;
  for (const Term& t : terms_)
    if (t.i > 0) out.add(t.i - 1, t.j, t.c * t.i);
  return out;
}

Poly2 Poly2::dy() const {
  Poly2 out;
  for (const Term& t : terms_)
    if (t.j > 0) out.add(t.i, t.j - 1, t.c * t.j);
  return out;
}

double Poly2::operator()(const Point& p) const {
  double s = 0.0;
  for (const Term& t : terms_) s += t.c * std::pow(p.x(), t.i) * std::pow(p.y(), t.j);
  return s;
}

int Poly2::degree() const {
  int d = 0;
  for (const Term& t : terms_) d = std::max(d, t.i + t.j);
  return d;
}

// ---------------------------------------------------------------------------
// Manufactured solutions
// ---------------------------------------------------------------------------

ManufacturedSolution make_poly_solution(const Poly2& p, const std::string& id) {
  const Poly2 px = p.dx(), py = p.dy();
  const Poly2 pxx = px.dx(), pxy = px.dy(), pyy = py.dy();
  const Poly2 lapp = [&] {
    Poly2 l = pxx;
    for (const auto& t : pyy.terms()) l.add(t.i, t.j, t.c);
    return l;
  }();
  const Poly2 lap_px = lapp.dx(), lap_py = lapp.dy();
  const Poly2 lap_pyy = lap_py.dy();
  const Poly2 bih = [&] {
    Poly2 l = lap_px.dx();
    for (const auto& t : lap_pyy.terms()) l.add(t.i, t.j, t.c);
    return l;
  }();

  ManufacturedSolution ms;
  ms.id = id;
  ms.u = [p](const Point& q) { return p(q); };
  ms.grad = [px, py](const Point& q) { return Point(px(q), py(q)); };
  ms.hess = [pxx, pxy, pyy](const Point& q) {
    Eigen::Matrix2d H;
    H << pxx(q), pxy(q), pxy(q), pyy(q);
    return H;
  };
  ms.lap = [lapp](const Point& q) { return lapp(q); };
  ms.grad_lap = [lap_px, lap_py](const Point& q) { return Point(lap_px(q), lap_py(q)); };
  ms.f = [bih](const Point& q) { return bih(q); };
  ms.note = "global polynomial of degree " + std::to_string(p.degree());
  return ms;
}

namespace {

ManufacturedSolution make_sinsin() {
  const double pi = M_PI;
  ManufacturedSolution ms;
  ms.id = "sinsin";
  ms.u = [pi](const Point& p) { return std::sin(pi * p.x()) * std::sin(pi * p.y()); };
  ms.grad = [pi](const Point& p) {
    return Point(pi * std::cos(pi * p.x()) * std::sin(pi * p.y()),
                 pi * std::sin(pi * p.x()) * std::cos(pi * p.y()));
  };
  ms.hess = [pi](const Point& p) {
    const double sx = std::sin(pi * p.x()), cx = std::cos(pi * p.x());
    const double sy = std::sin(pi * p.y()), cy = std::cos(pi * p.y());
    Eigen::Matrix2d H;
    H << -pi * pi * sx * sy, pi * pi * cx * cy, pi * pi * cx * cy, -pi * pi * sx * sy;
    return H;
  };
  ms.lap = [pi](const Point& p) {
    return -2.0 * pi * pi * std::sin(pi * p.x()) * std::sin(pi * p.y());
  };
  ms.grad_lap = [pi](const Point& p) {
    return Point(-2.0 * std::pow(pi, 3) * std::cos(pi * p.x()) * std::sin(pi * p.y()),
                 -2.0 * std::pow(pi, 3) * std::sin(pi * p.x()) * std::cos(pi * p.y()));
  };
  ms.f = [pi](const Point& p) {
    return 4.0 * std::pow(pi, 4) * std::sin(pi * p.x()) * std::sin(pi * p.y());
  };
  ms.note = "smooth, zero trace, nonzero normal derivative";
  return ms;
}

ManufacturedSolution make_bubble() {
  // u = g(x) g(y) with g(t) = t^2 (1-t)^2: xi = nu = 0, pure f drive.
  Poly2 p;
  // g(x) g(y) = (x^2 - 2x^3 + x^4)(y^2 - 2y^3 + y^4)
  const double gc[5] = {0.0, 0.0, 1.0, -2.0, 1.0};
  for (int i = 2; i <= 4; ++i)
    for (int j = 2; j <= 4; ++j) p.add(i, j, gc[i] * gc[j]);
  ManufacturedSolution ms = make_poly_solution(p, "bubble");
  ms.note = "clamped bubble x^2(1-x)^2 y^2(1-y)^2, homogeneous xi and nu";
  return ms;
}

ManufacturedSolution make_p2() {
  Poly2 p;
  p.add(2, 0, 1.0);
  p.add(1, 1, 1.0);
  p.add(0, 2, -1.0);
  return make_poly_solution(p, "p2");  // x^2 + x y - y^2
}

ManufacturedSolution make_p3() {
  Poly2 p;
  p.add(3, 0, 1.0);
  p.add(2, 1, 2.0);
  p.add(0, 3, -1.0);
  p.add(2, 0, 1.0);
  p.add(1, 1, -1.0);
  return make_poly_solution(p, "p3");
}

ManufacturedSolution make_p4() {
  Poly2 p;
  p.add(4, 0, 1.0);
  p.add(3, 1, 1.0);
  p.add(2, 2, 1.0);
  p.add(0, 4, -1.0);
  p.add(2, 1, 1.0);
  return make_poly_solution(p, "p4");
}

}  // namespace

const ManufacturedSolution& manufactured_solution(const std::string& id) {
  static const std::map<std::string, ManufacturedSolution> registry = [] {
    std::map<std::string, ManufacturedSolution> r;
    for (auto& ms : {make_sinsin(), make_bubble(), make_p2(), make_p3(), make_p4()})
      r.emplace(ms.id, ms);
    return r;
  }();
  auto it = registry.find(id);
  if (it == registry.end())
    throw std::invalid_argument("unknown manufactured solution '" + id + "'");
  return it->second;
}

std::vector<std::string> manufactured_solution_ids() {
  return {"sinsin", "bubble", "p2", "p3", "p4"};
}

BoundaryData boundary_data_from(const ManufacturedSolution& ms) {
  BoundaryData bc;
  bc.xi = ms.u;
  bc.nu = [grad = ms.grad](const Point& p, const Point& n) { return grad(p).dot(n); };
  bc.dxi_dtau = [grad = ms.grad](const Point& p, const Point& tau) { return grad(p).dot(tau); };
  return bc;
}

void spot_check(const ManufacturedSolution& ms, std::uint64_t seed) {
  Rng rng(seed);
  const double eps = 1e-5;
  for (int trial = 0; trial < 8; ++trial) {
    const Point p(rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8));
    const Point ex(1.0, 0.0), ey(0.0, 1.0);
    const Point g = ms.grad(p);
    const double gx_fd = (ms.u(p + eps * ex) - ms.u(p - eps * ex)) / (2.0 * eps);
    const double gy_fd = (ms.u(p + eps * ey) - ms.u(p - eps * ey)) / (2.0 * eps);
    if (std::abs(g.x() - gx_fd) > 1e-6 * (1.0 + std::abs(g.x())) ||
        std::abs(g.y() - gy_fd) > 1e-6 * (1.0 + std::abs(g.y())))
      throw std::runtime_error("manufactured solution '" + ms.id + "': grad inconsistent");
    const double lap_fd = (ms.lap(p + eps * ex) - ms.lap(p - eps * ex)) / (2.0 * eps);
    if (std::abs(ms.grad_lap(p).x() - lap_fd) > 1e-4 * (1.0 + std::abs(lap_fd)))
      throw std::runtime_error("manufactured solution '" + ms.id + "': grad_lap inconsistent");
    const double f_fd =
        (ms.grad_lap(p + eps * ex).x() - ms.grad_lap(p - eps * ex).x()) / (2.0 * eps) +
        (ms.grad_lap(p + eps * ey).y() - ms.grad_lap(p - eps * ey).y()) / (2.0 * eps);
    if (std::abs(ms.f(p) - f_fd) > 1e-4 * (1.0 + std::abs(ms.f(p))))
      throw std::runtime_error("manufactured solution '" + ms.id + "': f inconsistent");
  }
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

double energy_norm(const Discretization& d, const WGField& v) {
  return std::sqrt(std::max(0.0, as_form(d, v, v)));
}

double xi_norm(const Discretization& d, const Multiplier& lam) {
  const Mesh& mesh = *d.mesh;
  double s = 0.0;
  for (int ie = 0; ie < mesh.n_interior_edges(); ++ie) {
    const double he = mesh.edges[mesh.interior_edges[ie]].length;
    const double* base = lam.coeffs.data() + lam.base(ie);
    s += he * he * he * kernels::nrm2_sq(base, d.m);
    s += he * kernels::nrm2_sq(base + d.m, 2 * d.m);
  }
  return std::sqrt(s);
}

double wh0_norm(const Discretization& d, const WGField& v) {
  if (v.layout != TraceLayout::two_sided)
    throw std::invalid_argument("wh0_norm: field must be two-sided");
  const Mesh& mesh = *d.mesh;
  double s = as_form(d, v, v);
  for (int ie = 0; ie < mesh.n_interior_edges(); ++ie) {
    const int e = mesh.interior_edges[ie];
    const double he = mesh.edges[e].length;
    const Eigen::VectorXd j = jump(d, v, e);
    s += kernels::nrm2_sq(j.data(), d.m) / (he * he * he);
    s += kernels::nrm2_sq(j.data() + d.m, 2 * d.m) / he;
  }
  return std::sqrt(std::max(0.0, s));
}

// ---------------------------------------------------------------------------
// Exact multiplier
// ---------------------------------------------------------------------------

Eigen::MatrixXd exact_multiplier_values(const ManufacturedSolution& ms, const Mesh& mesh,
                                        int edge, int side_cell, const EdgeQuad& eq) {
  const Point n = mesh.outward_normal(side_cell, edge);
  Eigen::MatrixXd out(static_cast<int>(eq.points.size()), 3);
  for (int q = 0; q < static_cast<int>(eq.points.size()); ++q) {
    const Point& p = eq.points[q];
    out(q, 0) = ms.grad_lap(p).dot(n);
    const Point hg = ms.hess(p) * n;
    out(q, 1) = -hg.x();
    out(q, 2) = -hg.y();
  }
  return out;
}

Multiplier project_exact_multiplier(const Discretization& d, const ManufacturedSolution& ms) {
  const Mesh& mesh = *d.mesh;
  Multiplier lam = zero_multiplier(d);
  for (int ie = 0; ie < mesh.n_interior_edges(); ++ie) {
    const int e = mesh.interior_edges[ie];
    const EdgeQuad& eq = d.equad_data[e];
    const Eigen::MatrixXd vals = exact_multiplier_values(ms, mesh, e, mesh.edges[e].left_cell, eq);
    const Eigen::MatrixXd B = d.ebasis[e].values(eq.arclen);
    for (int comp = 0; comp < 3; ++comp) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(d.m);
      for (int q = 0; q < static_cast<int>(eq.points.size()); ++q)
        c += eq.weights[q] * vals(q, comp) * B.row(q).transpose();
      lam.coeffs.segment(lam.base(ie) + comp * d.m, d.m) = c;
    }
  }
  return lam;
}

double xi_error_exact(const Discretization& d, const ManufacturedSolution& ms,
                      const Multiplier& lambda_h) {
  const Mesh& mesh = *d.mesh;
  double s = 0.0;
  for (int ie = 0; ie < mesh.n_interior_edges(); ++ie) {
    const int e = mesh.interior_edges[ie];
    const double he = mesh.edges[e].length;
    const EdgeQuad& eq = d.equad_data[e];
    const Eigen::MatrixXd vals = exact_multiplier_values(ms, mesh, e, mesh.edges[e].left_cell, eq);
    const Eigen::MatrixXd B = d.ebasis[e].values(eq.arclen);
    double err_b = 0.0, err_g = 0.0;
    for (int q = 0; q < static_cast<int>(eq.points.size()); ++q) {
      const double lb =
          B.row(q).dot(lambda_h.coeffs.segment(lambda_h.base(ie), d.m));
      const double lgx =
          B.row(q).dot(lambda_h.coeffs.segment(lambda_h.base(ie) + d.m, d.m));
      const double lgy =
          B.row(q).dot(lambda_h.coeffs.segment(lambda_h.base(ie) + 2 * d.m, d.m));
      err_b += eq.weights[q] * std::pow(vals(q, 0) - lb, 2);
      err_g += eq.weights[q] * (std::pow(vals(q, 1) - lgx, 2) + std::pow(vals(q, 2) - lgy, 2));
    }
    s += he * he * he * err_b + he * err_g;
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Residual functional
// ---------------------------------------------------------------------------

double residual_ell(const Discretization& d, const ManufacturedSolution& ms, const WGField& v) {
  const Mesh& mesh = *d.mesh;
  const WGField qhu = project_Qh(d, ms.u, ms.grad);

  double total = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const LocalDofLayout& lay = d.ops[c].layout;
    const Eigen::VectorXd lv = gather_local(d, v, c);

    // stabilizer part s_T(Q_h u, v)
    total += gather_local(d, qhu, c).dot(d.ops[c].S * lv);

    // cellwise projections of the Hessian entries onto P_{k-2}(T)
    const auto hess_comp = [&](int i, int j) {
      return project_cell(d.cbasis[c], d.cquad[c], d.k - 2,
                          [&](const Point& p) { return ms.hess(p)(i, j); });
    };
    const std::array<Eigen::VectorXd, 4> qh = {hess_comp(0, 0), hess_comp(0, 1), hess_comp(1, 0),
                                               hess_comp(1, 1)};

    for (int l = 0; l < lay.n_edges; ++l) {
      const int e = mesh.cell_edges[c][l];
      const Point n = mesh.outward_normal(c, e);
      const EdgeQuad& eq = d.equad_data[e];
      const int nq = static_cast<int>(eq.points.size());

      const Eigen::MatrixXd V = d.cbasis[c].values(eq.points);
      Eigen::MatrixXd Gx, Gy;
      d.cbasis[c].gradients(eq.points, Gx, Gy);
      const Eigen::MatrixXd B = d.ebasis[e].values(eq.arclen);

      const Eigen::VectorXd v0c = lv.head(d.Nk);
      const Eigen::VectorXd vb = lv.segment(lay.vb(l), d.m);
      const Eigen::VectorXd vgx = lv.segment(lay.vg(l, 0), d.m);
      const Eigen::VectorXd vgy = lv.segment(lay.vg(l, 1), d.m);

      for (int q = 0; q < nq; ++q) {
        const Point& p = eq.points[q];
        const double w = eq.weights[q];
        const Eigen::Matrix2d H = ms.hess(p);

        // test data at this point
        const double v0 = V.row(q).head(d.Nk).dot(v0c);
        const Point gv0(Gx.row(q).head(d.Nk).dot(v0c), Gy.row(q).head(d.Nk).dot(v0c));
        const double vbv = B.row(q).dot(vb);
        const Point vg(B.row(q).dot(vgx), B.row(q).dot(vgy));

        // first sum: <H_ij - Qh(H_ij), (d_i v0 - v_gi) n_j>
        double t1 = 0.0;
        double div_defect_n = ms.grad_lap(p).dot(n);  // exact part of the second sum
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) {
            const Eigen::VectorXd& coef = qh[2 * i + j];
            const double qhij = V.row(q).head(d.Nk2).dot(coef);
            t1 += (H(i, j) - qhij) * (gv0(i) - vg(i)) * n(j);
            const double dj_qhij = (j == 0 ? Gx : Gy).row(q).head(d.Nk2).dot(coef);
            div_defect_n -= dj_qhij * n(i);
          }
        }
        total += w * t1;
        // second sum: -<d_j(H_ij - Qh H_ij) n_i, v0 - vb>
        total -= w * div_defect_n * (v0 - vbv);
      }
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Error reports and studies
// ---------------------------------------------------------------------------

ErrorReport compute_errors(const Discretization& d, const ManufacturedSolution& ms,
                           const Solution& sol) {
  const Mesh& mesh = *d.mesh;
  ErrorReport rep;
  rep.h = mesh.mesh_size;
  rep.iterations = sol.report.iterations;
  rep.solve_seconds = sol.report.seconds;

  const WGField qhu = project_Qh(d, ms.u, ms.grad);
  WGField diff = qhu;
  diff.coeffs -= sol.u.coeffs;
  rep.energy_error = energy_norm(d, diff);

  SharedDofMap map(d);
  double l2sq = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c)
    l2sq += diff.coeffs.segment(map.cell_base(c), d.Nk).squaredNorm();
  rep.l2_error = std::sqrt(l2sq);

  if (sol.lambda) {
    const Multiplier qhl = project_exact_multiplier(d, ms);
    Multiplier eps = *sol.lambda;
    eps.coeffs = qhl.coeffs - sol.lambda->coeffs;
    rep.xi_error_proj = xi_norm(d, eps);
    rep.xi_error_exact = xi_error_exact(d, ms, *sol.lambda);
  }
  return rep;
}

std::vector<StudyRow> convergence_study(const StudyConfig& cfg, const ManufacturedSolution& ms) {
  if (cfg.ns.size() < 2)
    throw std::invalid_argument("convergence_study: need at least two meshes");
  const BoundaryData bc = boundary_data_from(ms);

  std::vector<StudyRow> rows;
  for (std::size_t i = 0; i < cfg.ns.size(); ++i) {
    const int n = cfg.ns[i];
    Mesh mesh = (cfg.kind == MeshKind::tri) ? structured_triangle_mesh(n)
                                            : structured_quad_mesh(n);
    if (cfg.perturb > 0.0) mesh = perturb_interior(mesh, cfg.perturb, cfg.seed);
    validate_mesh(mesh);
    const Discretization d = build_discretization(mesh, cfg.k, cfg.solve.threads);
    const Solution sol = solve(cfg.scheme, d, ms.f, bc, cfg.solve);

    StudyRow row;
    row.err = compute_errors(d, ms, sol);
    row.err.n = n;
    if (!rows.empty()) {
      const ErrorReport& prev = rows.back().err;
      const double lh = std::log(prev.h / row.err.h);
      if (lh > 0.0 && prev.energy_error > 0.0 && row.err.energy_error > 0.0) {
        row.rate_energy = std::log(prev.energy_error / row.err.energy_error) / lh;
        row.has_rate = true;
      }
      if (lh > 0.0 && prev.xi_error_exact > 0.0 && row.err.xi_error_exact > 0.0)
        row.rate_xi = std::log(prev.xi_error_exact / row.err.xi_error_exact) / lh;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace wg
