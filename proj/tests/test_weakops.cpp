#include <cmath>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "test_util.hpp"
#include "wg/assembly.hpp"
#include "wg/weakops.hpp"

using namespace wg;
using wgtest::random_poly;

TEST_CASE("project_cell: polynomial reproduction and least-squares oracle") {
  Mesh mesh = perturb_interior(structured_triangle_mesh(2), 0.1, 21);
  const Discretization d = build_discretization(mesh, 2);
  const int c = 3;

  SUBCASE("constant reproduced") {
    const Eigen::VectorXd coef =
        project_cell(d.cbasis[c], d.cquad[c], 2, [](const Point&) { return 4.25; });
    const Eigen::MatrixXd V = d.cbasis[c].values({mesh.cells[c].centroid});
    CHECK(V.row(0).dot(coef) == doctest::Approx(4.25).epsilon(1e-13));
  }

  SUBCASE("f in P_r reproduced pointwise") {
    const Poly2 p = random_poly(2, 31);
    const Eigen::VectorXd coef =
        project_cell(d.cbasis[c], d.cquad[c], 2, [&](const Point& q) { return p(q); });
    std::vector<Point> pts;
    for (int v : mesh.cells[c].vertex_ids) pts.push_back(mesh.vertices[v]);
    const Eigen::MatrixXd V = d.cbasis[c].values(pts);
    for (int q = 0; q < static_cast<int>(pts.size()); ++q)
      CHECK(std::abs(V.row(q).dot(coef) - p(pts[q])) < 1e-10);
  }

  SUBCASE("sin(x) residual matches a dense least-squares oracle") {
    auto f = [](const Point& p) { return std::sin(p.x()); };
    const Eigen::VectorXd coef = project_cell(d.cbasis[c], d.cquad[c], 2, f);

    const CellQuad& quad = d.cquad[c];
    const int nq = static_cast<int>(quad.points.size());
    const Eigen::MatrixXd V = d.cbasis[c].values(quad.points);
    double res_sq = 0.0;
    for (int q = 0; q < nq; ++q)
      res_sq += quad.weights[q] * std::pow(f(quad.points[q]) - V.row(q).head(6).dot(coef), 2);

    // oracle: weighted least squares in the raw monomial family
    Eigen::MatrixXd M(nq, 6);
    Eigen::VectorXd rhs(nq);
    for (int q = 0; q < nq; ++q) {
      const double sw = std::sqrt(quad.weights[q]);
      const Point& p = quad.points[q];
      int col = 0;
      for (int deg = 0; deg <= 2; ++deg)
        for (int a = deg; a >= 0; --a)
          M(q, col++) = sw * std::pow(p.x(), a) * std::pow(p.y(), deg - a);
      rhs(q) = sw * f(p);
    }
    const Eigen::VectorXd ls = M.colPivHouseholderQr().solve(rhs);
    const double oracle_res = (M * ls - rhs).norm();
    CHECK(std::sqrt(res_sq) == doctest::Approx(oracle_res).epsilon(1e-9));
  }
}

TEST_CASE("project_edge: constants, means, linear data") {
  const Mesh mesh = structured_quad_mesh(1);
  const Discretization d = build_discretization(mesh, 2);
  const int e = 0;
  REQUIRE(mesh.edges[e].length == doctest::Approx(1.0));

  const Eigen::VectorXd cc =
      project_edge(d.ebasis[e], d.equad[e], [](const Point&) { return 3.0; });
  // reconstruct anywhere: must equal 3
  const Eigen::MatrixXd B = d.ebasis[e].values({0.3});
  CHECK(B.row(0).dot(cc) == doctest::Approx(3.0).epsilon(1e-13));

  // k=2 -> degree 0: the projection is the edge mean; f = s has mean 1/2 and
  // coefficient 1/2 against the orthonormal constant (sqrt(1/L) = 1 here)
  const Point a = mesh.vertices[mesh.edges[e].endpoint_ids[0]];
  const Point t = mesh.edges[e].tangent;
  const Eigen::VectorXd cs =
      project_edge(d.ebasis[e], d.equad[e], [&](const Point& p) { return (p - a).dot(t); });
  CHECK(cs(0) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("project_Qh: constants, polynomials, edge means") {
  Mesh mesh = perturb_interior(structured_triangle_mesh(4), 0.05, 2);
  const Discretization d = build_discretization(mesh, 2);
  SharedDofMap map(d);

  SUBCASE("u == 1") {
    const WGField v = project_Qh(
        d, [](const Point&) { return 1.0; }, [](const Point&) { return Point(0, 0); });
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const Eigen::MatrixXd V = d.cbasis[c].values({mesh.cells[c].centroid});
      CHECK(V.row(0).dot(v.coeffs.segment(map.cell_base(c), d.Nk)) ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
    for (int e = 0; e < mesh.n_edges(); ++e) {
      const Eigen::MatrixXd B = d.ebasis[e].values({0.5 * mesh.edges[e].length});
      CHECK(B.row(0).dot(v.coeffs.segment(map.vb(e), d.m)) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(v.coeffs.segment(map.vg(e, 0), d.m).norm()) < 1e-13);
      CHECK(std::abs(v.coeffs.segment(map.vg(e, 1), d.m).norm()) < 1e-13);
    }
  }

  SUBCASE("u in P_k reproduced on each cell") {
    const Poly2 p = random_poly(2, 77);
    const Poly2 px = p.dx(), py = p.dy();
    const WGField v = project_Qh(
        d, [&](const Point& q) { return p(q); },
        [&](const Point& q) { return Point(px(q), py(q)); });
    for (int c = 0; c < mesh.n_cells(); ++c) {
      std::vector<Point> pts = {mesh.cells[c].centroid};
      const Eigen::MatrixXd V = d.cbasis[c].values(pts);
      CHECK(std::abs(V.row(0).dot(v.coeffs.segment(map.cell_base(c), d.Nk)) - p(pts[0])) < 1e-10);
    }
  }

  SUBCASE("per-edge v_b equals the edge mean of u for k=2") {
    const auto& ms = manufactured_solution("sinsin");
    const WGField v = project_Qh(d, ms.u, ms.grad);
    for (int e = 0; e < mesh.n_edges(); ++e) {
      const EdgeQuad eq = edge_quadrature(mesh, e, 12);
      double mean = 0.0;
      for (int q = 0; q < static_cast<int>(eq.points.size()); ++q)
        mean += eq.weights[q] * ms.u(eq.points[q]);
      mean /= mesh.edges[e].length;
      const Eigen::MatrixXd B = d.ebasis[e].values({0.1 * mesh.edges[e].length});
      // degree-0 reconstruction is constant == mean
      CHECK(B.row(0).dot(v.coeffs.segment(map.vb(e), d.m)) ==
            doctest::Approx(mean).epsilon(1e-10));
    }
  }
}

TEST_CASE("weak hessian maps: exactness oracles") {
  Mesh mesh = perturb_interior(structured_triangle_mesh(2), 0.08, 4);
  const int k = 2;
  const Discretization d = build_discretization(mesh, k);
  SharedDofMap map(d);

  SUBCASE("constants have zero weak Hessian") {
    const WGField one = project_Qh(
        d, [](const Point&) { return 1.0; }, [](const Point&) { return Point(0, 0); });
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const Eigen::VectorXd loc = gather_local(d, one, c);
      for (const auto& Wij : d.ops[c].W) CHECK((Wij * loc).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  SUBCASE("u = x^2: W11 is the constant 2, other components vanish") {
    const WGField v = project_Qh(
        d, [](const Point& p) { return p.x() * p.x(); },
        [](const Point& p) { return Point(2.0 * p.x(), 0.0); });
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const Eigen::VectorXd loc = gather_local(d, v, c);
      const Eigen::VectorXd w11 = d.ops[c].W[0] * loc;
      // reconstruct at the centroid: constant 2
      const Eigen::MatrixXd V = d.cbasis[c].values({mesh.cells[c].centroid});
      CHECK(V.row(0).head(d.Nk2).dot(w11) == doctest::Approx(2.0).epsilon(1e-11));
      CHECK((d.ops[c].W[1] * loc).cwiseAbs().maxCoeff() < 1e-11);
      CHECK((d.ops[c].W[2] * loc).cwiseAbs().maxCoeff() < 1e-11);
      CHECK((d.ops[c].W[3] * loc).cwiseAbs().maxCoeff() < 1e-11);
    }
  }

  SUBCASE("single v_b bump against direct edge quadrature") {
    const int c = 1;
    const LocalDofLayout& lay = d.ops[c].layout;
    const int l = 2;  // local edge
    const int e = mesh.cell_edges[c][l];
    Eigen::VectorXd loc = Eigen::VectorXd::Zero(lay.total);
    loc(lay.vb(l)) = 1.0;  // v_b = phi_0 on that edge (k=2: single dof)

    const Point n = mesh.outward_normal(c, e);
    const EdgeQuad eq = edge_quadrature(mesh, e, 8);
    const Eigen::MatrixXd B = d.ebasis[e].values(eq.arclen);
    Eigen::MatrixXd Gx, Gy;
    d.cbasis[c].gradients(eq.points, Gx, Gy);

    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const Eigen::VectorXd got = d.ops[c].W[2 * i + j] * loc;
        for (int mrow = 0; mrow < d.Nk2; ++mrow) {
          double expect = 0.0;
          for (int q = 0; q < static_cast<int>(eq.points.size()); ++q)
            expect -= eq.weights[q] * B(q, 0) * n(i) * (j == 0 ? Gx : Gy)(q, mrow);
          CHECK(got(mrow) == doctest::Approx(expect).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("both weak-Hessian formulas agree") {
  for (bool quad_mesh : {false, true}) {
    Mesh mesh = quad_mesh ? perturb_interior(structured_quad_mesh(2), 0.05, 8)
                          : perturb_interior(structured_triangle_mesh(2), 0.08, 9);
    for (int k : {2, 3}) {
      for (int c = 0; c < mesh.n_cells(); ++c) {
        const auto Wa = weak_hessian_maps(mesh, c, k);
        const auto Wb = weak_hessian_maps_ibp(mesh, c, k);
        for (int ij = 0; ij < 4; ++ij) {
          const double scale = 1.0 + Wa[ij].cwiseAbs().maxCoeff();
          CHECK((Wa[ij] - Wb[ij]).cwiseAbs().maxCoeff() < 1e-11 * scale);
        }
      }
    }
  }
}

TEST_CASE("stabilizer: projected polynomials vanish, unit bumps scale with h_T") {
  Mesh mesh = perturb_interior(structured_triangle_mesh(2), 0.06, 12);
  const int k = 2;
  const Discretization d = build_discretization(mesh, k);

  SUBCASE("s_T(Q_h p, Q_h p) = 0 for global p in P_k") {
    const Poly2 p = random_poly(k, 123);
    const Poly2 px = p.dx(), py = p.dy();
    const WGField v = project_Qh(
        d, [&](const Point& q) { return p(q); },
        [&](const Point& q) { return Point(px(q), py(q)); });
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const Eigen::VectorXd loc = gather_local(d, v, c);
      const double sval = loc.dot(d.ops[c].S * loc);
      const double scale = loc.dot(loc);
      CHECK(std::abs(sval) < 1e-12 * (1.0 + scale));
    }
  }

  SUBCASE("unit trace bumps") {
    const int c = 0;
    const LocalDofLayout& lay = d.ops[c].layout;
    const double hT = mesh.cells[c].diameter;
    for (int l = 0; l < lay.n_edges; ++l) {
      Eigen::VectorXd vb = Eigen::VectorXd::Zero(lay.total);
      vb(lay.vb(l)) = 1.0;
      CHECK(vb.dot(d.ops[c].S * vb) ==
            doctest::Approx(1.0 / (hT * hT * hT)).epsilon(1e-12));

      Eigen::VectorXd vg = Eigen::VectorXd::Zero(lay.total);
      vg(lay.vg(l, 0)) = 1.0;
      CHECK(vg.dot(d.ops[c].S * vg) == doctest::Approx(1.0 / hT).epsilon(1e-12));
    }
  }
}

TEST_CASE("local operators: symmetry, kernel dimension, v0-block definiteness") {
  Mesh mesh = perturb_interior(structured_triangle_mesh(2), 0.05, 31);
  const int k = 2;
  const Discretization d = build_discretization(mesh, k);

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Eigen::MatrixXd& As = d.ops[c].As;
    CHECK((As - As.transpose()).cwiseAbs().maxCoeff() <=
          1e-12 * (1.0 + As.cwiseAbs().maxCoeff()));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(As);
    const double top = es.eigenvalues().cwiseAbs().maxCoeff();
    int null_dim = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      CHECK(es.eigenvalues()(i) > -1e-10 * top);  // PSD
      if (std::abs(es.eigenvalues()(i)) < 1e-10 * top) ++null_dim;
    }
    CHECK(null_dim == 3);  // local linears with matching traces

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es0(As.topLeftCorner(d.Nk, d.Nk));
    CHECK(es0.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("commutativity of projection and weak Hessian") {
  Mesh mesh = perturb_interior(structured_triangle_mesh(4), 0.1, 100);
  for (int k : {2, 3}) {
    const Discretization d = build_discretization(mesh, k);
    const int trials = (k == 2) ? 50 : 10;
    for (int t = 0; t < trials; ++t) {
      const Poly2 w = random_poly(k + 2, 1000 + 13 * t + k);
      const Poly2 wx = w.dx(), wy = w.dy();
      const Poly2 wxx = wx.dx(), wxy = wx.dy(), wyy = wy.dy();
      const std::array<const Poly2*, 4> d2 = {&wxx, &wxy, &wxy, &wyy};

      const WGField qhw = project_Qh(
          d, [&](const Point& q) { return w(q); },
          [&](const Point& q) { return Point(wx(q), wy(q)); });

      for (int c = 0; c < mesh.n_cells(); ++c) {
        const Eigen::VectorXd loc = gather_local(d, qhw, c);
        for (int ij = 0; ij < 4; ++ij) {
          const Eigen::VectorXd lhs = d.ops[c].W[ij] * loc;
          const Eigen::VectorXd rhs = project_cell(
              d.cbasis[c], d.cquad[c], k - 2, [&](const Point& q) { return (*d2[ij])(q); });
          const double scale = 1.0 + rhs.norm();
          CHECK((lhs - rhs).norm() < 1e-9 * scale);
        }
      }
    }
  }
}

TEST_CASE("Hessian exactness: w in P_k gives the classical Hessian") {
  const Mesh mesh = structured_quad_mesh(2);
  const int k = 3;
  const Discretization d = build_discretization(mesh, k);
  const Poly2 w = random_poly(k, 55);
  const Poly2 wx = w.dx(), wy = w.dy();
  const Poly2 wxx = wx.dx(), wxy = wx.dy(), wyy = wy.dy();
  const std::array<const Poly2*, 4> d2 = {&wxx, &wxy, &wxy, &wyy};

  const WGField qhw = project_Qh(
      d, [&](const Point& q) { return w(q); },
      [&](const Point& q) { return Point(wx(q), wy(q)); });
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Eigen::VectorXd loc = gather_local(d, qhw, c);
    // evaluate the reconstructed weak Hessian at the centroid
    const Eigen::MatrixXd V = d.cbasis[c].values({mesh.cells[c].centroid});
    for (int ij = 0; ij < 4; ++ij) {
      const Eigen::VectorXd wh = d.ops[c].W[ij] * loc;
      CHECK(V.row(0).head(d.Nk2).dot(wh) ==
            doctest::Approx((*d2[ij])(mesh.cells[c].centroid)).epsilon(1e-9));
    }
  }
}
