#include <cmath>

#include "doctest.h"
#include "test_util.hpp"
#include "wg/quadrature.hpp"

using namespace wg;

namespace {

// exact integral of x^a y^b over the reference triangle {x,y>=0, x+y<=1}
double ref_tri_monomial(int a, int b) {
  // a! b! / (a+b+2)!
  double v = 1.0;
  for (int i = 1; i <= a; ++i) v *= i;
  for (int i = 1; i <= b; ++i) v *= i;
  for (int i = 1; i <= a + b + 2; ++i) v /= i;
  return v;
}

}  // namespace

TEST_CASE("gauss-legendre on [0,1]") {
  std::vector<double> x, w;
  gauss_legendre01(2, x, w);
  double s2 = 0.0;
  for (int i = 0; i < 2; ++i) s2 += w[i] * x[i] * x[i];
  CHECK(s2 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  gauss_legendre01(3, x, w);
  double s5 = 0.0, s0 = 0.0;
  for (int i = 0; i < 3; ++i) {
    s5 += w[i] * std::pow(x[i], 5);
    s0 += w[i];
  }
  CHECK(s5 == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(s0 == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("reference triangle monomials") {
  const Point a(0, 0), b(1, 0), c(0, 1);
  std::vector<Point> pts;
  std::vector<double> wts;

  SUBCASE("degree 0 and 1") {
    triangle_rule(a, b, c, 1, pts, wts);
    double s1 = 0.0, sx = 0.0;
    for (std::size_t q = 0; q < pts.size(); ++q) {
      s1 += wts[q];
      sx += wts[q] * pts[q].x();
    }
    CHECK(s1 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sx == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  }

  SUBCASE("x^2 y with a degree-3 rule") {
    triangle_rule(a, b, c, 3, pts, wts);
    double s = 0.0;
    for (std::size_t q = 0; q < pts.size(); ++q)
      s += wts[q] * pts[q].x() * pts[q].x() * pts[q].y();
    CHECK(s == doctest::Approx(1.0 / 60.0).epsilon(1e-13));
  }

  SUBCASE("all monomials up to degree 12") {
    triangle_rule(a, b, c, 12, pts, wts);
    for (int d = 0; d <= 12; ++d) {
      for (int i = 0; i <= d; ++i) {
        double s = 0.0;
        for (std::size_t q = 0; q < pts.size(); ++q)
          s += wts[q] * std::pow(pts[q].x(), i) * std::pow(pts[q].y(), d - i);
        const double exact = ref_tri_monomial(i, d - i);
        CHECK(std::abs(s - exact) < 1e-14 + 1e-13 * std::abs(exact));
      }
    }
  }
}

TEST_CASE("cell quadrature: positivity, measure, exactness on perturbed cells") {
  Mesh mesh = perturb_interior(structured_quad_mesh(3), 0.1, 5);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const CellQuad rule = cell_quadrature(mesh, c, 8);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      CHECK(rule.weights[q] > 0.0);
      s += rule.weights[q];
    }
    CHECK(s == doctest::Approx(mesh.cells[c].area).epsilon(1e-12));
  }

  // exactness: integrate monomials over a quad cell == sum over its two
  // triangles computed with an independent split
  const int c = 4;
  const CellQuad rule = cell_quadrature(mesh, c, 10);
  const auto& vs = mesh.cells[c].vertex_ids;
  std::vector<Point> p1, p2;
  std::vector<double> w1, w2;
  triangle_rule(mesh.vertices[vs[0]], mesh.vertices[vs[1]], mesh.vertices[vs[2]], 10, p1, w1);
  triangle_rule(mesh.vertices[vs[0]], mesh.vertices[vs[2]], mesh.vertices[vs[3]], 10, p2, w2);
  for (int d = 0; d <= 10; d += 3) {
    for (int i = 0; i <= d; i += 2) {
      auto mono = [&](const Point& p) { return std::pow(p.x(), i) * std::pow(p.y(), d - i); };
      double s = 0.0, ref = 0.0;
      for (std::size_t q = 0; q < rule.points.size(); ++q) s += rule.weights[q] * mono(rule.points[q]);
      for (std::size_t q = 0; q < p1.size(); ++q) ref += w1[q] * mono(p1[q]);
      for (std::size_t q = 0; q < p2.size(); ++q) ref += w2[q] * mono(p2[q]);
      CHECK(s == doctest::Approx(ref).epsilon(1e-12));
    }
  }

  CHECK_THROWS(cell_quadrature(mesh, 0, 41));
}

TEST_CASE("edge quadrature: measure and exactness") {
  const Mesh mesh = structured_triangle_mesh(2);
  for (int e = 0; e < mesh.n_edges(); ++e) {
    const EdgeQuad rule = edge_quadrature(mesh, e, 4);
    double s = 0.0;
    for (double w : rule.weights) s += w;
    CHECK(s == doctest::Approx(mesh.edges[e].length).epsilon(1e-13));
  }

  // integrate arc-length monomial s^5 on some edge with a 3-point rule
  const int e = 3;
  const EdgeQuad rule = edge_quadrature(mesh, e, 5);
  REQUIRE(rule.points.size() == 3);
  const double L = mesh.edges[e].length;
  double s = 0.0;
  for (std::size_t q = 0; q < rule.points.size(); ++q)
    s += rule.weights[q] * std::pow(rule.arclen[q] / L, 5);
  CHECK(s == doctest::Approx(L / 6.0).epsilon(1e-13));
}
