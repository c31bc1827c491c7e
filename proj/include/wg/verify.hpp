#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wg/assembly.hpp"
#include "wg/schemes.hpp"
#include "wg/weakops.hpp"

namespace wg {

// ---------------------------------------------------------------------------
// Bivariate polynomials (exact manufactured data and random test functions)
// ---------------------------------------------------------------------------

class Poly2 {
 public:
  struct Term {
    int i, j;
    double c;
  };

  Poly2() = default;
  void add(int i, int j, double c);
  Poly2 dx() const;
  Poly2 dy() const;
  double operator()(const Point& p) const;
  int degree() const;
  const std::vector<Term>& terms() const { return terms_; }

 private:
  std::vector<Term> terms_;
};

// ---------------------------------------------------------------------------
// Manufactured solutions
// ---------------------------------------------------------------------------

struct ManufacturedSolution {
  std::string id;
  ScalarFunc u;
  VectorFunc grad;
  std::function<Eigen::Matrix2d(const Point&)> hess;
  ScalarFunc lap;
  VectorFunc grad_lap;
  ScalarFunc f;  // biharmonic of u
  std::string note;
};

ManufacturedSolution make_poly_solution(const Poly2& p, const std::string& id);

// Shipped set: "sinsin" u = sin(pi x) sin(pi y) (zero trace, nonzero normal
// derivative), "bubble" u = x^2(1-x)^2 y^2(1-y)^2 (clamped, pure f drive),
// "p2"/"p3"/"p4" global polynomials of the matching degree (exactness).
const ManufacturedSolution& manufactured_solution(const std::string& id);
std::vector<std::string> manufactured_solution_ids();

BoundaryData boundary_data_from(const ManufacturedSolution& ms);

// finite-difference self-consistency of the closures (construction-time guard
// against typos in derivatives); throws when a field disagrees
void spot_check(const ManufacturedSolution& ms, std::uint64_t seed = 7);

// ---------------------------------------------------------------------------
// Discrete norms and error functionals
// ---------------------------------------------------------------------------

// |||v||| = a_s(v, v)^{1/2}
double energy_norm(const Discretization& d, const WGField& v);

// ||lambda||_{Xi_h}^2 = sum_e h_e^3 ||lambda_b||_e^2 + h_e ||lambda_g||_e^2
double xi_norm(const Discretization& d, const Multiplier& lam);

// ||v||_{W_h^0}^2 = |||v|||^2 + sum_e h_e^{-3} ||[v_b]||^2 + h_e^{-1} ||[v_g]||^2
double wh0_norm(const Discretization& d, const WGField& v_two_sided);

// Exact multiplier lambda_b = dn(laplace u), lambda_g = -H(u) n with n the
// outward normal of side_cell, sampled at the edge quadrature points of rule
// `eq` (values: column 0 = lambda_b, columns 1-2 = lambda_g).
Eigen::MatrixXd exact_multiplier_values(const ManufacturedSolution& ms, const Mesh& mesh,
                                        int edge, int side_cell, const EdgeQuad& eq);

// Q_h lambda: edgewise L2 projection of the exact multiplier, L side.
Multiplier project_exact_multiplier(const Discretization& d, const ManufacturedSolution& ms);

// ||lambda - lambda_h||_{Xi_h} by quadrature against the exact multiplier.
double xi_error_exact(const Discretization& d, const ManufacturedSolution& ms,
                      const Multiplier& lambda_h);

// Consistency functional ell_u(v): boundary pairings of the Hessian projection
// defect and its divergence, plus s(Q_h u, v). Edge quadrature exactness 2k+4.
double residual_ell(const Discretization& d, const ManufacturedSolution& ms, const WGField& v);

// ---------------------------------------------------------------------------
// Error reports and convergence studies
// ---------------------------------------------------------------------------

struct ErrorReport {
  double h = 0.0;
  int n = 0;
  double energy_error = 0.0;    // |||Q_h u - u_h|||
  double xi_error_proj = 0.0;   // ||Q_h lambda - lambda_h||_{Xi_h}
  double xi_error_exact = 0.0;  // ||lambda - lambda_h||_{Xi_h}
  double l2_error = 0.0;        // ||Q_0 u - u_0||_{L2}
  int iterations = 0;
  double solve_seconds = 0.0;
};

ErrorReport compute_errors(const Discretization& d, const ManufacturedSolution& ms,
                           const Solution& sol);

enum class MeshKind { tri, quad };

struct StudyConfig {
  Scheme scheme = Scheme::schur;
  MeshKind kind = MeshKind::tri;
  int k = 2;
  std::vector<int> ns;
  double perturb = 0.0;
  std::uint64_t seed = 0;
  SolveOptions solve;
};

struct StudyRow {
  ErrorReport err;
  double rate_energy = 0.0;  // vs previous row; 0 on the first row
  double rate_xi = 0.0;      // based on xi_error_exact
  bool has_rate = false;
};

// Solves on each mesh of the sequence and tabulates errors and observed
// rates log(E_prev/E_cur) / log(h_prev/h_cur).
std::vector<StudyRow> convergence_study(const StudyConfig& cfg, const ManufacturedSolution& ms);

}  // namespace wg
