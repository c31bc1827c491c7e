#pragma once

#include <set>
#include <utility>

#include "wg/assembly.hpp"
#include "wg/rng.hpp"
#include "wg/verify.hpp"
#include "wg/weakops.hpp"

namespace wgtest {

using namespace wg;

// Independent edge/boundary counter built only from cell vertex loops.
struct EdgeCounts {
  int edges = 0;
  int boundary = 0;
  int interior = 0;
};

inline EdgeCounts enumerate_edges(const std::vector<std::vector<int>>& cells) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& vs : cells) {
    const int n = static_cast<int>(vs.size());
    for (int l = 0; l < n; ++l) {
      auto key = std::minmax(vs[l], vs[(l + 1) % n]);
      ++count[key];
    }
  }
  EdgeCounts c;
  c.edges = static_cast<int>(count.size());
  for (const auto& [k, v] : count)
    (v == 1 ? c.boundary : c.interior) += 1;
  return c;
}

inline EdgeCounts enumerate_edges(const Mesh& mesh) {
  std::vector<std::vector<int>> cells;
  for (const auto& c : mesh.cells) cells.push_back(c.vertex_ids);
  return enumerate_edges(cells);
}

inline Eigen::VectorXd random_vector(int n, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
  return v;
}

inline WGField random_shared_field(const Discretization& d, std::uint64_t seed,
                                   bool zero_boundary) {
  Rng rng(seed);
  WGField v;
  v.layout = TraceLayout::shared;
  v.k = d.k;
  v.mesh = d.mesh;
  SharedDofMap map(d);
  v.coeffs = random_vector(map.total, rng);
  if (zero_boundary)
    for (int e : d.mesh->boundary_edge_ids)
      v.coeffs.segment(map.edge_base(e), 3 * d.m).setZero();
  return v;
}

inline WGField random_two_sided_field(const Discretization& d, std::uint64_t seed,
                                      bool zero_boundary) {
  Rng rng(seed);
  WGField v;
  v.layout = TraceLayout::two_sided;
  v.k = d.k;
  v.mesh = d.mesh;
  TwoSidedDofMap map(d);
  v.coeffs = random_vector(map.total, rng);
  if (zero_boundary) {
    for (int c = 0; c < d.mesh->n_cells(); ++c)
      for (int l = 0; l < static_cast<int>(d.mesh->cell_edges[c].size()); ++l)
        if (d.mesh->edges[d.mesh->cell_edges[c][l]].is_boundary)
          v.coeffs.segment(map.side_base(c, l), 3 * d.m).setZero();
  }
  return v;
}

inline Multiplier random_multiplier(const Discretization& d, std::uint64_t seed) {
  Rng rng(seed);
  Multiplier lam = zero_multiplier(d);
  lam.coeffs = random_vector(static_cast<int>(lam.coeffs.size()), rng);
  return lam;
}

inline Poly2 random_poly(int degree, std::uint64_t seed) {
  Rng rng(seed);
  Poly2 p;
  for (int d = 0; d <= degree; ++d)
    for (int i = d; i >= 0; --i) p.add(i, d - i, rng.uniform(-1.0, 1.0));
  return p;
}

}  // namespace wgtest
