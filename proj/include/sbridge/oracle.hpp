#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sbridge/core.hpp"
#include "sbridge/matrix.hpp"

// Brute-force reference implementations. Nothing here calls into the
// scaling, bridge, spectral or routing solvers.
namespace sbridge::oracle {

struct OracleBudget {
  std::size_t max_paths = 1'000'000;
  std::size_t max_states = 12;
  std::size_t max_assignment_units = 256;
};

struct WeightedPath {
  Path path;
  double mass = 0.0;
};

// Every feasible x0 -> xN path of the prior, weighted by prior mass and
// normalized: the prior conditioned on its endpoints. Sorted by mass
// descending, ties in lexicographic path order.
std::vector<WeightedPath> pinned_bridge_oracle(const PathMeasure& prior, std::size_t x0, std::size_t xN,
                                               const OracleBudget& budget = {});

struct TransportResult {
  double value = 0.0;
  Matrix coupling;
};

// Exact LP value for marginals with a common denominator D: expands both
// marginals into D unit atoms and solves the D x D assignment problem.
TransportResult assignment_ot_oracle(const Matrix& cost, std::span<const double> p, std::span<const double> q,
                                     const OracleBudget& budget = {});

// Smallest D <= max_units with every p_i D, q_j D integral (to 1e-9); 0 if none.
std::size_t common_denominator(std::span<const double> p, std::span<const double> q, std::size_t max_units);

// Minimum of sum c_ij pi_ij over every vertex of the transportation polytope,
// found by enumerating spanning-tree bases. Rows and columns <= 5.
TransportResult vertex_enumeration_ot_oracle(const Matrix& cost, std::span<const double> p,
                                             std::span<const double> q);

// Minimizes sum pi log(pi / g) over couplings of p and q (n <= 3) by dense grid
// search followed by line searches along the 2x2 cycle directions of the
// coupling polytope.
TransportResult coupling_kl_oracle(const Matrix& prior_joint, std::span<const double> p, std::span<const double> q,
                                   std::size_t grid_steps = 2000);

struct QuantileCell {
  std::size_t from = 0;
  std::size_t to = 0;
  double mass = 0.0;
};

struct QuantileCoupling {
  std::vector<QuantileCell> cells;
  double cost = 0.0;  // sum mass * (x_from - x_to)^2 / 2
};

// Monotone (CDF-matching) coupling of two mass vectors on increasing
// abscissae; optimal for convex costs on the line.
QuantileCoupling quantile_coupling_oracle(std::span<const double> points, std::span<const double> mass0,
                                          std::span<const double> mass1);

}  // namespace sbridge::oracle
