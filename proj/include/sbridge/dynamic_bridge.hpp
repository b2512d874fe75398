#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "sbridge/core.hpp"
#include "sbridge/paths.hpp"
#include "sbridge/scaling.hpp"

namespace sbridge {

// Bridge between nu0 and nuN over a Markovian prior of horizon N.
class BridgeProblem {
 public:
  BridgeProblem(PathMeasure prior, Distribution nu0, Distribution nuN);

  const PathMeasure& prior() const noexcept { return prior_; }
  const Distribution& nu0() const noexcept { return nu0_; }
  const Distribution& nuN() const noexcept { return nuN_; }
  std::size_t horizon() const noexcept { return prior_.horizon(); }
  std::size_t size() const noexcept { return prior_.size(); }

 private:
  PathMeasure prior_;
  Distribution nu0_;
  Distribution nuN_;
};

struct BridgeOptions {
  double tol = 1e-12;
  long max_iter = 100000;
};

struct BridgeDiagnostics {
  long iterations = 0;
  double final_step = 0.0;
  double kappa = 0.0;
  double terminal_residual = 0.0;  // max |flow(N) - nuN|
  double flow_residual = 0.0;      // max |flow(t) Pi(t) - flow(t+1)|
  // (t, i) rows of Pi(t) where phi(t, i) = 0; set to uniform over the prior
  // support and carrying no flow.
  std::vector<std::pair<std::size_t, std::size_t>> placeholder_rows;
};

struct BridgeSolution {
  Potentials potentials;
  std::vector<Matrix> transitions;  // Pi(0) .. Pi(N-1)
  Matrix marginal_flow;             // (N+1) x n
  Distribution nu0;
  BridgeDiagnostics diagnostics;

  PathMeasure as_path_measure() const;
};

// log of G = M(0) M(1) ... M(N-1).
Matrix endpoint_kernel_log(const PathMeasure& prior);

BridgeSolution solve_bridge(const BridgeProblem& problem, const BridgeOptions& options = {});

// Every path with positive mass under the solution, sorted by mass.
std::vector<PathMass> path_mass_table(const BridgeProblem& problem, const BridgeSolution& solution,
                                      std::size_t budget = kDefaultPathBudget);

// Paths x0 -> xN whose mass is within relative 1e-9 of the largest.
std::vector<Path> maximal_mass_paths(const PathMeasure& measure, std::size_t x0, std::size_t xN,
                                     std::size_t budget = kDefaultPathBudget);
std::vector<Path> maximal_mass_paths(const BridgeSolution& solution, std::size_t x0, std::size_t xN,
                                     std::size_t budget = kDefaultPathBudget);

// Endpoint coupling of the two-marginal problem on prior joint mu0(x0) G(x0,xN),
// composed with the prior pinned at both ends.
class StaticReduction {
 public:
  StaticReduction(PathMeasure prior, Matrix log_endpoint_kernel, Coupling endpoint_coupling);

  const Coupling& endpoint_coupling() const noexcept { return coupling_; }
  const Matrix& log_endpoint_kernel() const noexcept { return log_g_; }

  // P*(x) = prior(x | x0, xN) p*(x0, xN).
  double path_mass(const Path& path) const;
  std::vector<PathMass> path_mass_table(std::size_t budget = kDefaultPathBudget) const;

 private:
  PathMeasure prior_;
  Matrix log_g_;
  Coupling coupling_;
};

StaticReduction static_reduction(const BridgeProblem& problem, const BridgeOptions& options = {});

// D(P || Q) over paths; +inf when P charges a Q-null path.
double relative_entropy_on_paths(const PathMeasure& p, const PathMeasure& q, std::size_t budget = kDefaultPathBudget);
double relative_entropy_on_paths(const std::vector<PathMass>& p, const PathMeasure& q);

}  // namespace sbridge
