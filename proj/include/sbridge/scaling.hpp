#pragma once

#include <span>
#include <vector>

#include "sbridge/core.hpp"

namespace sbridge {

// One-step Schrodinger system on kernel G with marginals p (time 0) and
// q (time 1). G must be strictly positive on supp(p) x supp(q); outside that
// block the potentials vanish.
class ScalingProblem {
 public:
  ScalingProblem(Kernel g, Distribution p, Distribution q);

  const Kernel& kernel() const noexcept { return g_; }
  const Distribution& p() const noexcept { return p_; }
  const Distribution& q() const noexcept { return q_; }
  std::size_t size() const noexcept { return g_.size(); }

  // log G restricted to supp(p) x supp(q).
  Matrix support_block_log() const;

 private:
  Kernel g_;
  Distribution p_;
  Distribution q_;
};

enum class ScalingDomain { Auto, Log, Linear };

struct ScalingOptions {
  double tol = 1e-12;      // Hilbert distance between successive phi(0)
  long max_iter = 100000;
  ScalingDomain domain = ScalingDomain::Auto;
  bool record_steps = false;
  // Starting log phi(0); empty means phi(0) = 1.
  Vector initial_log_phi0;
};

struct ScalingSolution {
  Vector log_phi0, log_phi_hat0, log_phi1, log_phi_hat1;
  long iterations = 0;
  double final_step = 0.0;  // d_H(phi_k(0), phi_{k+1}(0)) at exit
  double residual = 0.0;    // max_j |phi(1,j) phihat(1,j) - q_j|
  double kappa = 0.0;       // Birkhoff ratio of G on the support block
  bool linear_domain = false;
  std::vector<double> steps;  // per-cycle Hilbert steps when recorded

  Vector phi0() const;
  Vector phi_hat0() const;
  Vector phi1() const;
  Vector phi_hat1() const;
};

// C(x) = G (q / (G^T (p / x))), componentwise divisions with 0/x = 0.
Vector sinkhorn_cycle(const ScalingProblem& problem, std::span<const double> phi0);
Vector sinkhorn_cycle_log(const ScalingProblem& problem, std::span<const double> log_phi0);

ScalingSolution solve_schrodinger_system(const ScalingProblem& problem, const ScalingOptions& options = {});

// pi_ij = phihat(0,i) g_ij phi(1,j), renormalized to unit mass. Throws
// NotConverged when a marginal is off by more than 1e-9.
Coupling induced_coupling(const ScalingProblem& problem, const ScalingSolution& solution);
// Same matrix without marginal validation.
Matrix coupling_matrix(const ScalingProblem& problem, const ScalingSolution& solution);

}  // namespace sbridge
