#pragma once

#include <span>

#include "sbridge/core.hpp"
#include "sbridge/scaling.hpp"

namespace sbridge {

// State energies E_x >= 0 at temperature T > 0 (Boltzmann constant 1).
class EnergyLandscape {
 public:
  EnergyLandscape(Vector energies, double temperature);

  const Vector& energies() const noexcept { return energies_; }
  double temperature() const noexcept { return temperature_; }
  std::size_t size() const noexcept { return energies_.size(); }

 private:
  Vector energies_;
  double temperature_;
};

// F(pi, T) = sum E_x pi_x + T sum pi_x log pi_x.
double free_energy(const Distribution& pi, const EnergyLandscape& landscape);
// log Z(T), Z = sum exp(-E_x / T).
double log_partition(const EnergyLandscape& landscape);
// pi_B(x) = exp(-E_x / T) / Z.
Distribution boltzmann_distribution(const EnergyLandscape& landscape);

class TransportInstance {
 public:
  TransportInstance(Matrix cost, Distribution p, Distribution q, double epsilon);

  const Matrix& cost() const noexcept { return cost_; }
  const Distribution& p() const noexcept { return p_; }
  const Distribution& q() const noexcept { return q_; }
  double epsilon() const noexcept { return epsilon_; }

 private:
  Matrix cost_;
  Distribution p_;
  Distribution q_;
  double epsilon_;
};

struct RegularizedTransport {
  Coupling coupling;
  double value = 0.0;           // J(pi) = sum c pi + eps sum pi log pi
  double transport_cost = 0.0;  // sum c pi
  double relative_entropy = 0.0;  // D(pi || G / sum G)
  long iterations = 0;
};

// exp(-c_ij / eps) as a log-domain kernel.
Kernel transport_kernel(const Matrix& cost, double epsilon);

// Entropic OT via the Schrodinger system on the Boltzmann kernel. eps = 0
// dispatches to the exact LP oracle.
RegularizedTransport regularized_ot(const TransportInstance& instance, const ScalingOptions& options = {});

// Exact unregularized optimum: assignment expansion for rational marginals
// (denominator <= 64), vertex enumeration for n <= 5 otherwise.
double ot_lp_value(const TransportInstance& instance);

// J(pi) for an arbitrary joint.
double regularized_objective(const Matrix& cost, const Matrix& joint, double epsilon);

}  // namespace sbridge
