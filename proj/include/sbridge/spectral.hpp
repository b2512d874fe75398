#pragma once

#include <cstddef>
#include <optional>

#include "sbridge/core.hpp"

namespace sbridge {

struct PrimitivityCertificate {
  bool primitive = false;
  std::size_t exponent = 0;      // first m with K^m > 0 (when primitive)
  std::size_t bound = 0;         // Wielandt bound n^2 - 2n + 2
  std::size_t zero_row = 0;      // a zero of K^bound (when not primitive)
  std::size_t zero_col = 0;
};

PrimitivityCertificate check_primitive(const Kernel& kernel);

struct PerronData {
  double lambda = 0.0;
  Vector right;  // K phi = lambda phi, geometric mean 1
  Vector left;   // K^T phihat = lambda phihat, <phihat, phi> = 1
  long iterations = 0;
  std::size_t primitivity_exponent = 0;
};

struct PerronOptions {
  double tol = 1e-14;  // Hilbert distance between successive iterates
  long max_iter = 1'000'000;
};

PerronData perron(const Kernel& kernel, const PerronOptions& options = {});

// H_G = log lambda_A.
double topological_entropy_rate(const Kernel& adjacency);

struct StationaryChain {
  Matrix transition;
  Distribution stationary;
};

struct SpectralChain {
  PerronData perron;
  StationaryChain chain;
};

// r_ij = k_ij phi_j / (lambda phi_i), stationary law phihat_i phi_i.
SpectralChain maximal_entropy_chain(const Kernel& kernel);

SpectralChain ruelle_bowen_chain(const Kernel& adjacency);
PathMeasure ruelle_bowen(const Kernel& adjacency, std::size_t horizon);

// Same construction on B(T) = [exp(-l_ij / T)].
SpectralChain weighted_pressure_chain(const WeightedDigraph& graph, double temperature);
PathMeasure weighted_pressure_measure(const WeightedDigraph& graph, double temperature, std::size_t horizon);

// -sum_i mu_i sum_j r_ij log r_ij.
double entropy_rate(const StationaryChain& chain);
// sum_i mu_i sum_j r_ij l_ij / T.
double energy_rate(const StationaryChain& chain, const WeightedDigraph& graph, double temperature);

}  // namespace sbridge
