#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sbridge/core.hpp"
#include "sbridge/dynamic_bridge.hpp"
#include "sbridge/paths.hpp"

namespace sbridge {

enum class PriorKind { RuelleBowen, Boltzmann };

// How the Ruelle-Bowen / pressure prior enters the bridge. Collapsed uses the
// raw kernel A (or B(T)) directly; Explicit builds the stationary chain R first
// and needs a primitive kernel.
enum class PriorRoute { Collapsed, Explicit };

inline const std::vector<double> kDefaultSweep{100.0, 10.0, 1.0, 0.3, 0.1};

struct RoutingRequest {
  WeightedDigraph graph;
  std::size_t source = 0;
  std::size_t sink = 0;
  std::size_t horizon = 1;
  PriorKind prior = PriorKind::RuelleBowen;
  double temperature = 1.0;
  std::vector<double> temperatures{};
  PriorRoute route = PriorRoute::Collapsed;
  BridgeOptions bridge{};
};

struct RoutingDiagnostics {
  long iterations = 0;
  double kappa = 0.0;
  double final_step = 0.0;
  double terminal_residual = 0.0;
  double path_entropy = 0.0;
  double min_length = 0.0;
  double tv_to_shortest = 0.0;  // vs uniform on minimum-length paths (T -> 0 limit)
  double tv_to_uniform = 0.0;   // vs uniform on all feasible paths (T -> infinity limit)
  // Max path-mass difference between the collapsed and explicit-chain routes
  // when the kernel is primitive.
  std::optional<double> route_cross_check;
};

struct RoutingReport {
  PriorKind prior = PriorKind::RuelleBowen;
  double temperature = 0.0;
  std::size_t source = 0, sink = 0, horizon = 0;
  Matrix flow;
  std::vector<Matrix> transitions;
  std::vector<PathMass> paths;
  std::vector<Path> most_probable;
  RoutingDiagnostics diagnostics;
};

bool reachable_in_exactly(const WeightedDigraph& graph, std::size_t source, std::size_t sink, std::size_t steps);

struct ShortestPaths {
  double min_length = 0.0;
  std::vector<Path> paths;
};

// Exact minimum of the summed length over N-step source -> sink paths, and
// its argmin set, by enumeration.
ShortestPaths shortest_paths(const WeightedDigraph& graph, std::size_t source, std::size_t sink, std::size_t horizon,
                             std::size_t budget = kDefaultPathBudget);

// Prior path measure (unit initial weights) with N copies of A or B(T).
PathMeasure routing_prior(const RoutingRequest& request, double temperature);

RoutingReport plan_route(const RoutingRequest& request);
RoutingReport plan_route(const RoutingRequest& request, double temperature);

// One report per temperature (request.temperatures, or the default sweep).
// Points run on up to SBRIDGE_THREADS threads (default 1).
std::vector<RoutingReport> temperature_sweep(const RoutingRequest& request);

}  // namespace sbridge
