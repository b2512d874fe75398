#include "sbridge/routing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "sbridge/error.hpp"
#include "sbridge/logmath.hpp"
#include "sbridge/spectral.hpp"
#include "sbridge/threads.hpp"

namespace sbridge {

namespace {

constexpr double kLengthTieSlack = 1e-12;

void validate_request(const RoutingRequest& r) {
  const std::size_t n = r.graph.size();
  if (r.source >= n || r.sink >= n) fail(ErrorCode::IndexOutOfRange, "source or sink outside the graph");
  if (r.horizon < 1) fail(ErrorCode::InvalidArgument, "horizon must be >= 1");
  if (!reachable_in_exactly(r.graph, r.source, r.sink, r.horizon))
    fail(ErrorCode::NoFeasiblePath, "node " + r.graph.nodes().label(r.sink) + " is not reachable from node " +
                                        r.graph.nodes().label(r.source) + " in exactly " + std::to_string(r.horizon) +
                                        " steps");
}

double total_variation(const std::map<Path, double>& a, const std::map<Path, double>& b) {
  CompensatedSum s;
  for (const auto& [p, m] : a) {
    auto it = b.find(p);
    s.add(std::abs(m - (it == b.end() ? 0.0 : it->second)));
  }
  for (const auto& [p, m] : b)
    if (!a.count(p)) s.add(m);
  return 0.5 * s.value();
}

double max_table_difference(const std::vector<PathMass>& a, const std::vector<PathMass>& b) {
  std::map<Path, double> ma;
  for (const auto& e : a) ma[e.path] = e.mass;
  double diff = 0.0;
  for (const auto& e : b) {
    auto it = ma.find(e.path);
    diff = std::max(diff, std::abs(e.mass - (it == ma.end() ? 0.0 : it->second)));
    if (it != ma.end()) ma.erase(it);
  }
  for (const auto& [p, m] : ma) diff = std::max(diff, m);
  return diff;
}

}  // namespace

bool reachable_in_exactly(const WeightedDigraph& graph, std::size_t source, std::size_t sink, std::size_t steps) {
  const std::size_t n = graph.size();
  if (source >= n || sink >= n) fail(ErrorCode::IndexOutOfRange, "node outside the graph");
  std::vector<char> frontier(n, 0);
  frontier[source] = 1;
  for (std::size_t s = 0; s < steps; ++s) {
    std::vector<char> next(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      if (frontier[i])
        for (std::size_t j = 0; j < n; ++j)
          if (graph.has_edge(i, j)) next[j] = 1;
    frontier = std::move(next);
  }
  return frontier[sink] != 0;
}

ShortestPaths shortest_paths(const WeightedDigraph& graph, std::size_t source, std::size_t sink, std::size_t horizon,
                             std::size_t budget) {
  if (!reachable_in_exactly(graph, source, sink, horizon))
    fail(ErrorCode::NoFeasiblePath, "no feasible path of the requested length");
  const std::size_t n = graph.size();
  // Enumerate on the length kernel exp(-l) so the shared walker applies; path
  // length is recovered exactly from the graph.
  Matrix ll(n, n, kNegInf);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (graph.has_edge(i, j)) ll(i, j) = 0.0;
  Vector initial(n, 1.0);
  PathMeasure walker = PathMeasure::time_homogeneous(initial, Kernel::from_log(ll), horizon);

  std::vector<std::pair<Path, double>> all;
  double best = kInf;
  for_each_path(walker, source, sink, budget, [&](const Path& p, double) {
    double len = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) len += graph.length(p[t], p[t + 1]);
    all.emplace_back(p, len);
    best = std::min(best, len);
  });
  ShortestPaths out{best, {}};
  const double slack = kLengthTieSlack * std::max(1.0, std::abs(best));
  for (auto& [p, len] : all)
    if (len - best <= slack) out.paths.push_back(std::move(p));
  std::sort(out.paths.begin(), out.paths.end());
  return out;
}

PathMeasure routing_prior(const RoutingRequest& request, double temperature) {
  const Kernel k = request.prior == PriorKind::RuelleBowen ? request.graph.adjacency()
                                                            : boltzmann_kernel(request.graph, temperature);
  return PathMeasure::time_homogeneous(Vector(request.graph.size(), 1.0), k, request.horizon);
}

RoutingReport plan_route(const RoutingRequest& request) { return plan_route(request, request.temperature); }

RoutingReport plan_route(const RoutingRequest& request, double temperature) {
  validate_request(request);
  if (request.prior == PriorKind::Boltzmann && !(temperature > 0.0))
    fail(ErrorCode::NonPositiveTemperature, "temperature must be positive");
  const std::size_t n = request.graph.size();
  const Distribution nu0 = dirac(n, request.source);
  const Distribution nuN = dirac(n, request.sink);

  // Explicit chain prior, available when the kernel is primitive.
  const Kernel kernel = request.prior == PriorKind::RuelleBowen ? request.graph.adjacency()
                                                                 : boltzmann_kernel(request.graph, temperature);
  std::optional<PathMeasure> chain_prior;
  if (check_primitive(kernel).primitive) {
    try {
      SpectralChain sc = maximal_entropy_chain(kernel);
      chain_prior = PathMeasure::time_homogeneous(sc.chain.stationary.weights(),
                                                  Kernel::from_linear(sc.chain.transition), request.horizon);
    } catch (const ConvergenceError&) {
      // At very low T the spectral gap of B(T) closes and power iteration
      // stalls. The collapsed route does not need the chain.
      if (request.route == PriorRoute::Explicit) throw;
    }
  } else if (request.route == PriorRoute::Explicit) {
    perron(kernel);  // raises NotPrimitive with its certificate
  }

  const PathMeasure collapsed = routing_prior(request, temperature);
  const BridgeProblem main_problem(request.route == PriorRoute::Explicit ? *chain_prior : collapsed, nu0, nuN);
  BridgeSolution sol = solve_bridge(main_problem, request.bridge);

  RoutingReport report;
  report.prior = request.prior;
  report.temperature = request.prior == PriorKind::Boltzmann ? temperature : 0.0;
  report.source = request.source;
  report.sink = request.sink;
  report.horizon = request.horizon;
  report.flow = sol.marginal_flow;
  report.transitions = sol.transitions;
  report.paths = path_mass_table(main_problem, sol);
  report.most_probable = maximal_mass_paths(sol, request.source, request.sink);

  RoutingDiagnostics& d = report.diagnostics;
  d.iterations = sol.diagnostics.iterations;
  d.kappa = sol.diagnostics.kappa;
  d.final_step = sol.diagnostics.final_step;
  d.terminal_residual = sol.diagnostics.terminal_residual;
  Vector masses;
  for (const auto& e : report.paths) masses.push_back(e.mass);
  d.path_entropy = entropy(masses);

  if (chain_prior) {
    const bool explicit_main = request.route == PriorRoute::Explicit;
    const BridgeProblem other(explicit_main ? collapsed : *chain_prior, nu0, nuN);
    const BridgeSolution other_sol = solve_bridge(other, request.bridge);
    d.route_cross_check = max_table_difference(report.paths, path_mass_table(other, other_sol));
  }

  const ShortestPaths sp = shortest_paths(request.graph, request.source, request.sink, request.horizon);
  d.min_length = sp.min_length;
  std::map<Path, double> actual, shortest, uniform;
  for (const auto& e : report.paths) actual[e.path] = e.mass;
  for (const auto& p : sp.paths) shortest[p] = 1.0 / static_cast<double>(sp.paths.size());
  std::vector<Path> feasible;
  for_each_path(collapsed, request.source, request.sink, kDefaultPathBudget,
                [&](const Path& p, double) { feasible.push_back(p); });
  for (const auto& p : feasible) uniform[p] = 1.0 / static_cast<double>(feasible.size());
  d.tv_to_shortest = total_variation(actual, shortest);
  d.tv_to_uniform = total_variation(actual, uniform);
  return report;
}

std::vector<RoutingReport> temperature_sweep(const RoutingRequest& request) {
  const std::vector<double>& temps = request.temperatures.empty() ? kDefaultSweep : request.temperatures;
  for (double t : temps)
    if (!(t > 0.0)) fail(ErrorCode::NonPositiveTemperature, "sweep temperatures must be positive");
  RoutingRequest boltzmann = request;
  boltzmann.prior = PriorKind::Boltzmann;

  std::vector<RoutingReport> out(temps.size());
  parallel_for(temps.size(), [&](std::size_t k) { out[k] = plan_route(boltzmann, temps[k]); });
  return out;
}

}  // namespace sbridge
