#include "sbridge/sbridge.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <new>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "sbridge/dynamic_bridge.hpp"
#include "sbridge/error.hpp"
#include "sbridge/grid1d.hpp"
#include "sbridge/io.hpp"
#include "sbridge/logmath.hpp"
#include "sbridge/oracle.hpp"
#include "sbridge/routing.hpp"
#include "sbridge/scaling.hpp"
#include "sbridge/spectral.hpp"

using nlohmann::ordered_json;
using namespace sbridge;

struct sb_graph {
  WeightedDigraph graph;
};

struct sb_report {
  std::string json;
  std::map<std::string, std::string> csv;
  std::string primary;
  std::map<std::string, Matrix> matrices;
};

struct GaussianSpec {
  double mean, variance;
};

struct sb_density {
  std::variant<GaussianSpec, DensityTable> spec;
};

namespace {

thread_local std::string g_last_error;

constexpr double kGaussianReach = 6.0;  // standard deviations kept on the grid
constexpr std::size_t kDefaultGridPoints = 200;
constexpr double kDefaultInterpEpsilon = 0.01;

sb_status to_status(ErrorCode code) {
  return static_cast<sb_status>(static_cast<int>(code) + 1);
}

sb_status guard(const std::function<void()>& body) {
  try {
    body();
    g_last_error.clear();
    return SB_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return SB_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorCode::InvalidArgument, what);
}

Vector copy_vector(const double* data, std::size_t count, const char* name) {
  require(data != nullptr || count == 0, "null vector");
  if (count == 0) fail(ErrorCode::InvalidArgument, std::string(name) + " is empty");
  return Vector(data, data + count);
}

Matrix copy_matrix(const double* data, std::size_t rows, std::size_t cols) {
  require(data != nullptr, "null matrix");
  if (rows == 0 || cols == 0) fail(ErrorCode::InvalidArgument, "matrix is empty");
  if (rows != cols)
    fail(ErrorCode::DimensionMismatch, "kernel must be square, got " + std::to_string(rows) + "x" + std::to_string(cols));
  Matrix m(rows, cols);
  std::copy(data, data + rows * cols, m.data().begin());
  return m;
}

std::size_t node_index(const WeightedDigraph& g, std::size_t one_based, const char* what) {
  if (one_based == 0 || one_based > g.size())
    fail(ErrorCode::IndexOutOfRange, std::string(what) + " " + std::to_string(one_based) + " outside 1.." +
                                         std::to_string(g.size()));
  return one_based - 1;
}

// ---------------------------------------------------------- formatting

ordered_json num(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? ordered_json("nan") : ordered_json(x > 0 ? "inf" : "-inf");
  return report_round(x);
}

ordered_json vec(const Vector& v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

ordered_json mat(const Matrix& m) {
  ordered_json a = ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(num(m(i, j)));
    a.push_back(std::move(row));
  }
  return a;
}

ordered_json labels_json(const NodeSet& nodes) {
  ordered_json a = ordered_json::array();
  for (std::size_t i = 0; i < nodes.size(); ++i) a.push_back(nodes.label(i));
  return a;
}

std::string csv_header(const std::string& lead, const NodeSet& nodes) {
  std::string h = lead;
  for (std::size_t i = 0; i < nodes.size(); ++i) h += "," + nodes.label(i);
  return h + "\n";
}

std::string csv_rows(const Matrix& m, const std::string& prefix) {
  std::string out;
  for (std::size_t t = 0; t < m.rows(); ++t) {
    out += prefix + std::to_string(t);
    for (std::size_t j = 0; j < m.cols(); ++j) out += "," + format_number(m(t, j));
    out += "\n";
  }
  return out;
}

std::string paths_csv(const std::vector<PathMass>& paths, const NodeSet& nodes, const std::string& lead_value) {
  std::string out;
  for (std::size_t k = 0; k < paths.size(); ++k)
    out += lead_value + std::to_string(k + 1) + "," + format_path(paths[k].path, nodes) + "," +
           format_number(paths[k].mass) + "\n";
  return out;
}

ordered_json paths_json(const std::vector<PathMass>& paths, const NodeSet& nodes) {
  ordered_json a = ordered_json::array();
  for (const auto& p : paths) a.push_back({{"path", format_path(p.path, nodes)}, {"mass", num(p.mass)}});
  return a;
}

ordered_json solver_json(double tol, long max_iter) { return {{"tol", tol}, {"max_iter", max_iter}}; }

std::string dump(const ordered_json& doc) { return doc.dump(2) + "\n"; }

sb_report* finish(sb_report r) { return new sb_report(std::move(r)); }

BridgeOptions bridge_options(const sb_solver_options& s) { return {s.tol, s.max_iter}; }

ScalingOptions scaling_options(const sb_solver_options& s) {
  ScalingOptions o;
  o.tol = s.tol;
  o.max_iter = s.max_iter;
  return o;
}

// ---------------------------------------------------------- route

ordered_json route_json(const RoutingReport& r, const WeightedDigraph& g, bool include_paths) {
  ordered_json j;
  j["problem"] = {{"nodes", g.size()},
                  {"edges", g.edge_count()},
                  {"source", g.nodes().label(r.source)},
                  {"sink", g.nodes().label(r.sink)},
                  {"horizon", r.horizon},
                  {"prior", r.prior == PriorKind::RuelleBowen ? "rb" : "boltzmann"}};
  if (r.prior == PriorKind::Boltzmann) j["problem"]["temperature"] = num(r.temperature);
  const RoutingDiagnostics& d = r.diagnostics;
  j["diagnostics"] = {{"iterations", d.iterations},
                      {"kappa", num(d.kappa)},
                      {"final_step", num(d.final_step)},
                      {"terminal_residual", num(d.terminal_residual)},
                      {"path_entropy", num(d.path_entropy)},
                      {"feasible_paths", r.paths.size()},
                      {"min_length", num(d.min_length)},
                      {"tv_to_shortest", num(d.tv_to_shortest)},
                      {"tv_to_uniform", num(d.tv_to_uniform)}};
  if (d.route_cross_check) j["diagnostics"]["route_cross_check"] = num(*d.route_cross_check);
  j["labels"] = labels_json(g.nodes());
  j["flow"] = mat(r.flow);
  ordered_json tr = ordered_json::array();
  for (const auto& m : r.transitions) tr.push_back(mat(m));
  j["transitions"] = std::move(tr);
  ordered_json mp = ordered_json::array();
  for (const auto& p : r.most_probable) mp.push_back(format_path(p, g.nodes()));
  j["most_probable"] = std::move(mp);
  if (include_paths) j["paths"] = paths_json(r.paths, g.nodes());
  return j;
}

}  // namespace

extern "C" {

const char* sb_version(void) { return "1.0.0"; }

const char* sb_status_name(sb_status status) {
  if (status == SB_OK) return "ok";
  if (status == SB_ERR_INTERNAL) return "internal";
  if (status > SB_OK && status < SB_ERR_INTERNAL) return to_string(static_cast<ErrorCode>(status - 1));
  return "unknown";
}

int sb_status_exit_code(sb_status status) {
  if (status == SB_OK) return 0;
  if (status > SB_OK && status < SB_ERR_INTERNAL && is_input_error(static_cast<ErrorCode>(status - 1))) return 2;
  return 3;
}

const char* sb_last_error(void) { return g_last_error.c_str(); }

// ---------------------------------------------------------- graphs

sb_status sb_graph_create(size_t node_count, sb_graph** out) {
  return guard([&] {
    require(out != nullptr, "null output pointer");
    *out = new sb_graph{WeightedDigraph(NodeSet(node_count))};
  });
}

sb_status sb_graph_parse(const char* text, sb_graph** out) {
  return guard([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = new sb_graph{parse_graph(text)};
  });
}

sb_status sb_graph_load(const char* path, sb_graph** out) {
  return guard([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new sb_graph{parse_graph(read_text_file(path))};
  });
}

sb_status sb_graph_add_edge(sb_graph* graph, size_t src, size_t dst, double length) {
  return guard([&] {
    require(graph != nullptr, "null graph");
    auto& g = graph->graph;
    g.add_edge(node_index(g, src, "source node"), node_index(g, dst, "target node"), length);
  });
}

sb_status sb_graph_set_length(sb_graph* graph, size_t src, size_t dst, double length) {
  return guard([&] {
    require(graph != nullptr, "null graph");
    auto& g = graph->graph;
    const std::size_t s = node_index(g, src, "source node"), d = node_index(g, dst, "target node");
    if (!g.has_edge(s, d)) fail(ErrorCode::InvalidArgument, "no edge " + g.nodes().label(s) + " -> " + g.nodes().label(d));
    g.set_length(s, d, length);
  });
}

size_t sb_graph_node_count(const sb_graph* graph) { return graph ? graph->graph.size() : 0; }
size_t sb_graph_edge_count(const sb_graph* graph) { return graph ? graph->graph.edge_count() : 0; }

sb_status sb_graph_node_index(const sb_graph* graph, const char* label, size_t* index) {
  return guard([&] {
    require(graph != nullptr && label != nullptr && index != nullptr, "null argument");
    const NodeSet& nodes = graph->graph.nodes();
    if (auto hit = nodes.find(label)) {
      *index = *hit + 1;
      return;
    }
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes.label(i) == label) {
        *index = i + 1;
        return;
      }
    fail(ErrorCode::IndexOutOfRange, std::string("unknown node '") + label + "'");
  });
}

void sb_graph_destroy(sb_graph* graph) { delete graph; }

// ---------------------------------------------------------- reports

const char* sb_report_json(const sb_report* report) { return report ? report->json.c_str() : nullptr; }

const char* sb_report_csv(const sb_report* report, const char* name) {
  if (!report || !name) return nullptr;
  auto it = report->csv.find(name);
  return it == report->csv.end() ? nullptr : it->second.c_str();
}

const char* sb_report_primary_csv(const sb_report* report) {
  return report ? sb_report_csv(report, report->primary.c_str()) : nullptr;
}

sb_status sb_report_matrix(const sb_report* report, const char* name, size_t* rows, size_t* cols,
                           const double** data) {
  return guard([&] {
    require(report && name && rows && cols && data, "null argument");
    auto it = report->matrices.find(name);
    if (it == report->matrices.end()) fail(ErrorCode::InvalidArgument, std::string("report has no matrix '") + name + "'");
    *rows = it->second.rows();
    *cols = it->second.cols();
    *data = it->second.data().data();
  });
}

void sb_report_destroy(sb_report* report) { delete report; }

// ---------------------------------------------------------- scaling

void sb_solver_options_init(sb_solver_options* options) {
  if (!options) return;
  options->tol = 1e-12;
  options->max_iter = 100000;
}

sb_status sb_scale(const double* kernel, size_t rows, size_t cols, const double* p, size_t p_count, const double* q,
                   size_t q_count, const sb_solver_options* options, sb_report** out) {
  return guard([&] {
    require(out != nullptr, "null output pointer");
    sb_solver_options so;
    sb_solver_options_init(&so);
    if (options) so = *options;
    const Kernel g = Kernel::from_linear(copy_matrix(kernel, rows, cols));
    if (p_count != rows || q_count != rows)
      fail(ErrorCode::DimensionMismatch, "kernel is " + std::to_string(rows) + "x" + std::to_string(cols) +
                                             " but marginals have " + std::to_string(p_count) + " and " +
                                             std::to_string(q_count) + " entries");
    const ScalingProblem problem(g, Distribution::validate(copy_vector(p, p_count, "p")),
                                 Distribution::validate(copy_vector(q, q_count, "q")));
    const ScalingSolution sol = solve_schrodinger_system(problem, scaling_options(so));
    const Coupling pi = induced_coupling(problem, sol);

    ordered_json j;
    j["command"] = "scale";
    j["problem"] = {{"n", problem.size()}, {"p", vec(problem.p().weights())}, {"q", vec(problem.q().weights())}};
    j["solver"] = solver_json(so.tol, so.max_iter);
    j["solver"]["iterations"] = sol.iterations;
    j["solver"]["final_step"] = num(sol.final_step);
    j["solver"]["kappa"] = num(sol.kappa);
    j["solver"]["residual"] = num(sol.residual);
    j["solver"]["domain"] = sol.linear_domain ? "linear" : "log";
    j["potentials"] = {{"phi0", vec(sol.phi0())},
                       {"phi_hat0", vec(sol.phi_hat0())},
                       {"phi1", vec(sol.phi1())},
                       {"phi_hat1", vec(sol.phi_hat1())}};
    j["coupling"] = mat(pi.joint());
    j["row_sums"] = vec(pi.joint().row_sums());
    j["col_sums"] = vec(pi.joint().col_sums());

    sb_report r;
    r.json = dump(j);
    std::string csv;
    for (std::size_t i = 0; i < pi.joint().rows(); ++i) {
      for (std::size_t k = 0; k < pi.joint().cols(); ++k) csv += (k ? "," : "") + format_number(pi(i, k));
      csv += "\n";
    }
    r.csv["coupling"] = std::move(csv);
    r.primary = "coupling";
    r.matrices.emplace("coupling", pi.joint());
    *out = finish(std::move(r));
  });
}

// ---------------------------------------------------------- routing

void sb_route_options_init(sb_route_options* options) {
  if (!options) return;
  options->source = 1;
  options->sink = 1;
  options->horizon = 1;
  options->prior = SB_PRIOR_RUELLE_BOWEN;
  options->temperature = 1.0;
  options->sweep = nullptr;
  options->sweep_count = 0;
  options->include_paths = 0;
  sb_solver_options_init(&options->solver);
}

sb_status sb_route(const sb_graph* graph, const sb_route_options* options, sb_report** out) {
  return guard([&] {
    require(graph != nullptr && options != nullptr && out != nullptr, "null argument");
    const WeightedDigraph& g = graph->graph;
    RoutingRequest req{g};
    req.source = node_index(g, options->source, "source");
    req.sink = node_index(g, options->sink, "sink");
    req.horizon = options->horizon;
    req.prior = options->prior == SB_PRIOR_BOLTZMANN ? PriorKind::Boltzmann : PriorKind::RuelleBowen;
    req.temperature = options->temperature;
    req.bridge = bridge_options(options->solver);
    const bool paths = options->include_paths != 0;

    sb_report r;
    ordered_json j;
    j["command"] = "route";
    j["solver"] = solver_json(options->solver.tol, options->solver.max_iter);
    if (options->sweep != nullptr) {
      req.temperatures = copy_vector(options->sweep, options->sweep_count, "temperature sweep");
      const auto reports = temperature_sweep(req);
      ordered_json runs = ordered_json::array();
      std::string flow = csv_header("T,t", g.nodes()), table = "T,rank,path,mass\n";
      for (const auto& rep : reports) {
        runs.push_back(route_json(rep, g, paths));
        const std::string t = format_number(rep.temperature) + ",";
        flow += csv_rows(rep.flow, t);
        table += paths_csv(rep.paths, g.nodes(), t);
      }
      j["sweep"] = std::move(runs);
      r.csv["flow"] = std::move(flow);
      r.csv["paths"] = std::move(table);
    } else {
      const RoutingReport rep = plan_route(req);
      const ordered_json body = route_json(rep, g, paths);
      for (const auto& [k, v] : body.items()) j[k] = v;
      r.csv["flow"] = csv_header("t", g.nodes()) + csv_rows(rep.flow, "");
      r.csv["paths"] = "rank,path,mass\n" + paths_csv(rep.paths, g.nodes(), "");
      r.matrices.emplace("flow", rep.flow);
    }
    r.primary = "flow";
    r.json = dump(j);
    *out = finish(std::move(r));
  });
}

// ---------------------------------------------------------- bridges

void sb_bridge_options_init(sb_bridge_options* options) {
  if (!options) return;
  options->horizon = 1;
  options->prior = SB_PRIOR_RUELLE_BOWEN;
  options->temperature = 1.0;
  options->include_paths = 0;
  sb_solver_options_init(&options->solver);
}

namespace {

sb_report* run_bridge(const Kernel& step, const NodeSet& nodes, const Vector& nu0, const Vector& nuN,
                      const sb_bridge_options& options, ordered_json problem) {
  if (options.horizon < 1) fail(ErrorCode::InvalidArgument, "horizon must be >= 1");
  const std::size_t n = step.size();
  const BridgeProblem bp(PathMeasure::time_homogeneous(Vector(n, 1.0), step, options.horizon),
                         Distribution::validate(nu0, n), Distribution::validate(nuN, n));
  const BridgeSolution sol = solve_bridge(bp, bridge_options(options.solver));
  const BridgeDiagnostics& d = sol.diagnostics;

  ordered_json j;
  j["command"] = "bridge";
  problem["horizon"] = options.horizon;
  problem["nu0"] = vec(bp.nu0().weights());
  problem["nuN"] = vec(bp.nuN().weights());
  j["problem"] = std::move(problem);
  j["solver"] = solver_json(options.solver.tol, options.solver.max_iter);
  j["diagnostics"] = {{"iterations", d.iterations},
                      {"kappa", num(d.kappa)},
                      {"final_step", num(d.final_step)},
                      {"terminal_residual", num(d.terminal_residual)},
                      {"flow_residual", num(d.flow_residual)}};
  ordered_json ph = ordered_json::array();
  for (const auto& [t, i] : d.placeholder_rows) ph.push_back({{"t", t}, {"node", nodes.label(i)}});
  j["diagnostics"]["placeholder_rows"] = std::move(ph);
  j["labels"] = labels_json(nodes);
  ordered_json phi = ordered_json::array(), hat = ordered_json::array();
  for (std::size_t t = 0; t <= sol.potentials.horizon(); ++t) {
    phi.push_back(vec(sol.potentials.phi(t)));
    hat.push_back(vec(sol.potentials.phi_hat(t)));
  }
  j["potentials"] = {{"phi", std::move(phi)}, {"phi_hat", std::move(hat)}};
  j["flow"] = mat(sol.marginal_flow);
  ordered_json tr = ordered_json::array();
  for (const auto& m : sol.transitions) tr.push_back(mat(m));
  j["transitions"] = std::move(tr);

  sb_report r;
  r.csv["flow"] = csv_header("t", nodes) + csv_rows(sol.marginal_flow, "");
  if (options.include_paths) {
    const auto table = path_mass_table(bp, sol);
    j["paths"] = paths_json(table, nodes);
    r.csv["paths"] = "rank,path,mass\n" + paths_csv(table, nodes, "");
  }
  r.primary = "flow";
  r.matrices.emplace("flow", sol.marginal_flow);
  r.json = dump(j);
  return finish(std::move(r));
}

}  // namespace

sb_status sb_bridge(const sb_graph* graph, const double* nu0, size_t nu0_count, const double* nuN, size_t nuN_count,
                    const sb_bridge_options* options, sb_report** out) {
  return guard([&] {
    require(graph != nullptr && out != nullptr, "null argument");
    sb_bridge_options o;
    sb_bridge_options_init(&o);
    if (options) o = *options;
    const WeightedDigraph& g = graph->graph;
    const bool boltzmann = o.prior == SB_PRIOR_BOLTZMANN;
    const Kernel step = boltzmann ? boltzmann_kernel(g, o.temperature) : g.adjacency();
    ordered_json problem = {{"nodes", g.size()}, {"edges", g.edge_count()}, {"prior", boltzmann ? "boltzmann" : "rb"}};
    if (boltzmann) problem["temperature"] = num(o.temperature);
    *out = run_bridge(step, g.nodes(), copy_vector(nu0, nu0_count, "nu0"), copy_vector(nuN, nuN_count, "nuN"), o,
                      std::move(problem));
  });
}

sb_status sb_bridge_kernel(const double* kernel, size_t rows, size_t cols, const double* nu0, size_t nu0_count,
                           const double* nuN, size_t nuN_count, const sb_bridge_options* options, sb_report** out) {
  return guard([&] {
    require(out != nullptr, "null output pointer");
    sb_bridge_options o;
    sb_bridge_options_init(&o);
    if (options) o = *options;
    const Kernel step = Kernel::from_linear(copy_matrix(kernel, rows, cols));
    *out = run_bridge(step, NodeSet(rows), copy_vector(nu0, nu0_count, "nu0"), copy_vector(nuN, nuN_count, "nuN"), o,
                      {{"nodes", rows}, {"prior", "kernel"}});
  });
}

// ---------------------------------------------------------- densities

sb_status sb_density_gaussian(double mean, double variance, sb_density** out) {
  return guard([&] {
    require(out != nullptr, "null output pointer");
    if (!std::isfinite(mean) || !(variance > 0.0) || !std::isfinite(variance))
      fail(ErrorCode::InvalidArgument, "gaussian needs a finite mean and positive variance");
    *out = new sb_density{GaussianSpec{mean, variance}};
  });
}

sb_status sb_density_table(const double* x, const double* value, size_t count, sb_density** out) {
  return guard([&] {
    require(x != nullptr && value != nullptr && out != nullptr, "null argument");
    std::string text;
    for (std::size_t k = 0; k < count; ++k) text += format_number(x[k]) + " " + format_number(value[k]) + "\n";
    DensityTable t;
    t.x.assign(x, x + count);
    t.value.assign(value, value + count);
    parse_density_table(text);  // same validation as files
    *out = new sb_density{std::move(t)};
  });
}

sb_status sb_density_parse(const char* text, sb_density** out) {
  return guard([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = new sb_density{parse_density_table(text)};
  });
}

void sb_density_destroy(sb_density* density) { delete density; }

// ---------------------------------------------------------- interpolation

void sb_interp_options_init(sb_interp_options* options) {
  if (!options) return;
  options->a = 0.0;
  options->b = 0.0;
  options->m = 0;
  options->epsilon = kDefaultInterpEpsilon;
  options->eps_sweep = nullptr;
  options->eps_count = 0;
  options->times = nullptr;
  options->time_count = 0;
  sb_solver_options_init(&options->solver);
}

namespace {

std::pair<double, double> density_range(const sb_density& d) {
  if (const auto* g = std::get_if<GaussianSpec>(&d.spec)) {
    const double r = kGaussianReach * std::sqrt(g->variance);
    return {g->mean - r, g->mean + r};
  }
  const auto& t = std::get<DensityTable>(d.spec);
  return {t.x.front(), t.x.back()};
}

GridDensity on_grid(const Grid& grid, const sb_density& d) {
  if (const auto* g = std::get_if<GaussianSpec>(&d.spec)) return GridDensity::gaussian(grid, g->mean, g->variance);
  return density_on_grid(grid, std::get<DensityTable>(d.spec));
}

}  // namespace

sb_status sb_interp(const sb_density* rho0, const sb_density* rho1, const sb_interp_options* options,
                    sb_report** out) {
  return guard([&] {
    require(rho0 != nullptr && rho1 != nullptr && out != nullptr, "null argument");
    sb_interp_options o;
    sb_interp_options_init(&o);
    if (options) o = *options;
    if (!(o.epsilon > 0.0)) fail(ErrorCode::InvalidArgument, "epsilon must be positive");

    std::vector<double> sweep;
    if (o.eps_sweep) sweep = copy_vector(o.eps_sweep, o.eps_count, "epsilon sweep");
    const Grid grid = [&] {
      if (o.m > 0) return Grid(o.a, o.b, o.m);
      const auto [lo0, hi0] = density_range(*rho0);
      const auto [lo1, hi1] = density_range(*rho1);
      double widest = o.epsilon;
      for (double e : sweep) widest = std::max(widest, e);
      return width_rule_grid(std::min(lo0, lo1), std::max(hi0, hi1), widest, kDefaultGridPoints);
    }();
    const GridDensity d0 = on_grid(grid, *rho0), d1 = on_grid(grid, *rho1);
    const std::vector<double> times =
        o.times ? copy_vector(o.times, o.time_count, "times") : equispaced_times(kDefaultInterpolationTimes);
    const ScalingOptions so = scaling_options(o.solver);
    const Interpolation interp = entropic_interpolation(grid, d0, d1, o.epsilon, times, so);

    ordered_json j;
    j["command"] = "interp";
    j["problem"] = {{"grid", {{"a", num(grid.a())}, {"b", num(grid.b())}, {"m", grid.size()}, {"h", num(grid.weight())}}},
                    {"epsilon", num(o.epsilon)},
                    {"times", vec(times)}};
    j["solver"] = solver_json(o.solver.tol, o.solver.max_iter);
    j["solver"]["iterations"] = interp.scaling.iterations;
    j["solver"]["final_step"] = num(interp.scaling.final_step);
    j["solver"]["kappa"] = num(interp.scaling.kappa);
    j["solver"]["residual"] = num(interp.scaling.residual);
    j["solver"]["domain"] = interp.scaling.linear_domain ? "linear" : "log";

    Matrix dens(times.size(), grid.size());
    ordered_json summary = ordered_json::array();
    std::string csv = "t,x,rho\n";
    for (std::size_t k = 0; k < times.size(); ++k) {
      const GridDensity& rho = interp.densities[k];
      summary.push_back({{"t", num(times[k])}, {"mean", num(rho.mean(grid))}, {"integral", num(rho.integral())}});
      for (std::size_t i = 0; i < grid.size(); ++i) {
        dens(k, i) = rho[i];
        csv += format_number(times[k]) + "," + format_number(grid[i]) + "," + format_number(rho[i]) + "\n";
      }
    }
    j["x"] = vec(grid.points());
    j["densities"] = std::move(summary);
    j["density"] = mat(dens);

    sb_report r;
    r.csv["density"] = std::move(csv);
    r.primary = "density";
    if (!sweep.empty()) {
      const auto curve = entropic_cost_curve(grid, d0, d1, sweep, so);
      const auto exact = oracle::quantile_coupling_oracle(grid.points(), d0.masses().weights(), d1.masses().weights());
      ordered_json jc = ordered_json::array();
      std::string cc = "epsilon,transport_cost,iterations\n";
      for (const auto& c : curve) {
        jc.push_back({{"epsilon", num(c.epsilon)},
                      {"transport_cost", num(c.transport_cost)},
                      {"iterations", c.iterations},
                      {"residual", num(c.residual)}});
        cc += format_number(c.epsilon) + "," + format_number(c.transport_cost) + "," + std::to_string(c.iterations) + "\n";
      }
      j["cost_curve"] = std::move(jc);
      j["monotone_cost"] = num(exact.cost);
      r.csv["cost_curve"] = std::move(cc);
      r.primary = "cost_curve";
    }
    r.matrices.emplace("density", std::move(dens));
    r.json = dump(j);
    *out = finish(std::move(r));
  });
}

// ---------------------------------------------------------- spectral

sb_status sb_spectral(const sb_graph* graph, double temperature, sb_report** out) {
  return guard([&] {
    require(graph != nullptr && out != nullptr, "null argument");
    const WeightedDigraph& g = graph->graph;
    const SpectralChain rb = ruelle_bowen_chain(g.adjacency());

    ordered_json j;
    j["command"] = "spectral";
    j["problem"] = {{"nodes", g.size()}, {"edges", g.edge_count()}};
    j["labels"] = labels_json(g.nodes());
    j["adjacency"] = {{"lambda", num(rb.perron.lambda)},
                      {"entropy_rate", num(std::log(rb.perron.lambda))},
                      {"chain_entropy_rate", num(entropy_rate(rb.chain))},
                      {"primitivity_exponent", rb.perron.primitivity_exponent},
                      {"iterations", rb.perron.iterations},
                      {"right", vec(rb.perron.right)},
                      {"left", vec(rb.perron.left)},
                      {"stationary", vec(rb.chain.stationary.weights())},
                      {"transition", mat(rb.chain.transition)}};
    sb_report r;
    r.matrices.emplace("transition", rb.chain.transition);
    if (temperature > 0.0) {
      const SpectralChain wb = weighted_pressure_chain(g, temperature);
      const double s = entropy_rate(wb.chain), u = energy_rate(wb.chain, g, temperature);
      j["problem"]["temperature"] = num(temperature);
      j["weighted"] = {{"lambda", num(wb.perron.lambda)},
                       {"log_lambda", num(std::log(wb.perron.lambda))},
                       {"entropy_rate", num(s)},
                       {"energy_rate", num(u)},
                       {"free_energy_rate", num(u - s)},
                       {"right", vec(wb.perron.right)},
                       {"left", vec(wb.perron.left)},
                       {"stationary", vec(wb.chain.stationary.weights())},
                       {"transition", mat(wb.chain.transition)}};
      r.matrices.emplace("weighted_transition", wb.chain.transition);
    }
    std::string csv = csv_header("node", g.nodes());
    for (std::size_t i = 0; i < g.size(); ++i) {
      csv += g.nodes().label(i);
      for (std::size_t k = 0; k < g.size(); ++k) csv += "," + format_number(rb.chain.transition(i, k));
      csv += "\n";
    }
    r.csv["transition"] = std::move(csv);
    r.primary = "transition";
    r.json = dump(j);
    *out = finish(std::move(r));
  });
}

}  // extern "C"
