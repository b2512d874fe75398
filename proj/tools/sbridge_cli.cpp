#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sbridge/sbridge.h"

namespace {

constexpr int kInputError = 2;

struct CliError {
  int code;
  std::string message;
};

void check(sb_status s) {
  if (s != SB_OK) throw CliError{sb_status_exit_code(s), std::string(sb_status_name(s)) + ": " + sb_last_error()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kInputError, "cannot read file '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Numbers on one line, separated by whitespace or commas; '#' starts a comment.
std::vector<double> line_numbers(std::string line, std::size_t lineno, const std::string& what) {
  line = line.substr(0, line.find('#'));
  for (char& c : line)
    if (c == ',' || c == '[' || c == ']') c = ' ';
  std::vector<double> out;
  std::istringstream in(line);
  for (std::string tok; in >> tok;) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
      throw CliError{kInputError, what + ": line " + std::to_string(lineno) + ": '" + tok + "' is not a number"};
    out.push_back(v);
  }
  return out;
}

std::vector<double> numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::istringstream lines(text);
  std::size_t lineno = 0;
  for (std::string line; std::getline(lines, line);) {
    const auto row = line_numbers(line, ++lineno, what);
    out.insert(out.end(), row.begin(), row.end());
  }
  if (out.empty()) throw CliError{kInputError, what + " is empty"};
  return out;
}

std::vector<std::vector<double>> matrix_rows(const std::string& text, const std::string& what) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::size_t lineno = 0;
  for (std::string line; std::getline(lines, line);) {
    auto row = line_numbers(line, ++lineno, what);
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw CliError{kInputError, what + ": line " + std::to_string(lineno) + ": expected " +
                                      std::to_string(rows.front().size()) + " entries, got " +
                                      std::to_string(row.size())};
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CliError{kInputError, what + " is empty"};
  return rows;
}

struct Report {
  sb_report* handle = nullptr;
  ~Report() { sb_report_destroy(handle); }
};

struct Graph {
  sb_graph* handle = nullptr;
  ~Graph() { sb_graph_destroy(handle); }
};

struct Density {
  sb_density* handle = nullptr;
  ~Density() { sb_density_destroy(handle); }
};

void emit(const Report& r, const std::string& csv_path) {
  std::cout << sb_report_json(r.handle);
  if (csv_path.empty()) return;
  const char* csv = sb_report_primary_csv(r.handle);
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw CliError{kInputError, "cannot write '" + csv_path + "'"};
  out << (csv ? csv : "");
}

size_t resolve_node(const Graph& g, const std::string& label) {
  size_t index = 0;
  check(sb_graph_node_index(g.handle, label.c_str(), &index));
  return index;
}

// "gaussian:mean,variance" or a two-column file.
void load_density(const std::string& spec, Density& d) {
  const std::string prefix = "gaussian:";
  if (spec.rfind(prefix, 0) == 0) {
    const auto v = numbers(spec.substr(prefix.size()), "gaussian preset");
    if (v.size() != 2) throw CliError{kInputError, "gaussian preset needs mean,variance"};
    check(sb_density_gaussian(v[0], v[1], &d.handle));
    return;
  }
  check(sb_density_parse(slurp(spec).c_str(), &d.handle));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete Schrodinger bridges: scaling, routing, interpolation and spectral data"};
  app.set_version_flag("--version", std::string(sb_version()));
  app.require_subcommand(1);

  double tol = 1e-12;
  long max_iter = 100000;
  std::string csv_path;
  auto solver_flags = [&](CLI::App* sub) {
    sub->add_option("--tol", tol, "Hilbert-step tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  };

  // scale
  std::string kernel_file, p_file, q_file;
  auto* scale = app.add_subcommand("scale", "Solve the one-step Schrodinger system by Sinkhorn scaling");
  scale->add_option("kernel", kernel_file, "Kernel matrix file")->required();
  scale->add_option("p", p_file, "Initial marginal file")->required();
  scale->add_option("q", q_file, "Final marginal file")->required();
  solver_flags(scale);
  scale->add_option("--csv", csv_path, "Write the coupling as CSV");

  // route
  std::string graph_file, source = "1", sink = "1", prior = "rb";
  std::size_t horizon = 1;
  double temperature = 1.0;
  std::vector<double> sweep;
  bool show_paths = false;
  auto* route = app.add_subcommand("route", "Maximum-entropy routing between two nodes");
  route->add_option("graph", graph_file, "Graph file")->required();
  route->add_option("--source", source, "Source node")->required();
  route->add_option("--sink", sink, "Sink node")->required();
  route->add_option("--horizon", horizon, "Number of steps N")->required();
  route->add_option("--prior", prior, "rb or boltzmann")->check(CLI::IsMember({"rb", "boltzmann"}));
  route->add_option("--temperature", temperature, "Boltzmann temperature");
  route->add_option("--sweep", sweep, "Temperatures T1,T2,...")->delimiter(',');
  route->add_flag("--paths", show_paths, "Include the ranked path table");
  route->add_option("--csv", csv_path, "Write the flow matrix as CSV");
  solver_flags(route);

  // bridge
  std::string input_file, nu0_file, nuN_file;
  bool kernel_input = false;
  auto* bridge = app.add_subcommand("bridge", "Schrodinger bridge between two marginals over a graph or kernel prior");
  bridge->add_option("input", input_file, "Graph file, or kernel matrix with --kernel")->required();
  bridge->add_option("nu0", nu0_file, "Initial marginal file")->required();
  bridge->add_option("nuN", nuN_file, "Final marginal file")->required();
  bridge->add_option("--horizon", horizon, "Number of steps N")->required();
  bridge->add_flag("--kernel", kernel_input, "Input is a step kernel matrix");
  bridge->add_option("--prior", prior, "rb or boltzmann (graph input)")->check(CLI::IsMember({"rb", "boltzmann"}));
  bridge->add_option("--temperature", temperature, "Boltzmann temperature");
  bridge->add_flag("--paths", show_paths, "Include the path table");
  bridge->add_option("--csv", csv_path, "Write the flow matrix as CSV");
  solver_flags(bridge);

  // interp
  std::string rho0_spec, rho1_spec, grid_spec;
  double epsilon = 0.01;
  std::vector<double> eps_sweep, times;
  auto* interp = app.add_subcommand("interp", "Entropic interpolation between two 1-D densities");
  interp->add_option("rho0", rho0_spec, "gaussian:mean,variance or a two-column file")->required();
  interp->add_option("rho1", rho1_spec, "gaussian:mean,variance or a two-column file")->required();
  interp->add_option("--epsilon", epsilon, "Diffusion coefficient")->check(CLI::PositiveNumber);
  interp->add_option("--eps-sweep", eps_sweep, "Decreasing epsilons for the cost curve")->delimiter(',');
  interp->add_option("--grid", grid_spec, "a,b,m");
  interp->add_option("--times", times, "Interpolation times in [0,1]")->delimiter(',');
  interp->add_option("--csv", csv_path, "Write densities (or the cost curve with --eps-sweep) as CSV");
  solver_flags(interp);

  // spectral
  double spectral_temperature = 0.0;
  auto* spectral = app.add_subcommand("spectral", "Perron data, entropy and pressure rates of a graph");
  spectral->add_option("graph", graph_file, "Graph file")->required();
  spectral->add_option("--temperature", spectral_temperature, "Also report the Boltzmann-weighted chain")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  try {
    sb_solver_options solver;
    sb_solver_options_init(&solver);
    solver.tol = tol;
    solver.max_iter = max_iter;
    Report report;

    if (*scale) {
      const auto rows = matrix_rows(slurp(kernel_file), "kernel");
      std::vector<double> flat;
      for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
      const auto p = numbers(slurp(p_file), "p"), q = numbers(slurp(q_file), "q");
      check(sb_scale(flat.data(), rows.size(), rows.front().size(), p.data(), p.size(), q.data(), q.size(), &solver,
                     &report.handle));
    } else if (*route) {
      Graph g;
      check(sb_graph_load(graph_file.c_str(), &g.handle));
      sb_route_options o;
      sb_route_options_init(&o);
      o.source = resolve_node(g, source);
      o.sink = resolve_node(g, sink);
      o.horizon = horizon;
      o.prior = prior == "boltzmann" ? SB_PRIOR_BOLTZMANN : SB_PRIOR_RUELLE_BOWEN;
      o.temperature = temperature;
      if (!sweep.empty()) {
        o.sweep = sweep.data();
        o.sweep_count = sweep.size();
      }
      o.include_paths = show_paths ? 1 : 0;
      o.solver = solver;
      check(sb_route(g.handle, &o, &report.handle));
    } else if (*bridge) {
      sb_bridge_options o;
      sb_bridge_options_init(&o);
      o.horizon = horizon;
      o.prior = prior == "boltzmann" ? SB_PRIOR_BOLTZMANN : SB_PRIOR_RUELLE_BOWEN;
      o.temperature = temperature;
      o.include_paths = show_paths ? 1 : 0;
      o.solver = solver;
      const auto nu0 = numbers(slurp(nu0_file), "nu0"), nuN = numbers(slurp(nuN_file), "nuN");
      if (kernel_input) {
        const auto rows = matrix_rows(slurp(input_file), "kernel");
        std::vector<double> flat;
        for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
        check(sb_bridge_kernel(flat.data(), rows.size(), rows.front().size(), nu0.data(), nu0.size(), nuN.data(),
                               nuN.size(), &o, &report.handle));
      } else {
        Graph g;
        check(sb_graph_load(input_file.c_str(), &g.handle));
        check(sb_bridge(g.handle, nu0.data(), nu0.size(), nuN.data(), nuN.size(), &o, &report.handle));
      }
    } else if (*interp) {
      Density d0, d1;
      load_density(rho0_spec, d0);
      load_density(rho1_spec, d1);
      sb_interp_options o;
      sb_interp_options_init(&o);
      o.epsilon = epsilon;
      if (!grid_spec.empty()) {
        const auto g = numbers(grid_spec, "grid");
        if (g.size() != 3 || g[2] < 2 || g[2] != static_cast<double>(static_cast<size_t>(g[2])))
          throw CliError{kInputError, "--grid expects a,b,m with integer m >= 2"};
        o.a = g[0];
        o.b = g[1];
        o.m = static_cast<size_t>(g[2]);
      }
      if (!eps_sweep.empty()) {
        o.eps_sweep = eps_sweep.data();
        o.eps_count = eps_sweep.size();
      }
      if (!times.empty()) {
        o.times = times.data();
        o.time_count = times.size();
      }
      o.solver = solver;
      check(sb_interp(d0.handle, d1.handle, &o, &report.handle));
    } else if (*spectral) {
      Graph g;
      check(sb_graph_load(graph_file.c_str(), &g.handle));
      check(sb_spectral(g.handle, spectral_temperature, &report.handle));
    }
    emit(report, csv_path);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  }
  return 0;
}
