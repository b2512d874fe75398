#include "sbridge/sbridge.h"

#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include <doctest.h>
#include <json.hpp>

using nlohmann::json;

namespace {

const char* kFixture =
    "1 2\n1 3\n1 4\n2 3\n2 5\n2 7\n3 4\n3 8\n4 8\n5 6\n5 7\n6 9\n7 9\n8 9\n9 9 0\n";

sb_graph* fixture() {
  sb_graph* g = nullptr;
  REQUIRE(sb_graph_parse(kFixture, &g) == SB_OK);
  return g;
}

json report_json(const sb_report* r) { return json::parse(sb_report_json(r)); }

}  // namespace

TEST_CASE("status helpers") {
  CHECK(std::string(sb_version()) == "1.0.0");
  CHECK(std::string(sb_status_name(SB_OK)) == "ok");
  CHECK(std::string(sb_status_name(SB_ERR_NOT_PRIMITIVE)) == "NotPrimitive");
  CHECK(std::string(sb_status_name(SB_ERR_PARSE)) == "ParseError");
  CHECK(sb_status_exit_code(SB_OK) == 0);
  CHECK(sb_status_exit_code(SB_ERR_PARSE) == 2);
  CHECK(sb_status_exit_code(SB_ERR_DIMENSION_MISMATCH) == 2);
  CHECK(sb_status_exit_code(SB_ERR_NOT_PRIMITIVE) == 3);
  CHECK(sb_status_exit_code(SB_ERR_MAX_ITERATIONS_EXCEEDED) == 3);
}

TEST_CASE("graph handles") {
  sb_graph* g = nullptr;
  REQUIRE(sb_graph_create(3, &g) == SB_OK);
  CHECK(sb_graph_add_edge(g, 1, 2, 1.5) == SB_OK);
  CHECK(sb_graph_add_edge(g, 2, 3, 1.0) == SB_OK);
  CHECK(sb_graph_add_edge(g, 0, 1, 1.0) == SB_ERR_INDEX_OUT_OF_RANGE);
  CHECK(std::string(sb_last_error()).size() > 0);
  CHECK(sb_graph_add_edge(g, 1, 4, 1.0) == SB_ERR_INDEX_OUT_OF_RANGE);
  CHECK(sb_graph_set_length(g, 1, 2, -1.0) == SB_ERR_NEGATIVE_ENTRY);
  CHECK(sb_graph_set_length(g, 1, 2, 2.0) == SB_OK);
  CHECK(sb_graph_node_count(g) == 3);
  CHECK(sb_graph_edge_count(g) == 2);
  size_t index = 0;
  CHECK(sb_graph_node_index(g, "2", &index) == SB_OK);
  CHECK(index == 2);
  CHECK(sb_graph_node_index(g, "7", &index) == SB_ERR_INDEX_OUT_OF_RANGE);
  sb_graph_destroy(g);
  sb_graph_destroy(nullptr);

  sb_graph* named = nullptr;
  REQUIRE(sb_graph_parse(R"({"nodes": ["src", "mid", "dst"], "edges": [["src", "mid"], ["mid", "dst"]]})", &named) ==
          SB_OK);
  CHECK(sb_graph_node_index(named, "dst", &index) == SB_OK);
  CHECK(index == 3);
  sb_graph_destroy(named);

  sb_graph* bad = nullptr;
  CHECK(sb_graph_parse("1 2\n2 zz\n", &bad) == SB_ERR_PARSE);
  CHECK(bad == nullptr);
  CHECK(std::string(sb_last_error()).find("line 2") != std::string::npos);
  CHECK(sb_graph_parse(nullptr, &bad) == SB_ERR_INVALID_ARGUMENT);
  CHECK(sb_graph_create(3, nullptr) == SB_ERR_INVALID_ARGUMENT);
  CHECK(sb_graph_load("/nonexistent/graph.txt", &bad) == SB_ERR_INVALID_ARGUMENT);

  sb_graph* loaded = nullptr;
  REQUIRE(sb_graph_load(SBRIDGE_DATA "/fixture9.txt", &loaded) == SB_OK);
  CHECK(sb_graph_edge_count(loaded) == 15);
  sb_graph_destroy(loaded);
}

TEST_CASE("last error is per thread") {
  sb_graph* g = nullptr;
  CHECK(sb_graph_parse("x", &g) == SB_ERR_PARSE);
  const std::string mine = sb_last_error();
  std::string theirs = "unset";
  std::thread([&] { theirs = sb_last_error(); }).join();
  CHECK(theirs.empty());
  CHECK(std::string(sb_last_error()) == mine);
}

TEST_CASE("scaling through the C API") {
  const double kernel[] = {1, 2, 2, 1};
  const double p[] = {0.5, 0.5};
  sb_report* r = nullptr;
  REQUIRE(sb_scale(kernel, 2, 2, p, 2, p, 2, nullptr, &r) == SB_OK);
  size_t rows = 0, cols = 0;
  const double* data = nullptr;
  REQUIRE(sb_report_matrix(r, "coupling", &rows, &cols, &data) == SB_OK);
  CHECK(rows == 2);
  CHECK(cols == 2);
  CHECK(std::abs(data[0] - 1.0 / 6) < 1e-15);
  CHECK(std::abs(data[1] - 1.0 / 3) < 1e-15);
  CHECK(sb_report_matrix(r, "nothing", &rows, &cols, &data) == SB_ERR_INVALID_ARGUMENT);
  const json j = report_json(r);
  CHECK(j["command"] == "scale");
  CHECK(std::string(sb_report_primary_csv(r)) == "0.166666666667,0.333333333333\n0.333333333333,0.166666666667\n");
  CHECK(sb_report_csv(r, "flow") == nullptr);
  sb_report_destroy(r);

  const double zero[] = {1, 0, 1, 1};
  CHECK(sb_scale(zero, 2, 2, p, 2, p, 2, nullptr, &r) == SB_ERR_NON_POSITIVE_KERNEL);
  CHECK(sb_scale(kernel, 2, 2, p, 1, p, 2, nullptr, &r) == SB_ERR_DIMENSION_MISMATCH);
  const double unnormalized[] = {0.5, 0.6};
  CHECK(sb_scale(kernel, 2, 2, unnormalized, 2, p, 2, nullptr, &r) == SB_ERR_NOT_NORMALIZED);

  sb_solver_options opts;
  sb_solver_options_init(&opts);
  CHECK(opts.tol == 1e-12);
  CHECK(opts.max_iter == 100000);
  const double hard[] = {1, 100, 0.01, 1};
  const double pp[] = {0.9, 0.1}, qq[] = {0.2, 0.8};
  opts.max_iter = 1;
  CHECK(sb_scale(hard, 2, 2, pp, 2, qq, 2, &opts, &r) == SB_ERR_MAX_ITERATIONS_EXCEEDED);
}

TEST_CASE("routing through the C API") {
  sb_graph* g = fixture();
  sb_route_options o;
  sb_route_options_init(&o);
  CHECK(o.temperature == 1.0);
  o.source = 1;
  o.sink = 9;
  o.horizon = 4;
  o.include_paths = 1;
  sb_report* r = nullptr;
  REQUIRE(sb_route(g, &o, &r) == SB_OK);
  size_t rows = 0, cols = 0;
  const double* flow = nullptr;
  REQUIRE(sb_report_matrix(r, "flow", &rows, &cols, &flow) == SB_OK);
  CHECK(rows == 5);
  CHECK(cols == 9);
  CHECK(std::abs(flow[9 + 1] - 4.0 / 7) < 1e-12);
  const json j = report_json(r);
  CHECK(j["paths"].size() == 7);
  CHECK(j["paths"][0]["mass"].get<double>() == 0.142857142857);
  CHECK(j["most_probable"].size() == 7);
  CHECK(j["problem"]["prior"] == "rb");
  CHECK(std::string(sb_report_csv(r, "paths")).rfind("rank,path,mass\n1,1-2-3-8-9,0.142857142857\n", 0) == 0);
  CHECK(std::string(sb_report_primary_csv(r)).rfind("t,1,2,3,4,5,6,7,8,9\n", 0) == 0);
  const std::string first = sb_report_json(r);
  sb_report_destroy(r);
  REQUIRE(sb_route(g, &o, &r) == SB_OK);
  CHECK(first == sb_report_json(r));
  sb_report_destroy(r);

  o.prior = SB_PRIOR_BOLTZMANN;
  const double temps[] = {100.0, 1.0, 0.1};
  o.sweep = temps;
  o.sweep_count = 3;
  o.horizon = 3;
  REQUIRE(sb_graph_set_length(g, 7, 9, 2.0) == SB_OK);
  REQUIRE(sb_route(g, &o, &r) == SB_OK);
  const json s = report_json(r);
  REQUIRE(s["sweep"].size() == 3);
  CHECK(s["sweep"][1]["problem"]["temperature"] == 1.0);
  CHECK(std::abs(s["sweep"][1]["flow"][1][1].get<double>() - 0.1554) < 5e-4);
  CHECK(sb_report_matrix(r, "flow", &rows, &cols, &flow) == SB_ERR_INVALID_ARGUMENT);
  CHECK(std::string(sb_report_csv(r, "flow")).rfind("T,t,", 0) == 0);
  sb_report_destroy(r);

  o.sweep = nullptr;
  o.horizon = 2;
  CHECK(sb_route(g, &o, &r) == SB_ERR_NO_FEASIBLE_PATH);
  CHECK(std::string(sb_last_error()) == "node 9 is not reachable from node 1 in exactly 2 steps");
  o.horizon = 3;
  o.temperature = -1.0;
  CHECK(sb_route(g, &o, &r) == SB_ERR_NON_POSITIVE_TEMPERATURE);
  o.temperature = 1.0;
  o.sink = 10;
  CHECK(sb_route(g, &o, &r) == SB_ERR_INDEX_OUT_OF_RANGE);
  sb_graph_destroy(g);
}

TEST_CASE("bridges through the C API") {
  sb_graph* g = fixture();
  sb_bridge_options o;
  sb_bridge_options_init(&o);
  o.horizon = 4;
  o.prior = SB_PRIOR_BOLTZMANN;
  o.include_paths = 1;
  std::vector<double> nu0(9, 0.0), nuN(9, 0.0);
  nu0[0] = 1.0;
  nuN[8] = 1.0;
  sb_report* r = nullptr;
  REQUIRE(sb_bridge(g, nu0.data(), 9, nuN.data(), 9, &o, &r) == SB_OK);
  const json j = report_json(r);
  CHECK(std::abs(j["flow"][1][3].get<double>() - 1.0 / (3.0 + 4.0 * std::exp(-1.0))) < 1e-11);
  CHECK(j["paths"].size() == 7);
  CHECK(j["diagnostics"]["placeholder_rows"].size() > 0);
  sb_report_destroy(r);
  CHECK(sb_bridge(g, nuN.data(), 9, nu0.data(), 9, &o, &r) == SB_ERR_INFEASIBLE_SUPPORT);
  CHECK(sb_bridge(g, nu0.data(), 8, nuN.data(), 9, &o, &r) == SB_ERR_DIMENSION_MISMATCH);
  sb_graph_destroy(g);

  const double kernel[] = {0.5, 0.5, 0.2, 0.8};
  const double a[] = {0.5, 0.5}, b[] = {0.3, 0.7};
  o.horizon = 3;
  REQUIRE(sb_bridge_kernel(kernel, 2, 2, a, 2, b, 2, &o, &r) == SB_OK);
  size_t rows = 0, cols = 0;
  const double* flow = nullptr;
  REQUIRE(sb_report_matrix(r, "flow", &rows, &cols, &flow) == SB_OK);
  CHECK(rows == 4);
  CHECK(std::abs(flow[6] - 0.3) < 1e-9);
  CHECK(std::abs(flow[7] - 0.7) < 1e-9);
  sb_report_destroy(r);
  CHECK(sb_bridge_kernel(kernel, 2, 1, a, 2, b, 2, &o, &r) == SB_ERR_DIMENSION_MISMATCH);
}

TEST_CASE("interpolation through the C API") {
  sb_density* r0 = nullptr;
  sb_density* r1 = nullptr;
  REQUIRE(sb_density_gaussian(-1.0, 0.04, &r0) == SB_OK);
  REQUIRE(sb_density_parse("0 0\n1 1\n2 0\n", &r1) == SB_OK);
  sb_interp_options o;
  sb_interp_options_init(&o);
  CHECK(o.m == 0);
  CHECK(o.epsilon == 0.01);
  o.epsilon = 0.1;
  const double times[] = {0.0, 0.5, 1.0};
  o.times = times;
  o.time_count = 3;
  sb_report* r = nullptr;
  REQUIRE(sb_interp(r0, r1, &o, &r) == SB_OK);
  size_t rows = 0, cols = 0;
  const double* rho = nullptr;
  REQUIRE(sb_report_matrix(r, "density", &rows, &cols, &rho) == SB_OK);
  CHECK(rows == 3);
  CHECK(cols == 200);
  const json j = report_json(r);
  CHECK(j["densities"].size() == 3);
  for (const auto& d : j["densities"]) CHECK(std::abs(d["integral"].get<double>() - 1.0) < 1e-8);
  CHECK(std::abs(j["densities"][0]["mean"].get<double>() + 1.0) < 1e-3);
  CHECK(std::abs(j["densities"][2]["mean"].get<double>() - 1.0) < 1e-3);
  CHECK(std::string(sb_report_primary_csv(r)).rfind("t,x,rho\n", 0) == 0);
  sb_report_destroy(r);

  const double sweep[] = {1.0, 0.1, 0.01};
  o.eps_sweep = sweep;
  o.eps_count = 3;
  o.a = -3.0;
  o.b = 3.0;
  o.m = 120;
  REQUIRE(sb_interp(r0, r1, &o, &r) == SB_OK);
  const json c = report_json(r);
  CHECK(c["cost_curve"].size() == 3);
  // exact cost of the monotone rearrangement bounds the curve from below
  CHECK(c["monotone_cost"].get<double>() <= c["cost_curve"][2]["transport_cost"].get<double>());
  CHECK(std::string(sb_report_primary_csv(r)).rfind("epsilon,transport_cost", 0) == 0);
  sb_report_destroy(r);

  const double bad[] = {0.1, 1.0};
  o.eps_sweep = bad;
  o.eps_count = 2;
  CHECK(sb_interp(r0, r1, &o, &r) == SB_ERR_INVALID_ARGUMENT);
  CHECK(sb_density_gaussian(0.0, -1.0, &r0) == SB_ERR_INVALID_ARGUMENT);
  const double xs[] = {0.0, 0.0}, vs[] = {1.0, 1.0};
  sb_density* dup = nullptr;
  CHECK(sb_density_table(xs, vs, 2, &dup) == SB_ERR_PARSE);
  sb_density_destroy(r0);
  sb_density_destroy(r1);
}

TEST_CASE("spectral data through the C API") {
  sb_graph* g = nullptr;
  REQUIRE(sb_graph_parse("1 2\n2 1\n2 2\n", &g) == SB_OK);
  sb_report* r = nullptr;
  REQUIRE(sb_spectral(g, 0.0, &r) == SB_OK);
  const json j = report_json(r);
  CHECK(std::abs(j["adjacency"]["lambda"].get<double>() - (1.0 + std::sqrt(5.0)) / 2.0) < 1e-11);
  CHECK(j.find("weighted") == j.end());
  size_t rows = 0, cols = 0;
  const double* t = nullptr;
  REQUIRE(sb_report_matrix(r, "transition", &rows, &cols, &t) == SB_OK);
  CHECK(t[0] == 0.0);
  CHECK(t[1] == 1.0);
  sb_report_destroy(r);

  REQUIRE(sb_spectral(g, 2.0, &r) == SB_OK);
  const json w = report_json(r);
  CHECK(std::abs(w["weighted"]["free_energy_rate"].get<double>() + w["weighted"]["log_lambda"].get<double>()) < 1e-11);
  sb_report_destroy(r);
  sb_graph_destroy(g);

  sb_graph* f = fixture();
  CHECK(sb_spectral(f, 0.0, &r) == SB_ERR_NOT_PRIMITIVE);
  sb_graph_destroy(f);
}
