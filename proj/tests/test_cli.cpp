#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI through the shell; stderr is folded into out when `merge`.
Run run(const std::string& args, bool merge = false, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" SBRIDGE_CLI "' " + args + (merge ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class TempDir {
 public:
  TempDir() {
    char tmpl[] = "/tmp/sbridge_cli_XXXXXX";
    path_ = ::mkdtemp(tmpl);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string file(const std::string& name, const std::string& content = "") const {
    const std::string p = path_ + "/" + name;
    if (!content.empty()) std::ofstream(p) << content;
    return p;
  }

 private:
  std::string path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kFixture = SBRIDGE_DATA "/fixture9.txt";
const std::string kFixtureL79 = SBRIDGE_DATA "/fixture9_l79.txt";

}  // namespace

TEST_CASE("version and usage") {
  const auto v = run("--version");
  CHECK(v.code == 0);
  CHECK(v.out.find("1.0.0") != std::string::npos);
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("route " + kFixture + " --source 1 --sink 9").code == 2);  // missing --horizon
}

TEST_CASE("route reports") {
  const auto r = run("route " + kFixture + " --source 1 --sink 9 --horizon 3");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["command"] == "route");
  CHECK(j["solver"]["tol"] == 1e-12);
  CHECK(j["solver"]["max_iter"] == 100000);
  CHECK(j["diagnostics"].contains("iterations"));
  CHECK(j["flow"][1][1] == 0.333333333333);
  CHECK(j["flow"][2][7] == 0.666666666667);
  CHECK_FALSE(j.contains("paths"));

  const auto b = run("route " + kFixture + " --source 1 --sink 9 --horizon 4 --prior boltzmann --temperature 1 --paths");
  REQUIRE(b.code == 0);
  const json jb = json::parse(b.out);
  CHECK(std::abs(jb["flow"][1][1].get<double>() - 0.4705) < 5e-4);
  CHECK(std::abs(jb["flow"][1][3].get<double>() - 0.2236) < 5e-4);
  CHECK(jb["paths"].size() == 7);
  CHECK(jb["paths"][0]["path"] == "1-2-7-9-9");

  const auto s = run("route " + kFixtureL79 + " --source 1 --sink 9 --horizon 3 --prior boltzmann --sweep 100,1,0.1");
  REQUIRE(s.code == 0);
  const json js = json::parse(s.out);
  REQUIRE(js["sweep"].size() == 3);
  const double expected[3][3] = {{0.3311, 0.3344, 0.3344}, {0.1554, 0.4223, 0.4223}, {0.0, 0.5, 0.5}};
  for (int k = 0; k < 3; ++k)
    for (int c = 0; c < 3; ++c) CHECK(std::abs(js["sweep"][k]["flow"][1][c + 1].get<double>() - expected[k][c]) < 5e-4);
}

TEST_CASE("route CSV export") {
  TempDir dir;
  const std::string out = dir.file("flow.csv");
  const auto r = run("route " + kFixture + " --source 1 --sink 9 --horizon 3 --csv " + out);
  REQUIRE(r.code == 0);
  CHECK(slurp(out) ==
        "t,1,2,3,4,5,6,7,8,9\n"
        "0,1,0,0,0,0,0,0,0,0\n"
        "1,0,0.333333333333,0.333333333333,0.333333333333,0,0,0,0,0\n"
        "2,0,0,0,0,0,0,0.333333333333,0.666666666667,0\n"
        "3,0,0,0,0,0,0,0,0,1\n");
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
  const std::string args = "route " + kFixtureL79 + " --source 1 --sink 9 --horizon 4 --prior boltzmann --sweep 10,3,1,0.3 --paths";
  const auto a = run(args), b = run(args), c = run(args, false, "SBRIDGE_THREADS=4");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  const auto i1 = run("interp gaussian:0,0.1 gaussian:1,0.1 --epsilon 0.05 --grid -2,3,80");
  const auto i2 = run("interp gaussian:0,0.1 gaussian:1,0.1 --epsilon 0.05 --grid -2,3,80");
  REQUIRE(i1.code == 0);
  CHECK(i1.out == i2.out);
}

TEST_CASE("report numbers reparse to twelve digits") {
  const auto r = run("route " + kFixture + " --source 1 --sink 9 --horizon 4 --prior boltzmann --paths");
  const json j = json::parse(r.out);
  const double z = 3.0 + 4.0 * std::exp(-1.0);
  CHECK(std::abs(j["paths"][0]["mass"].get<double>() - 1.0 / z) < 1e-12);
  CHECK(std::abs(j["paths"][6]["mass"].get<double>() - std::exp(-1.0) / z) < 1e-12);
}

TEST_CASE("scale command") {
  TempDir dir;
  const auto k = dir.file("k.txt", "1 2\n2 1\n");
  const auto p = dir.file("p.txt", "0.5 0.5\n");
  const auto r = run("scale " + k + " " + p + " " + p);
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["coupling"][0][0] == 0.166666666667);
  CHECK(j["coupling"][0][1] == 0.333333333333);
  CHECK(j["solver"]["kappa"] == 0.333333333333);
  CHECK(j["solver"].contains("iterations"));

  const auto zero = dir.file("z.txt", "1 0\n2 1\n");
  const auto z = run("scale " + zero + " " + p + " " + p, true);
  CHECK(z.code == 3);
  CHECK(z.out.find("kernel must be strictly positive") != std::string::npos);

  const auto three = dir.file("q3.txt", "0.2 0.3 0.5\n");
  CHECK(run("scale " + k + " " + p + " " + three).code == 2);
  const auto junk = dir.file("junk.txt", "1 2\nx 1\n");
  const auto bad = run("scale " + junk + " " + p + " " + p, true);
  CHECK(bad.code == 2);
  CHECK(bad.out.find("line 2") != std::string::npos);

  const auto hard = dir.file("hard.txt", "1 100\n0.01 1\n");
  const auto pp = dir.file("pp.txt", "0.9 0.1\n");
  const auto slow = run("scale " + hard + " " + pp + " " + p + " --max-iter 1", true);
  CHECK(slow.code == 3);
  CHECK(slow.out.find("MaxIterationsExceeded") != std::string::npos);
}

TEST_CASE("graph input errors") {
  TempDir dir;
  const auto dup = dir.file("dup.txt", "1 2\n2 3\n1 2\n");
  const auto d = run("route " + dup + " --source 1 --sink 3 --horizon 2", true);
  CHECK(d.code == 2);
  CHECK(d.out.find("line 3") != std::string::npos);
  CHECK(run("route /nonexistent --source 1 --sink 9 --horizon 3").code == 2);
  CHECK(run("route " + kFixture + " --source 1 --sink 19 --horizon 3").code == 2);
  CHECK(run("route " + kFixture + " --source 1 --sink 9 --horizon 3 --prior boltzmann --temperature 0").code == 2);
  const auto infeasible = run("route " + kFixture + " --source 1 --sink 9 --horizon 2", true);
  CHECK(infeasible.code == 3);
  CHECK(infeasible.out.find("not reachable") != std::string::npos);
}

TEST_CASE("bridge command") {
  TempDir dir;
  const auto d1 = dir.file("d1.txt", "1 0 0 0 0 0 0 0 0\n");
  const auto d9 = dir.file("d9.txt", "0 0 0 0 0 0 0 0 1\n");
  const auto b = run("bridge " + kFixture + " " + d1 + " " + d9 + " --horizon 3");
  const auto r = run("route " + kFixture + " --source 1 --sink 9 --horizon 3");
  REQUIRE(b.code == 0);
  CHECK(json::parse(b.out)["flow"] == json::parse(r.out)["flow"]);

  const auto inf = run("bridge " + kFixture + " " + d9 + " " + d1 + " --horizon 3", true);
  CHECK(inf.code == 3);
  CHECK(inf.out.find("(9,1)") != std::string::npos);

  const auto k = dir.file("k.txt", "0.5 0.5\n0.2 0.8\n");
  const auto a = dir.file("a.txt", "0.5 0.5\n");
  const auto c = dir.file("c.txt", "0.3 0.7\n");
  const auto kb = run("bridge " + k + " " + a + " " + c + " --kernel --horizon 3");
  REQUIRE(kb.code == 0);
  const json jk = json::parse(kb.out);
  CHECK(std::abs(jk["flow"][3][1].get<double>() - 0.7) < 1e-9);
  CHECK(jk["diagnostics"]["terminal_residual"].get<double>() < 1e-9);
}

TEST_CASE("interp command") {
  TempDir dir;
  const std::string csv = dir.file("cost.csv");
  const auto r = run("interp gaussian:0,0.05 gaussian:1,0.05 --eps-sweep 1,0.1,0.01 --grid -1.5,2.5,100 --csv " + csv);
  REQUIRE(r.code == 0);
  const std::string text = slurp(csv);
  CHECK(text.rfind("epsilon,transport_cost,iterations\n1,", 0) == 0);
  const json j = json::parse(r.out);
  REQUIRE(j["cost_curve"].size() == 3);
  CHECK(j["cost_curve"][2]["transport_cost"].get<double>() < j["cost_curve"][0]["transport_cost"].get<double>());

  const auto flat = run("interp gaussian:0,0.2 gaussian:0,0.2 --epsilon 0.1 --grid -3,3,60 --times 0,0.5,1");
  REQUIRE(flat.code == 0);
  const json jf = json::parse(flat.out);
  for (const auto& d : jf["densities"]) CHECK(std::abs(d["mean"].get<double>()) < 1e-9);

  const auto bad = dir.file("bad.txt", "0 1\n0 2\n");
  CHECK(run("interp " + bad + " gaussian:0,1").code == 2);
  CHECK(run("interp gaussian:0 gaussian:0,1").code == 2);
}

TEST_CASE("spectral command") {
  TempDir dir;
  std::string complete;
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 4; ++j) complete += std::to_string(i) + " " + std::to_string(j) + "\n";
  const auto k4 = run("spectral " + dir.file("k4.txt", complete));
  REQUIRE(k4.code == 0);
  CHECK(std::abs(json::parse(k4.out)["adjacency"]["entropy_rate"].get<double>() - std::log(4.0)) < 1e-11);

  const auto fib = run("spectral " + dir.file("fib.txt", "1 2\n2 1\n2 2\n"));
  REQUIRE(fib.code == 0);
  CHECK(json::parse(fib.out)["adjacency"]["lambda"] == 1.61803398875);

  const auto cyc = run("spectral " + dir.file("cyc.txt", "1 2\n2 3\n3 1\n"), true);
  CHECK(cyc.code == 3);
  CHECK(cyc.out.find("not primitive") != std::string::npos);
}
