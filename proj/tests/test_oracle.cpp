#include "sbridge/oracle.hpp"

#include <numeric>

#include "support.hpp"

using namespace testing;
using namespace sbridge::oracle;

namespace {

double mass_of(const std::vector<WeightedPath>& table, const Path& p) {
  for (const auto& w : table)
    if (w.path == p) return w.mass;
  return -1.0;
}

Vector random_rational(std::size_t n, std::size_t units, Rng& rng) {
  std::vector<std::size_t> counts(n, 0);
  for (std::size_t u = 0; u < units; ++u) ++counts[rng.index(n)];
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(counts[i]) / static_cast<double>(units);
  return v;
}

}  // namespace

TEST_CASE("pinned oracle on the Boltzmann fixture") {
  const auto g = fixture9();
  const auto prior = PathMeasure::time_homogeneous(Vector(9, 1.0), boltzmann_kernel(g, 1.0), 4);
  const auto table = pinned_bridge_oracle(prior, 0, 8);
  REQUIRE(table.size() == 7);
  const double z = 3.0 + 4.0 * std::exp(-1.0);
  for (const Path& p : {path1({1, 2, 7, 9, 9}), path1({1, 3, 8, 9, 9}), path1({1, 4, 8, 9, 9})})
    CHECK(std::abs(mass_of(table, p) - 1.0 / z) < 1e-12);
  for (const Path& p : {path1({1, 2, 3, 8, 9}), path1({1, 2, 5, 6, 9}), path1({1, 2, 5, 7, 9}), path1({1, 3, 4, 8, 9})})
    CHECK(std::abs(mass_of(table, p) - std::exp(-1.0) / z) < 1e-12);
  CHECK(table[0].path == path1({1, 2, 7, 9, 9}));
  CHECK(table[3].path == path1({1, 2, 3, 8, 9}));
  double total = 0.0;
  for (const auto& w : table) total += w.mass;
  CHECK(std::abs(total - 1.0) < 1e-14);
}

TEST_CASE("pinned oracle with the counting prior is uniform") {
  const auto g = fixture9();
  const auto prior = PathMeasure::time_homogeneous(Vector(9, 1.0), g.adjacency(), 4);
  const auto table = pinned_bridge_oracle(prior, 0, 8);
  REQUIRE(table.size() == 7);
  for (const auto& w : table) CHECK(std::abs(w.mass - 1.0 / 7.0) < 1e-15);
}

TEST_CASE("pinned oracle with l79 = 2 and N = 3") {
  const auto g = fixture9(2.0);
  const auto prior = PathMeasure::time_homogeneous(Vector(9, 1.0), boltzmann_kernel(g, 1.0), 3);
  const auto table = pinned_bridge_oracle(prior, 0, 8);
  REQUIRE(table.size() == 3);
  const double z = std::exp(-4.0) + 2.0 * std::exp(-3.0);
  CHECK(std::abs(mass_of(table, path1({1, 2, 7, 9})) - std::exp(-4.0) / z) < 1e-12);
  CHECK(std::abs(mass_of(table, path1({1, 3, 8, 9})) - std::exp(-3.0) / z) < 1e-12);
  CHECK(std::abs(mass_of(table, path1({1, 4, 8, 9})) - std::exp(-3.0) / z) < 1e-12);
  CHECK(mass_of(table, path1({1, 2, 7, 9})) == doctest::Approx(0.155362).epsilon(1e-5));
  CHECK(mass_of(table, path1({1, 3, 8, 9})) == doctest::Approx(0.422319).epsilon(1e-5));
}

TEST_CASE("pinned oracle limits") {
  const auto g = fixture9();
  const auto prior = PathMeasure::time_homogeneous(Vector(9, 1.0), g.adjacency(), 4);
  OracleBudget tight;
  tight.max_paths = 3;
  CHECK_CODE(pinned_bridge_oracle(prior, 0, 8, tight), ErrorCode::EnumerationBudgetExceeded);
  OracleBudget few;
  few.max_states = 5;
  CHECK_CODE(pinned_bridge_oracle(prior, 0, 8, few), ErrorCode::EnumerationBudgetExceeded);
  CHECK_CODE(pinned_bridge_oracle(prior, 8, 0), ErrorCode::NoFeasiblePath);
  CHECK_CODE(pinned_bridge_oracle(prior, 0, 9), ErrorCode::IndexOutOfRange);
}

TEST_CASE("assignment oracle examples") {
  const Matrix c = Matrix::from_rows({{0, 1}, {1, 0}});
  CHECK(assignment_ot_oracle(c, Vector{0.5, 0.5}, Vector{0.5, 0.5}).value == 0.0);
  CHECK(assignment_ot_oracle(c, Vector{1, 0}, Vector{0, 1}).value == 1.0);
  const auto r = assignment_ot_oracle(Matrix::from_rows({{0, 2}, {1, 3}}), Vector{0.5, 0.5}, Vector{0.5, 0.5});
  CHECK(r.value == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(max_abs_diff(r.coupling.row_sums(), Vector{0.5, 0.5}) < 1e-15);
}

TEST_CASE("assignment and vertex enumeration agree") {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng.index(3);
    const Matrix c = random_positive(n, n, rng, 0.0, 10.0);
    const Vector p = random_rational(n, 8, rng), q = random_rational(n, 8, rng);
    const auto a = assignment_ot_oracle(c, p, q);
    const auto v = vertex_enumeration_ot_oracle(c, p, q);
    CHECK(std::abs(a.value - v.value) < 1e-12);
    // the optimum lower-bounds random feasible couplings (independent and north-west corner)
    double indep = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) indep += c(i, j) * p[i] * q[j];
    CHECK(a.value <= indep + 1e-12);
    Vector rp = p, rq = q;
    double corner = 0.0;
    for (std::size_t i = 0, j = 0; i < n && j < n;) {
      const double m = std::min(rp[i], rq[j]);
      corner += m * c(i, j);
      rp[i] -= m;
      rq[j] -= m;
      if (rp[i] <= 1e-15) ++i;
      else ++j;
    }
    CHECK(a.value <= corner + 1e-12);
  }
}

TEST_CASE("common denominator") {
  CHECK(common_denominator(Vector{0.5, 0.5}, Vector{0.25, 0.75}, 256) == 4);
  CHECK(common_denominator(Vector{1.0 / 3, 2.0 / 3}, Vector{0.5, 0.5}, 256) == 6);
  const double pi = std::acos(-1.0);
  CHECK(common_denominator(Vector{1 / pi, 1 - 1 / pi}, Vector{0.5, 0.5}, 256) == 0);
  CHECK_CODE(assignment_ot_oracle(Matrix(2, 2, 1.0), Vector{1 / pi, 1 - 1 / pi}, Vector{0.5, 0.5}),
             ErrorCode::IrrationalMarginals);
  CHECK_CODE(vertex_enumeration_ot_oracle(Matrix(6, 6, 1.0), Vector(6, 1.0 / 6), Vector(6, 1.0 / 6)),
             ErrorCode::OracleScaleExceeded);
}

TEST_CASE("KL oracle examples") {
  const auto same = coupling_kl_oracle(Matrix::from_rows({{1.0 / 6, 1.0 / 3}, {1.0 / 3, 1.0 / 6}}), Vector{0.5, 0.5},
                                       Vector{0.5, 0.5});
  CHECK(std::abs(same.value) < 1e-8);

  const Vector p{0.3, 0.7}, q{0.6, 0.4};
  const auto indep = coupling_kl_oracle(Matrix(2, 2, 0.25), p, q);
  double kl = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(std::abs(indep.coupling(i, j) - p[i] * q[j]) < 1e-8);
      kl += p[i] * q[j] * std::log(4.0 * p[i] * q[j]);
    }
  CHECK(std::abs(indep.value - kl) < 1e-8);

  const double e = std::exp(-1.0);
  const Matrix boltz = Matrix::from_rows({{1 / (2 + 2 * e), e / (2 + 2 * e)}, {e / (2 + 2 * e), 1 / (2 + 2 * e)}});
  const auto sym = coupling_kl_oracle(boltz, Vector{0.5, 0.5}, Vector{0.5, 0.5});
  CHECK(std::abs(sym.coupling(0, 0) - 1.0 / (2.0 * (1.0 + e))) < 1e-8);
  CHECK(sym.coupling(0, 0) == doctest::Approx(0.365529).epsilon(1e-6));

  CHECK_CODE(coupling_kl_oracle(Matrix(4, 4, 1.0 / 16), Vector(4, 0.25), Vector(4, 0.25)),
             ErrorCode::OracleScaleExceeded);
}

TEST_CASE("KL oracle on 3x3 beats random feasible couplings") {
  Rng rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix g = random_positive(3, 3, rng, 0.2, 2.0);
    const double s = std::accumulate(g.data().begin(), g.data().end(), 0.0);
    for (double& v : g.data()) v /= s;
    const Vector p = random_simplex(3, rng, 0.1), q = random_simplex(3, rng, 0.1);
    const auto best = coupling_kl_oracle(g, p, q, 400);
    CHECK(max_abs_diff(best.coupling.row_sums(), p) < 1e-12);
    CHECK(max_abs_diff(best.coupling.col_sums(), q) < 1e-12);
    // independent coupling is feasible
    double kl = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) kl += p[i] * q[j] * std::log(p[i] * q[j] / g(i, j));
    CHECK(best.value <= kl + 1e-12);
  }
}

TEST_CASE("quantile oracle examples") {
  Vector x(20);
  std::iota(x.begin(), x.end(), 0.0);
  Vector m0(20, 0.0), m1(20, 0.0);
  m0[2] = 0.2, m0[3] = 0.5, m0[4] = 0.3;
  m1[5] = 0.2, m1[6] = 0.5, m1[7] = 0.3;
  CHECK(quantile_coupling_oracle(x, m0, m0).cost == 0.0);
  const auto shifted = quantile_coupling_oracle(x, m0, m1);
  CHECK(shifted.cost == doctest::Approx(4.5).epsilon(1e-14));
  for (const auto& c : shifted.cells) CHECK(c.to == c.from + 3);

  // N(-1, 1/4) -> N(1, 1/4) on a grid where the shift is a whole number of cells
  const std::size_t m = 241;
  Vector pts(m), g0(m), g1(m);
  for (std::size_t i = 0; i < m; ++i) {
    pts[i] = -6.0 + 0.05 * static_cast<double>(i);
    g0[i] = std::exp(-2.0 * (pts[i] + 1.0) * (pts[i] + 1.0));
    g1[i] = std::exp(-2.0 * (pts[i] - 1.0) * (pts[i] - 1.0));
  }
  const double s0 = std::accumulate(g0.begin(), g0.end(), 0.0), s1 = std::accumulate(g1.begin(), g1.end(), 0.0);
  for (std::size_t i = 0; i < m; ++i) g0[i] /= s0, g1[i] /= s1;
  CHECK(quantile_coupling_oracle(pts, g0, g1).cost == doctest::Approx(2.0).epsilon(1e-10));

  CHECK_CODE(quantile_coupling_oracle(Vector{0, 0}, Vector{0.5, 0.5}, Vector{0.5, 0.5}), ErrorCode::InvalidArgument);
}
