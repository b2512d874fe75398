#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <random>
#include <vector>

#include <doctest.h>

#include "sbridge/core.hpp"
#include "sbridge/error.hpp"
#include "sbridge/logmath.hpp"
#include "sbridge/paths.hpp"

namespace testing {

using namespace sbridge;

#define CHECK_CODE(expr, expected)                                      \
  do {                                                                  \
    bool thrown_ = false;                                               \
    try {                                                               \
      (void)(expr);                                                     \
    } catch (const ::sbridge::Error& e_) {                              \
      thrown_ = true;                                                   \
      CHECK_MESSAGE(e_.code() == (expected), "got " << to_string(e_.code()) << ": " << e_.what()); \
    }                                                                   \
    CHECK_MESSAGE(thrown_, "expected " << to_string(expected));         \
  } while (0)

// The 9-node routing graph: unit lengths, l(9,9) = 0, optional l(7,9).
inline WeightedDigraph fixture9(double l79 = 1.0) {
  WeightedDigraph g{NodeSet(9)};
  const int edges[][2] = {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 5}, {2, 7}, {3, 4}, {3, 8},
                          {4, 8}, {5, 6}, {5, 7}, {6, 9}, {7, 9}, {8, 9}, {9, 9}};
  for (const auto& e : edges) g.add_edge(e[0] - 1, e[1] - 1, 1.0);
  g.set_length(8, 8, 0.0);
  g.set_length(6, 8, l79);
  return g;
}

inline Path path1(std::initializer_list<std::size_t> one_based) {
  Path p;
  for (std::size_t v : one_based) p.push_back(v - 1);
  return p;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(gen_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen_); }
  bool coin(double p) { return uniform() < p; }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

inline Matrix random_positive(std::size_t r, std::size_t c, Rng& rng, double lo = 0.1, double hi = 10.0) {
  Matrix m(r, c);
  for (double& v : m.data()) v = rng.uniform(lo, hi);
  return m;
}

inline Vector random_simplex(std::size_t n, Rng& rng, double floor = 0.05) {
  Vector w(n);
  double s = 0.0;
  for (double& v : w) s += (v = rng.uniform(floor, 1.0));
  for (double& v : w) v /= s;
  return w;
}

// Strongly connected (Hamiltonian cycle) and aperiodic (a self-loop), plus
// random extra edges; lengths uniform in [lo, hi].
inline WeightedDigraph random_primitive_graph(std::size_t n, Rng& rng, double density = 0.3, double lo = 0.5,
                                              double hi = 3.0) {
  WeightedDigraph g{NodeSet(n)};
  for (std::size_t i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n, rng.uniform(lo, hi));
  const std::size_t loop = rng.index(n);
  if (!g.has_edge(loop, loop)) g.add_edge(loop, loop, rng.uniform(lo, hi));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!g.has_edge(i, j) && rng.coin(density)) g.add_edge(i, j, rng.uniform(lo, hi));
  return g;
}

// Random walk of t steps along the edges of g.
inline Path random_walk(const WeightedDigraph& g, std::size_t start, std::size_t t, Rng& rng) {
  Path p{start};
  for (std::size_t k = 0; k < t; ++k) {
    std::vector<std::size_t> next;
    for (std::size_t j = 0; j < g.size(); ++j)
      if (g.has_edge(p.back(), j)) next.push_back(j);
    p.push_back(next[rng.index(next.size())]);
  }
  return p;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return max_abs_diff(a.data(), b.data()); }

inline double table_mass(const std::vector<PathMass>& table, const Path& p) {
  for (const auto& e : table)
    if (e.path == p) return e.mass;
  return 0.0;
}

}  // namespace testing
