#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbridge/matrix.hpp"

namespace sbridge {

// States or graph nodes, indexed 0..n-1. Labels are display names; when
// absent, reports use 1-based integers.
class NodeSet {
 public:
  explicit NodeSet(std::size_t n);
  explicit NodeSet(std::vector<std::string> labels);

  std::size_t size() const noexcept { return n_; }
  bool has_labels() const noexcept { return !labels_.empty(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::string label(std::size_t i) const;
  std::optional<std::size_t> find(const std::string& label) const;

 private:
  std::size_t n_;
  std::vector<std::string> labels_;
};

// Probability vector. Construction validates nonnegativity and normalization;
// sums within 1e-9 of one are renormalized.
class Distribution {
 public:
  static Distribution validate(std::span<const double> weights);
  static Distribution validate(std::span<const double> weights, std::size_t expected_n);
  static Distribution uniform(std::size_t n);

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const Vector& weights() const noexcept { return w_; }
  Vector log_weights() const;
  std::vector<std::size_t> support() const;

 private:
  explicit Distribution(Vector w) : w_(std::move(w)) {}
  Vector w_;
};

Distribution dirac(const NodeSet& nodes, std::size_t i);
Distribution dirac(std::size_t n, std::size_t i);

// Nonnegative square matrix with an explicit support. Entries are held in the
// log domain (-inf off support) so that low-temperature kernels keep their
// relative magnitudes.
class Kernel {
 public:
  Kernel() = default;
  static Kernel from_linear(const Matrix& entries);
  static Kernel from_log(Matrix log_entries);

  std::size_t size() const noexcept { return log_.rows(); }
  double value(std::size_t i, std::size_t j) const;
  double log_value(std::size_t i, std::size_t j) const { return log_(i, j); }
  bool support(std::size_t i, std::size_t j) const;
  const Matrix& log_entries() const noexcept { return log_; }
  Matrix linear() const;
  bool strictly_positive() const;

 private:
  explicit Kernel(Matrix log_entries) : log_(std::move(log_entries)) {}
  Matrix log_;
};

// Joint distribution with prescribed marginals.
class Coupling {
 public:
  static constexpr double kMarginalTolerance = 1e-9;

  Coupling(Matrix joint, Distribution row_marginal, Distribution col_marginal,
           double tolerance = kMarginalTolerance);

  const Matrix& joint() const noexcept { return joint_; }
  const Distribution& row_marginal() const noexcept { return p_; }
  const Distribution& col_marginal() const noexcept { return q_; }
  double operator()(std::size_t i, std::size_t j) const { return joint_(i, j); }

 private:
  Matrix joint_;
  Distribution p_;
  Distribution q_;
};

// Directed graph with nonnegative edge lengths; +inf marks a missing edge.
class WeightedDigraph {
 public:
  explicit WeightedDigraph(NodeSet nodes);
  WeightedDigraph(NodeSet nodes, Matrix lengths);

  const NodeSet& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const Matrix& lengths() const noexcept { return lengths_; }
  double length(std::size_t i, std::size_t j) const { return lengths_(i, j); }
  bool has_edge(std::size_t i, std::size_t j) const;
  std::size_t edge_count() const;

  void add_edge(std::size_t src, std::size_t dst, double length = 1.0);
  void set_length(std::size_t src, std::size_t dst, double length);

  Kernel adjacency() const;

 private:
  NodeSet nodes_;
  Matrix lengths_;
};

// b_ij = exp(-l_ij / T) on edges, 0 elsewhere.
Kernel boltzmann_kernel(const WeightedDigraph& graph, double temperature);

using Path = std::vector<std::size_t>;

// Markovian measure on length-N paths: initial weights times a product of
// step kernels. Neither need be normalized.
class PathMeasure {
 public:
  PathMeasure(Vector initial, std::vector<Kernel> steps);
  static PathMeasure time_homogeneous(Vector initial, const Kernel& step, std::size_t horizon);

  std::size_t horizon() const noexcept { return steps_.size(); }
  std::size_t size() const noexcept { return log_initial_.size(); }
  const Vector& log_initial() const noexcept { return log_initial_; }
  Vector initial() const;
  const std::vector<Kernel>& steps() const noexcept { return steps_; }
  const Kernel& step(std::size_t t) const { return steps_[t]; }

  // Feasible means positive mass.
  bool feasible(const Path& path) const;
  double path_mass(const Path& path) const;
  double log_path_mass(const Path& path) const;

 private:
  Vector log_initial_;
  std::vector<Kernel> steps_;
};

double path_mass(const PathMeasure& measure, const Path& path);

// Schrodinger potentials phi(t,.), phihat(t,.) for t = 0..N, log domain.
struct Potentials {
  std::vector<Vector> log_phi;
  std::vector<Vector> log_phi_hat;

  std::size_t horizon() const { return log_phi.empty() ? 0 : log_phi.size() - 1; }
  Vector phi(std::size_t t) const;
  Vector phi_hat(std::size_t t) const;
  // phi(t) * phihat(t) componentwise.
  Vector marginal(std::size_t t) const;
};

}  // namespace sbridge
