#include "sbridge/core.hpp"

#include <cmath>
#include <set>

#include "sbridge/error.hpp"
#include "sbridge/logmath.hpp"

namespace sbridge {

namespace {

constexpr double kNormalizationSlack = 1e-9;

std::string idx1(std::size_t i) { return std::to_string(i + 1); }

}  // namespace

// ---------------------------------------------------------------- NodeSet

NodeSet::NodeSet(std::size_t n) : n_(n) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "node set must be nonempty");
}

NodeSet::NodeSet(std::vector<std::string> labels) : n_(labels.size()), labels_(std::move(labels)) {
  if (n_ == 0) fail(ErrorCode::InvalidArgument, "node set must be nonempty");
  std::set<std::string> seen;
  for (const auto& l : labels_)
    if (!seen.insert(l).second) fail(ErrorCode::InvalidArgument, "duplicate node label '" + l + "'");
}

std::string NodeSet::label(std::size_t i) const {
  if (i >= n_) fail(ErrorCode::IndexOutOfRange, "node index out of range");
  return labels_.empty() ? idx1(i) : labels_[i];
}

std::optional<std::size_t> NodeSet::find(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return i;
  return std::nullopt;
}

// ----------------------------------------------------------- Distribution

Distribution Distribution::validate(std::span<const double> weights) {
  if (weights.empty()) fail(ErrorCode::InvalidArgument, "distribution must be nonempty");
  CompensatedSum sum;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (!std::isfinite(w)) fail(ErrorCode::InvalidArgument, "distribution entry " + idx1(i) + " is not finite");
    if (w < 0.0) fail(ErrorCode::NegativeEntry, "distribution entry " + idx1(i) + " is negative");
    sum.add(w);
  }
  const double s = sum.value();
  if (std::abs(s - 1.0) > kNormalizationSlack)
    fail(ErrorCode::NotNormalized, "distribution sums to " + std::to_string(s) + ", not 1");
  Vector w(weights.begin(), weights.end());
  for (double& x : w) x /= s;
  return Distribution(std::move(w));
}

Distribution Distribution::validate(std::span<const double> weights, std::size_t expected_n) {
  if (weights.size() != expected_n)
    fail(ErrorCode::DimensionMismatch, "distribution has " + std::to_string(weights.size()) +
                                           " entries, expected " + std::to_string(expected_n));
  return validate(weights);
}

Distribution Distribution::uniform(std::size_t n) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "distribution must be nonempty");
  return Distribution(Vector(n, 1.0 / static_cast<double>(n)));
}

Vector Distribution::log_weights() const { return log_of(w_); }

std::vector<std::size_t> Distribution::support() const {
  std::vector<std::size_t> s;
  for (std::size_t i = 0; i < w_.size(); ++i)
    if (w_[i] > 0.0) s.push_back(i);
  return s;
}

Distribution dirac(std::size_t n, std::size_t i) {
  if (i >= n) fail(ErrorCode::IndexOutOfRange, "dirac index " + idx1(i) + " outside 1.." + std::to_string(n));
  Vector w(n, 0.0);
  w[i] = 1.0;
  return Distribution::validate(w);
}

Distribution dirac(const NodeSet& nodes, std::size_t i) { return dirac(nodes.size(), i); }

// ----------------------------------------------------------------- Kernel

Kernel Kernel::from_linear(const Matrix& entries) {
  if (!entries.square() || entries.rows() == 0)
    fail(ErrorCode::DimensionMismatch, "kernel must be a nonempty square matrix");
  Matrix log_entries(entries.rows(), entries.cols());
  for (std::size_t i = 0; i < entries.rows(); ++i)
    for (std::size_t j = 0; j < entries.cols(); ++j) {
      const double v = entries(i, j);
      if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "kernel entry is not finite");
      if (v < 0.0) fail(ErrorCode::NegativeEntry, "kernel entry (" + idx1(i) + "," + idx1(j) + ") is negative");
      log_entries(i, j) = safe_log(v);
    }
  return Kernel(std::move(log_entries));
}

Kernel Kernel::from_log(Matrix log_entries) {
  if (!log_entries.square() || log_entries.rows() == 0)
    fail(ErrorCode::DimensionMismatch, "kernel must be a nonempty square matrix");
  for (double v : log_entries.data())
    if (std::isnan(v) || v == kInf) fail(ErrorCode::InvalidArgument, "kernel log-entry is NaN or +inf");
  return Kernel(std::move(log_entries));
}

double Kernel::value(std::size_t i, std::size_t j) const { return safe_exp(log_(i, j)); }

bool Kernel::support(std::size_t i, std::size_t j) const { return log_(i, j) != kNegInf; }

Matrix Kernel::linear() const {
  Matrix m(log_.rows(), log_.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = safe_exp(log_(i, j));
  return m;
}

bool Kernel::strictly_positive() const {
  for (double v : log_.data())
    if (v == kNegInf) return false;
  return true;
}

// --------------------------------------------------------------- Coupling

Coupling::Coupling(Matrix joint, Distribution row_marginal, Distribution col_marginal, double tolerance)
    : joint_(std::move(joint)), p_(std::move(row_marginal)), q_(std::move(col_marginal)) {
  if (joint_.rows() != p_.size() || joint_.cols() != q_.size())
    fail(ErrorCode::DimensionMismatch, "coupling shape does not match its marginals");
  for (double v : joint_.data())
    if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorCode::NegativeEntry, "coupling entries must be finite and >= 0");
  const Vector rs = joint_.row_sums();
  const Vector cs = joint_.col_sums();
  for (std::size_t i = 0; i < rs.size(); ++i)
    if (std::abs(rs[i] - p_[i]) > tolerance)
      fail(ErrorCode::NotConverged, "coupling row " + idx1(i) + " violates its marginal");
  for (std::size_t j = 0; j < cs.size(); ++j)
    if (std::abs(cs[j] - q_[j]) > tolerance)
      fail(ErrorCode::NotConverged, "coupling column " + idx1(j) + " violates its marginal");
}

// -------------------------------------------------------- WeightedDigraph

WeightedDigraph::WeightedDigraph(NodeSet nodes)
    : nodes_(std::move(nodes)), lengths_(nodes_.size(), nodes_.size(), kInf) {}

WeightedDigraph::WeightedDigraph(NodeSet nodes, Matrix lengths)
    : nodes_(std::move(nodes)), lengths_(std::move(lengths)) {
  if (lengths_.rows() != nodes_.size() || lengths_.cols() != nodes_.size())
    fail(ErrorCode::DimensionMismatch, "length matrix does not match node count");
  for (double l : lengths_.data())
    if (std::isnan(l) || l < 0.0) fail(ErrorCode::NegativeEntry, "edge lengths must be >= 0");
}

bool WeightedDigraph::has_edge(std::size_t i, std::size_t j) const { return std::isfinite(lengths_(i, j)); }

std::size_t WeightedDigraph::edge_count() const {
  std::size_t c = 0;
  for (double l : lengths_.data())
    if (std::isfinite(l)) ++c;
  return c;
}

void WeightedDigraph::add_edge(std::size_t src, std::size_t dst, double length) {
  if (src >= size() || dst >= size()) fail(ErrorCode::IndexOutOfRange, "edge endpoint out of range");
  if (has_edge(src, dst))
    fail(ErrorCode::InvalidArgument, "duplicate edge " + nodes_.label(src) + " -> " + nodes_.label(dst));
  set_length(src, dst, length);
}

void WeightedDigraph::set_length(std::size_t src, std::size_t dst, double length) {
  if (src >= size() || dst >= size()) fail(ErrorCode::IndexOutOfRange, "edge endpoint out of range");
  if (std::isnan(length) || length < 0.0) fail(ErrorCode::NegativeEntry, "edge lengths must be >= 0");
  lengths_(src, dst) = length;
}

Kernel WeightedDigraph::adjacency() const {
  Matrix a(size(), size());
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j) a(i, j) = has_edge(i, j) ? 1.0 : 0.0;
  return Kernel::from_linear(a);
}

Kernel boltzmann_kernel(const WeightedDigraph& graph, double temperature) {
  if (!(temperature > 0.0)) fail(ErrorCode::NonPositiveTemperature, "temperature must be positive");
  const std::size_t n = graph.size();
  Matrix lb(n, n, kNegInf);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (graph.has_edge(i, j)) lb(i, j) = -graph.length(i, j) / temperature;
  return Kernel::from_log(std::move(lb));
}

// ------------------------------------------------------------ PathMeasure

PathMeasure::PathMeasure(Vector initial, std::vector<Kernel> steps) : steps_(std::move(steps)) {
  if (steps_.empty()) fail(ErrorCode::InvalidArgument, "path measure needs horizon N >= 1");
  for (double w : initial)
    if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorCode::NegativeEntry, "initial weights must be finite and >= 0");
  log_initial_ = log_of(initial);
  for (const auto& k : steps_)
    if (k.size() != log_initial_.size())
      fail(ErrorCode::DimensionMismatch, "step kernel size does not match initial weights");
}

PathMeasure PathMeasure::time_homogeneous(Vector initial, const Kernel& step, std::size_t horizon) {
  return PathMeasure(std::move(initial), std::vector<Kernel>(horizon, step));
}

Vector PathMeasure::initial() const { return exp_of(log_initial_); }

double PathMeasure::log_path_mass(const Path& path) const {
  if (path.size() != horizon() + 1)
    fail(ErrorCode::HorizonMismatch, "path has " + std::to_string(path.size()) + " nodes, horizon needs " +
                                         std::to_string(horizon() + 1));
  for (std::size_t x : path)
    if (x >= size()) fail(ErrorCode::IndexOutOfRange, "path node out of range");
  double lm = log_initial_[path[0]];
  for (std::size_t t = 0; t < horizon() && lm != kNegInf; ++t) lm += steps_[t].log_value(path[t], path[t + 1]);
  return lm;
}

double PathMeasure::path_mass(const Path& path) const { return safe_exp(log_path_mass(path)); }

bool PathMeasure::feasible(const Path& path) const { return log_path_mass(path) != kNegInf; }

double path_mass(const PathMeasure& measure, const Path& path) { return measure.path_mass(path); }

// ------------------------------------------------------------- Potentials

Vector Potentials::phi(std::size_t t) const { return exp_of(log_phi.at(t)); }
Vector Potentials::phi_hat(std::size_t t) const { return exp_of(log_phi_hat.at(t)); }

Vector Potentials::marginal(std::size_t t) const {
  const Vector& a = log_phi.at(t);
  const Vector& b = log_phi_hat.at(t);
  Vector m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    m[i] = (a[i] == kNegInf || b[i] == kNegInf) ? 0.0 : std::exp(a[i] + b[i]);
  return m;
}

}  // namespace sbridge
