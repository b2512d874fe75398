#include "sbridge/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <string>

#include "sbridge/error.hpp"
#include "sbridge/hilbert.hpp"
#include "sbridge/logmath.hpp"

namespace sbridge {

namespace {

using BitRow = std::vector<std::uint64_t>;

bool test_bit(const BitRow& r, std::size_t j) { return (r[j / 64] >> (j % 64)) & 1U; }
void set_bit(BitRow& r, std::size_t j) { r[j / 64] |= std::uint64_t{1} << (j % 64); }

double vector_max(const Vector& v) { return *std::max_element(v.begin(), v.end()); }

void scale_to_max(Vector& v) {
  const double m = vector_max(v);
  for (double& x : v) x /= m;
}

}  // namespace

PrimitivityCertificate check_primitive(const Kernel& kernel) {
  const std::size_t n = kernel.size();
  const std::size_t words = (n + 63) / 64;
  std::vector<BitRow> base(n, BitRow(words, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (kernel.support(i, j)) set_bit(base[i], j);

  PrimitivityCertificate cert;
  cert.bound = n * n - 2 * n + 2;
  auto full = [&](const std::vector<BitRow>& p, std::size_t& zr, std::size_t& zc) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (!test_bit(p[i], j)) {
          zr = i;
          zc = j;
          return false;
        }
    return true;
  };

  std::vector<BitRow> power = base;
  for (std::size_t m = 1;; ++m) {
    if (full(power, cert.zero_row, cert.zero_col)) {
      cert.primitive = true;
      cert.exponent = m;
      return cert;
    }
    if (m >= cert.bound) return cert;
    std::vector<BitRow> next(n, BitRow(words, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        if (test_bit(power[i], k))
          for (std::size_t w = 0; w < words; ++w) next[i][w] |= base[k][w];
    power = std::move(next);
  }
}

PerronData perron(const Kernel& kernel, const PerronOptions& options) {
  const PrimitivityCertificate cert = check_primitive(kernel);
  if (!cert.primitive)
    fail(ErrorCode::NotPrimitive, "kernel is not primitive: its power " + std::to_string(cert.bound) +
                                      " (Wielandt bound) is zero at (" + std::to_string(cert.zero_row + 1) + "," +
                                      std::to_string(cert.zero_col + 1) + ")");
  const std::size_t n = kernel.size();

  // Work with K / max(K); eigenvectors are unchanged.
  double log_top = kNegInf;
  for (double v : kernel.log_entries().data()) log_top = std::max(log_top, v);
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      k(i, j) = safe_exp(kernel.log_value(i, j) - log_top);
      // An underflowed entry changes the support and the iteration would converge to the wrong vector.
      if (kernel.support(i, j) && !(k(i, j) >= std::numeric_limits<double>::min()))
        throw ConvergenceError(ErrorCode::NotConverged,
                               "kernel dynamic range exceeds double precision (log ratio " +
                                   std::to_string(kernel.log_value(i, j) - log_top) + ")",
                               kInf, 0);
    }
  const Matrix kt = k.transpose();

  // Repeated squaring gets close fast; power iteration polishes.
  auto warm_start = [&](const Matrix& a) {
    Matrix p = a;
    Vector v(n, 1.0);
    Vector prev;
    for (int s = 0; s < 64; ++s) {
      p = p * p;
      double m = *std::max_element(p.data().begin(), p.data().end());
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) p(i, j) /= m;
      prev = v;
      v = p.apply(Vector(n, 1.0));
      if (std::any_of(v.begin(), v.end(), [](double x) { return !(x > 0.0); })) return prev;
      scale_to_max(v);
      if (s > 0 && hilbert_distance(prev, v) < 1e-10) break;
    }
    return v;
  };

  long total = 0;
  auto iterate = [&](const Matrix& a, Vector v) {
    if (std::any_of(v.begin(), v.end(), [](double x) { return !(x > 0.0); })) v.assign(n, 1.0);
    double step = kInf;
    long it = 0;
    while (it < options.max_iter) {
      Vector next = a.apply(v);
      scale_to_max(next);
      step = hilbert_distance(v, next);
      v = std::move(next);
      ++it;
      if (step < options.tol) break;
    }
    total += it;
    if (!(step < options.tol))
      throw ConvergenceError(ErrorCode::NotConverged,
                             "power iteration did not converge (last Hilbert step " + std::to_string(step) + ")", step,
                             it);
    return v;
  };

  Vector right = iterate(k, warm_start(k));
  Vector left = iterate(kt, warm_start(kt));

  // Geometric mean of phi is 1, then <phihat, phi> = 1.
  double mean_log = 0.0;
  for (double x : right) mean_log += std::log(x);
  mean_log /= static_cast<double>(n);
  for (double& x : right) x *= std::exp(-mean_log);
  CompensatedSum dot;
  for (std::size_t i = 0; i < n; ++i) dot.add(left[i] * right[i]);
  const double d = dot.value();
  for (double& x : left) x /= d;

  // Rayleigh-style quotient <phihat, K phi> / <phihat, phi> on the scaled kernel.
  const Vector kr = k.apply(right);
  CompensatedSum num;
  for (std::size_t i = 0; i < n; ++i) num.add(left[i] * kr[i]);
  PerronData out;
  out.lambda = num.value() * std::exp(log_top);
  out.right = std::move(right);
  out.left = std::move(left);
  out.iterations = total;
  out.primitivity_exponent = cert.exponent;
  return out;
}

double topological_entropy_rate(const Kernel& adjacency) { return std::log(perron(adjacency).lambda); }

SpectralChain maximal_entropy_chain(const Kernel& kernel) {
  PerronData pd = perron(kernel);
  const std::size_t n = kernel.size();
  Matrix r(n, n);
  const double log_lambda = std::log(pd.lambda);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (kernel.support(i, j))
        r(i, j) = std::exp(kernel.log_value(i, j) - log_lambda + std::log(pd.right[j]) - std::log(pd.right[i]));
  Vector mu(n);
  for (std::size_t i = 0; i < n; ++i) mu[i] = pd.left[i] * pd.right[i];
  Distribution stationary = Distribution::validate(mu);
  return {std::move(pd), {std::move(r), std::move(stationary)}};
}

SpectralChain ruelle_bowen_chain(const Kernel& adjacency) { return maximal_entropy_chain(adjacency); }

PathMeasure ruelle_bowen(const Kernel& adjacency, std::size_t horizon) {
  if (horizon == 0) fail(ErrorCode::InvalidArgument, "horizon must be >= 1");
  SpectralChain sc = ruelle_bowen_chain(adjacency);
  return PathMeasure::time_homogeneous(sc.chain.stationary.weights(), Kernel::from_linear(sc.chain.transition),
                                       horizon);
}

SpectralChain weighted_pressure_chain(const WeightedDigraph& graph, double temperature) {
  return maximal_entropy_chain(boltzmann_kernel(graph, temperature));
}

PathMeasure weighted_pressure_measure(const WeightedDigraph& graph, double temperature, std::size_t horizon) {
  if (horizon == 0) fail(ErrorCode::InvalidArgument, "horizon must be >= 1");
  SpectralChain sc = weighted_pressure_chain(graph, temperature);
  return PathMeasure::time_homogeneous(sc.chain.stationary.weights(), Kernel::from_linear(sc.chain.transition),
                                       horizon);
}

double entropy_rate(const StationaryChain& chain) {
  CompensatedSum h;
  const Matrix& r = chain.transition;
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = 0; j < r.cols(); ++j) h.add(-chain.stationary[i] * xlogx(r(i, j)));
  return h.value();
}

double energy_rate(const StationaryChain& chain, const WeightedDigraph& graph, double temperature) {
  if (!(temperature > 0.0)) fail(ErrorCode::NonPositiveTemperature, "temperature must be positive");
  CompensatedSum u;
  const Matrix& r = chain.transition;
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = 0; j < r.cols(); ++j)
      if (r(i, j) > 0.0) u.add(chain.stationary[i] * r(i, j) * graph.length(i, j) / temperature);
  return u.value();
}

}  // namespace sbridge
