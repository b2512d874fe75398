#include "sbridge/logmath.hpp"

#include <algorithm>

#include "sbridge/error.hpp"

namespace sbridge {

double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  if (m == kInf) return kInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

Vector log_of(std::span<const double> x) {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = safe_log(x[i]);
  return out;
}

Vector exp_of(std::span<const double> lx) {
  Vector out(lx.size());
  for (std::size_t i = 0; i < lx.size(); ++i) out[i] = safe_exp(lx[i]);
  return out;
}

Vector log_apply(const Matrix& log_a, std::span<const double> log_x) {
  if (log_x.size() != log_a.cols())
    fail(ErrorCode::DimensionMismatch, "log matrix-vector size mismatch");
  Vector out(log_a.rows());
  Vector terms(log_a.cols());
  for (std::size_t i = 0; i < log_a.rows(); ++i) {
    for (std::size_t j = 0; j < log_a.cols(); ++j) terms[j] = log_a(i, j) + log_x[j];
    out[i] = log_sum_exp(terms);
  }
  return out;
}

Vector log_apply_transpose(const Matrix& log_a, std::span<const double> log_x) {
  if (log_x.size() != log_a.rows())
    fail(ErrorCode::DimensionMismatch, "log matrix-vector size mismatch");
  Vector out(log_a.cols());
  Vector terms(log_a.rows());
  for (std::size_t j = 0; j < log_a.cols(); ++j) {
    for (std::size_t i = 0; i < log_a.rows(); ++i) terms[i] = log_a(i, j) + log_x[i];
    out[j] = log_sum_exp(terms);
  }
  return out;
}

Matrix log_matmul(const Matrix& log_a, const Matrix& log_b) {
  if (log_a.cols() != log_b.rows())
    fail(ErrorCode::DimensionMismatch, "log matrix product size mismatch");
  Matrix c(log_a.rows(), log_b.cols());
  Vector terms(log_a.cols());
  for (std::size_t i = 0; i < log_a.rows(); ++i)
    for (std::size_t j = 0; j < log_b.cols(); ++j) {
      for (std::size_t k = 0; k < log_a.cols(); ++k) terms[k] = log_a(i, k) + log_b(k, j);
      c(i, j) = log_sum_exp(terms);
    }
  return c;
}

double compensated_sum(std::span<const double> v) {
  CompensatedSum s;
  for (double x : v) s.add(x);
  return s.value();
}

double relative_entropy(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) fail(ErrorCode::DimensionMismatch, "relative entropy size mismatch");
  CompensatedSum s;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return kInf;
    s.add(p[i] * (std::log(p[i]) - std::log(q[i])));
  }
  return s.value();
}

double entropy(std::span<const double> p) {
  CompensatedSum s;
  for (double x : p) s.add(-xlogx(x));
  return s.value();
}

}  // namespace sbridge
