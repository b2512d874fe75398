#pragma once

#include <cmath>
#include <limits>
#include <span>

#include "sbridge/matrix.hpp"

namespace sbridge {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// log(x) with log(0) = -inf; x must be >= 0.
inline double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }
inline double safe_exp(double lx) { return lx == kNegInf ? 0.0 : std::exp(lx); }

// log(sum_i exp(v_i)), summed left to right after shifting by the maximum.
// Returns -inf for an empty range or when every term is -inf.
double log_sum_exp(std::span<const double> v);

Vector log_of(std::span<const double> x);
Vector exp_of(std::span<const double> lx);

// Log-domain matrix-vector products: (A x)_i = LSE_j(logA_ij + logx_j).
Vector log_apply(const Matrix& log_a, std::span<const double> log_x);
Vector log_apply_transpose(const Matrix& log_a, std::span<const double> log_x);
Matrix log_matmul(const Matrix& log_a, const Matrix& log_b);

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> v);

// x log x with 0 log 0 = 0.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Sum_i p_i log(p_i / q_i); +inf if some p_i > 0 where q_i = 0.
// q need not be normalized.
double relative_entropy(std::span<const double> p, std::span<const double> q);

// Shannon entropy -Sum p log p.
double entropy(std::span<const double> p);

}  // namespace sbridge
