#include "sbridge/hilbert.hpp"

#include <algorithm>
#include <cmath>

#include "sbridge/error.hpp"
#include "sbridge/logmath.hpp"

namespace sbridge {

double hilbert_distance_log(std::span<const double> log_x, std::span<const double> log_y) {
  if (log_x.size() != log_y.size()) fail(ErrorCode::DimensionMismatch, "Hilbert distance size mismatch");
  double hi = kNegInf;
  double lo = kInf;
  for (std::size_t i = 0; i < log_x.size(); ++i) {
    const bool zx = log_x[i] == kNegInf;
    const bool zy = log_y[i] == kNegInf;
    if (zx && zy) continue;
    if (zx != zy) return kInf;
    const double r = log_x[i] - log_y[i];
    hi = std::max(hi, r);
    lo = std::min(lo, r);
  }
  if (hi == kNegInf) return 0.0;
  return hi - lo;
}

double hilbert_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorCode::DimensionMismatch, "Hilbert distance size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < 0.0 || y[i] < 0.0) fail(ErrorCode::InvalidArgument, "Hilbert distance needs nonnegative vectors");
  return hilbert_distance_log(log_of(x), log_of(y));
}

double thompson_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorCode::DimensionMismatch, "Thompson distance size mismatch");
  double hi = kNegInf;
  double lo = kInf;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0.0 || y[i] < 0.0) fail(ErrorCode::InvalidArgument, "Thompson distance needs nonnegative vectors");
    const bool zx = x[i] == 0.0;
    const bool zy = y[i] == 0.0;
    if (zx && zy) continue;
    if (zx != zy) return kInf;
    const double r = std::log(x[i]) - std::log(y[i]);
    hi = std::max(hi, r);
    lo = std::min(lo, r);
  }
  if (hi == kNegInf) return 0.0;
  return std::max(hi, -lo);
}

double projective_diameter_log(const Matrix& log_g) {
  const std::size_t rows = log_g.rows();
  const std::size_t cols = log_g.cols();
  for (double v : log_g.data())
    if (v == kNegInf) fail(ErrorCode::ZeroEntry, "projective diameter is infinite: kernel has a zero entry");
  // Delta = max_{j,l} [ max_i (g_ij - g_il) + max_k (g_kl - g_kj) ] in logs;
  // the two inner maxima are the same table read at (j,l) and (l,j).
  Matrix spread(cols, cols, kNegInf);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t l = 0; l < cols; ++l) {
      double m = kNegInf;
      for (std::size_t i = 0; i < rows; ++i) m = std::max(m, log_g(i, j) - log_g(i, l));
      spread(j, l) = m;
    }
  double delta = 0.0;
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t l = 0; l < cols; ++l) delta = std::max(delta, spread(j, l) + spread(l, j));
  return delta;
}

double projective_diameter(const Kernel& kernel) { return projective_diameter_log(kernel.log_entries()); }

double contraction_ratio_from_diameter(double diameter) {
  if (!(diameter >= 0.0)) fail(ErrorCode::InvalidArgument, "diameter must be >= 0");
  if (diameter == kInf) return 1.0;
  return std::tanh(diameter / 4.0);
}

double contraction_ratio(const Kernel& kernel) {
  return contraction_ratio_from_diameter(projective_diameter(kernel));
}

}  // namespace sbridge
