#include "sbridge/matrix.hpp"

#include "sbridge/error.hpp"

namespace sbridge {

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) return {};
  const std::size_t cols = rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols)
      fail(ErrorCode::DimensionMismatch, "ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vector Matrix::row_sums() const {
  Vector s(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) s[i] += (*this)(i, j);
  return s;
}

Vector Matrix::col_sums() const {
  Vector s(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) s[j] += (*this)(i, j);
  return s;
}

Vector Matrix::apply(std::span<const double> x) const {
  if (x.size() != cols_) fail(ErrorCode::DimensionMismatch, "matrix-vector size mismatch");
  Vector y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) acc += (*this)(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

Vector Matrix::apply_transpose(std::span<const double> x) const {
  if (x.size() != rows_) fail(ErrorCode::DimensionMismatch, "matrix-vector size mismatch");
  Vector y(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) y[j] += (*this)(i, j) * x[i];
  return y;
}

Matrix Matrix::operator*(const Matrix& other) const {
  if (cols_ != other.rows_) fail(ErrorCode::DimensionMismatch, "matrix product size mismatch");
  Matrix c(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < other.cols_; ++j) c(i, j) += a * other(k, j);
    }
  return c;
}

}  // namespace sbridge
