#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sbridge {

using Vector = std::vector<double>;

// Dense row-major matrix. Small by design: the solvers here work at desk
// scale and mostly in the log domain, where BLAS does not help.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<Vector>& rows);
  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  const Vector& data() const noexcept { return data_; }
  Vector& data() noexcept { return data_; }

  Matrix transpose() const;
  Vector row_sums() const;
  Vector col_sums() const;

  // Linear-domain products.
  Vector apply(std::span<const double> x) const;             // A x
  Vector apply_transpose(std::span<const double> x) const;   // A^T x
  Matrix operator*(const Matrix& other) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

}  // namespace sbridge
