#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace hcot {

/// Dense row-major matrix of doubles. Used for the Kalman filter algebra and,
/// with one row per token, for token sequences.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);
  static Matrix column(std::span<const double> v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  Matrix transpose() const;
  /// Gauss-Jordan with partial pivoting; throws Error(Singular) when a pivot
  /// falls below `tolerance` relative to the largest entry.
  Matrix inverse(double tolerance = 1e-12) const;

  /// Rows [begin, begin + count).
  Matrix slice_rows(std::size_t begin, std::size_t count) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

/// Stacks `top` above `bottom`; column counts must match.
Matrix vstack(const Matrix& top, const Matrix& bottom);
/// Places `left` beside `right`; row counts must match.
Matrix hstack(const Matrix& left, const Matrix& right);

double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace hcot
