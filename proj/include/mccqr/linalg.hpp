#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "mccqr/common.hpp"

namespace mccqr {

using Vector = std::vector<double>;

// Dense row-major matrix of 64-bit reals.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  Vector& data() { return data_; }
  const Vector& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

// Standard product with 64-bit accumulation. Throws InvalidArgument naming
// both shapes when a.cols != b.rows.
Matrix matmul(const Matrix& a, const Matrix& b);

bool all_finite(std::span<const double> values);

double mean(std::span<const double> values);
// Population standard deviation (divisor n).
double population_std(std::span<const double> values);
// Median; even length averages the two central order statistics.
double median(std::vector<double> values);
double median_sorted(std::span<const double> sorted);

}  // namespace mccqr
