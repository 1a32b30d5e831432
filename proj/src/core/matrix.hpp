#pragma once

#include <cstddef>
#include <vector>

#include "common.hpp"

namespace tsforge {

// Minimal row-major dense matrix. Enough for the lag designs and the small
// normal-equation solves used here; not a general linear algebra layer.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  std::vector<double> row(std::size_t r) const {
    return std::vector<double>(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                               data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Solves (XᵀX + ridge·I) W = XᵀY for W (cols(X) × cols(Y)) via Cholesky.
// Throws TsError if the regularized Gram matrix is not positive definite.
Matrix ridge_solve(const Matrix& x, const Matrix& y, double ridge);

}  // namespace tsforge
