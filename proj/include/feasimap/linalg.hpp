#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace feasimap {

/// Dense row-major matrix of doubles. Small problems only (n <= a few
/// hundred); storage is a flat vector.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// In-place lower Cholesky of a symmetric matrix (upper triangle is zeroed).
/// Returns false if a non-positive pivot is hit.
bool cholesky_lower(Matrix& a);

/// Solve L x = b in place (L lower triangular).
void solve_lower(const Matrix& l, std::span<double> x);

/// Solve L^T x = b in place.
void solve_lower_transpose(const Matrix& l, std::span<double> x);

/// log det(L L^T) = 2 sum log L_ii.
double log_det_from_cholesky(const Matrix& l);

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvectors are the columns of `vectors`; eigenvalues ascend.
void symmetric_eigen(const Matrix& a, Matrix& vectors, std::vector<double>& values);

}  // namespace feasimap
