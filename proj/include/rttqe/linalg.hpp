#pragma once

// Small dense linear algebra for regression problems with a handful of
// unknowns. Not intended for large systems.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace rttqe::linalg {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  /// AᵀA
  Matrix gram() const;
  /// Aᵀv
  std::vector<double> transpose_times(std::span<const double> v) const;
  /// Av
  std::vector<double> times(std::span<const double> v) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct SymmetricEigen {
  /// Descending.
  std::vector<double> values;
  /// Column i is the eigenvector of values[i].
  Matrix vectors;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
SymmetricEigen symmetric_eigen(const Matrix& a);

/// Lower-triangular L with LLᵀ = a, or nullopt when a is not numerically
/// positive definite.
std::optional<Matrix> cholesky(const Matrix& a);
std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b);

struct LeastSquaresSolution {
  std::vector<double> coefficients;
  std::size_t rank = 0;
  bool rank_deficient = false;
};

/// Minimizes |design·x − target|² through the normal equations. Full-rank
/// systems are solved by Cholesky on the column-equilibrated Gram matrix;
/// rank-deficient ones resolve to the minimum-norm solution through the
/// eigendecomposition of AᵀA. Both paths finish with one step of iterative
/// refinement against the original design.
LeastSquaresSolution least_squares(const Matrix& design, std::span<const double> target);

}  // namespace rttqe::linalg
