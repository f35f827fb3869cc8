#include "rttqe/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rttqe/error.hpp"

namespace rttqe::linalg {
namespace {

constexpr double kRankTolerance = 1e-12;

// Applies pinv(G) restricted to the leading `rank` eigenpairs.
std::vector<double> apply_pseudo_inverse(const SymmetricEigen& eigen, std::size_t rank,
                                         std::span<const double> b) {
  const std::size_t n = b.size();
  std::vector<double> x(n, 0.0);
  for (std::size_t k = 0; k < rank; ++k) {
    double projection = 0.0;
    for (std::size_t i = 0; i < n; ++i) projection += eigen.vectors(i, k) * b[i];
    projection /= eigen.values[k];
    for (std::size_t i = 0; i < n; ++i) x[i] += projection * eigen.vectors(i, k);
  }
  return x;
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::gram() const {
  Matrix g(cols_, cols_);
  for (std::size_t i = 0; i < cols_; ++i) {
    for (std::size_t j = i; j < cols_; ++j) {
      double sum = 0.0;
      for (std::size_t r = 0; r < rows_; ++r) sum += (*this)(r, i) * (*this)(r, j);
      g(i, j) = sum;
      g(j, i) = sum;
    }
  }
  return g;
}

std::vector<double> Matrix::transpose_times(std::span<const double> v) const {
  std::vector<double> out(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out[c] += (*this)(r, c) * v[r];
  }
  return out;
}

std::vector<double> Matrix::times(std::span<const double> v) const {
  std::vector<double> out(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out[r] += (*this)(r, c) * v[c];
  }
  return out;
}

SymmetricEigen symmetric_eigen(const Matrix& input) {
  const std::size_t n = input.rows();
  if (input.cols() != n) throw ValidationError("eigendecomposition needs a square matrix");
  Matrix a = input;
  Matrix v = Matrix::identity(n);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off == 0.0) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  SymmetricEigen out;
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values.push_back(a(order[k], order[k]));
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

std::optional<Matrix> cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  Matrix lower(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diagonal = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diagonal -= lower(j, k) * lower(j, k);
    if (!(diagonal > 0.0)) return std::nullopt;
    lower(j, j) = std::sqrt(diagonal);
    for (std::size_t i = j + 1; i < n; ++i) {
      double sum = a(i, j);
      for (std::size_t k = 0; k < j; ++k) sum -= lower(i, k) * lower(j, k);
      lower(i, j) = sum / lower(j, j);
    }
  }
  return lower;
}

std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b) {
  const std::size_t n = lower.rows();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = b[i];
    for (std::size_t k = 0; k < i; ++k) sum -= lower(i, k) * y[k];
    y[i] = sum / lower(i, i);
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double sum = y[i];
    for (std::size_t k = i + 1; k < n; ++k) sum -= lower(k, i) * x[k];
    x[i] = sum / lower(i, i);
  }
  return x;
}

LeastSquaresSolution least_squares(const Matrix& design, std::span<const double> target) {
  const std::size_t rows = design.rows();
  const std::size_t cols = design.cols();
  if (rows == 0 || cols == 0) throw ValidationError("least squares needs a nonempty design");
  if (target.size() != rows) throw ValidationError("target length does not match design rows");

  // Equilibrate columns so rank detection does not depend on feature units.
  std::vector<double> scale(cols);
  for (std::size_t c = 0; c < cols; ++c) {
    double norm = 0.0;
    for (std::size_t r = 0; r < rows; ++r) norm += design(r, c) * design(r, c);
    scale[c] = norm > 0.0 ? std::sqrt(norm) : 1.0;
  }
  Matrix scaled = design;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) scaled(r, c) /= scale[c];
  const Matrix scaled_gram = scaled.gram();
  const SymmetricEigen scaled_eigen = symmetric_eigen(scaled_gram);
  const double largest = std::max(scaled_eigen.values.front(), 0.0);
  std::size_t rank = 0;
  for (double value : scaled_eigen.values) {
    if (value > largest * kRankTolerance * static_cast<double>(cols)) ++rank;
  }

  auto residual_normal = [&](const std::vector<double>& x) {
    std::vector<double> residual(target.begin(), target.end());
    const std::vector<double> fitted = design.times(x);
    for (std::size_t r = 0; r < rows; ++r) residual[r] -= fitted[r];
    return design.transpose_times(residual);
  };

  LeastSquaresSolution solution;
  solution.rank = rank;
  solution.rank_deficient = rank < cols;

  if (!solution.rank_deficient) {
    if (auto lower = cholesky(scaled_gram)) {
      auto solve = [&](std::vector<double> rhs) {
        for (std::size_t c = 0; c < cols; ++c) rhs[c] /= scale[c];
        std::vector<double> y = cholesky_solve(*lower, rhs);
        for (std::size_t c = 0; c < cols; ++c) y[c] /= scale[c];
        return y;
      };
      std::vector<double> x = solve(design.transpose_times(target));
      const std::vector<double> correction = solve(residual_normal(x));
      for (std::size_t c = 0; c < cols; ++c) x[c] += correction[c];
      solution.coefficients = std::move(x);
      return solution;
    }
    solution.rank_deficient = true;
    solution.rank = cols - 1;
  }

  // Minimum-norm solution in the original coordinates: x = pinv(AᵀA)·Aᵀt,
  // keeping as many eigenpairs as the equilibrated problem showed to be
  // numerically significant.
  const SymmetricEigen eigen = symmetric_eigen(design.gram());
  const std::size_t keep = std::min(solution.rank, eigen.values.size());
  std::vector<double> x = apply_pseudo_inverse(eigen, keep, design.transpose_times(target));
  const std::vector<double> correction = apply_pseudo_inverse(eigen, keep, residual_normal(x));
  for (std::size_t c = 0; c < cols; ++c) x[c] += correction[c];
  solution.coefficients = std::move(x);
  return solution;
}

}  // namespace rttqe::linalg
