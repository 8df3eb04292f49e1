#pragma once

#include <complex>
#include <array>
#include <span>
#include <vector>

#include "aitk/common.hpp"

namespace aitk::linalg {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols);
  Matrix(int rows, int cols, std::vector<double> entries);

  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return data_[idx(i, j)]; }
  double operator()(int i, int j) const { return data_[idx(i, j)]; }

  double* row(int i) { return data_.data() + static_cast<std::size_t>(i) * cols_; }
  const double* row(int i) const {
    return data_.data() + static_cast<std::size_t>(i) * cols_;
  }

  const std::vector<double>& data() const { return data_; }

  std::vector<double> apply(std::span<const double> x) const;            // A x
  std::vector<double> apply_transposed(std::span<const double> x) const; // A^T x

  double inf_norm() const;

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * cols_ + j;
  }
  int rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

/// Householder QR with the orthogonal factor held explicitly so rank-one
/// updates can be applied with Givens sweeps.
class QRFactors {
 public:
  const Matrix& q() const { return q_; }
  const Matrix& r() const { return r_; }
  int rows() const { return q_.rows(); }
  int cols() const { return r_.cols(); }

  /// B x for the represented matrix B = Q R.
  std::vector<double> apply(std::span<const double> x) const;

  /// In-place rank-one update of the factored matrix: B <- B + u v^T.
  void rank_one_update(std::span<const double> u, std::span<const double> v);

  int updates_since_factor() const { return updates_; }
  /// Set when an update's secant check failed; callers should refactor.
  bool degraded() const { return degraded_; }

  double max_abs_r_diag() const;
  double min_abs_r_diag() const;

 private:
  friend QRFactors qr_factor(const Matrix& a);
  friend QRFactors broyden_update(QRFactors f, std::span<const double> dx,
                                  std::span<const double> df);
  Matrix q_, r_;
  int updates_ = 0;
  bool degraded_ = false;
};

/// Factors A (rows >= cols) as Q R by Householder reflections.
QRFactors qr_factor(const Matrix& a);

/// Solves the square factored system B x = b by x = R^{-1} Q^T b. Throws
/// NumericalError when a diagonal of R falls below 1e-12 of the largest.
std::vector<double> solve(const QRFactors& f, std::span<const double> b);

/// Quasi-Newton factor update: factors of B + (df - B dx) dx^T / (dx^T dx).
QRFactors broyden_update(QRFactors f, std::span<const double> dx,
                         std::span<const double> df);

/// Eigenvalues of a 3x3 matrix (row-major) via the closed-form cubic, with a
/// Newton polish.
std::array<std::complex<double>, 3> eig3(const std::array<double, 9>& a);

double inf_norm(std::span<const double> v);
double two_norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

/// Determinant by partially pivoted elimination.
double determinant(Matrix a);

/// Estimate of the smallest singular value by a few inverse iterations on a
/// precomputed factorization; returns 0 when the system is numerically
/// singular.
double smallest_singular_value_estimate(const Matrix& a, std::uint64_t seed = 7);

}  // namespace aitk::linalg
