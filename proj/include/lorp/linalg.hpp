/*
 * Copyright (c) 2026, The lorp authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace lorp {

using Vector = std::vector<double>;

/// Dense real matrix, row-major.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> d);
  /// n x 1 column built from a vector.
  static DenseMatrix column(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  Vector col(std::size_t j) const;

  const std::vector<double>& entries() const noexcept { return data_; }

  DenseMatrix transposed() const;
  double trace() const;
  double frobenius_norm() const;
  bool all_finite() const;

  DenseMatrix& operator+=(const DenseMatrix& o);
  DenseMatrix& operator-=(const DenseMatrix& o);
  DenseMatrix& operator*=(double s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(double s, DenseMatrix a);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
Vector operator*(const DenseMatrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2_squared(std::span<const double> a);
/// Quadratic form x^T A x.
double quadratic_form(const DenseMatrix& a, std::span<const double> x);
/// A^T A.
DenseMatrix gram(const DenseMatrix& a);
/// Largest |A_ij - A_ji| relative to the largest |A_ij| (0 for the zero matrix).
double asymmetry(const DenseMatrix& a);

/// Eigenvalues of a symmetric matrix, nondecreasing, plus the count of
/// eigenvalues at or below the zero-mode tolerance.
struct Spectrum {
  Vector eigenvalues;
  std::size_t zero_mode_count = 0;
  double zero_tolerance = 0.0;
  /// Column j is the unit eigenvector of eigenvalues[j] (when requested).
  std::optional<DenseMatrix> eigenvectors;

  std::size_t size() const noexcept { return eigenvalues.size(); }
  double sum() const;
};

struct SymEigOptions {
  /// Relative asymmetry accepted before rejecting the input.
  double symmetry_tol = 1e-10;
  /// Zero modes are eigenvalues <= zero_tol_rel * max|eigenvalue|.
  double zero_tol_rel = 1e-10;
  /// Absolute override for the zero-mode tolerance.
  std::optional<double> zero_tol_abs;
  bool want_vectors = false;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
Spectrum sym_eig(const DenseMatrix& a, const SymEigOptions& opts = {});

/// Lower-triangular Cholesky factor; throws DefinitenessError.
DenseMatrix cholesky(const DenseMatrix& a);

/// log det of a symmetric positive-definite matrix via Cholesky.
double log_det_psd(const DenseMatrix& a);

/// Solves A x = b for SPD A via Cholesky; throws SingularityError.
Vector solve_spd(const DenseMatrix& a, std::span<const double> b);
DenseMatrix solve_spd(const DenseMatrix& a, const DenseMatrix& b);

/// log |det A| of a general square matrix via partially pivoted LU.
/// Throws SingularityError when a pivot vanishes.
double log_abs_det(const DenseMatrix& a);

/// Solves A X = B for general square A via LU; throws SingularityError.
DenseMatrix solve(const DenseMatrix& a, const DenseMatrix& b);

/// Thin Householder QR of an m x n matrix, m >= n.
struct QrDecomposition {
  DenseMatrix q;  // m x n, orthonormal columns
  DenseMatrix r;  // n x n, upper triangular
};

/// Throws RankError naming the first column whose |R_jj| falls below
/// rank_tol * max_i |R_ii|.
QrDecomposition thin_qr(const DenseMatrix& a, double rank_tol = 1e-10);

}  // namespace lorp
