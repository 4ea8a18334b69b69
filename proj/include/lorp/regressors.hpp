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

#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "lorp/linalg.hpp"

namespace lorp {

/// Observed data: n design points of p coordinates (rows of x) and n responses.
struct Dataset {
  DenseMatrix x;
  Vector y;

  std::size_t size() const noexcept { return y.size(); }
  std::size_t dim() const noexcept { return x.cols(); }
  /// Throws unless n >= 2, x has n rows and every value is finite.
  void validate() const;
};

enum class Family { knn, knn_prime, kernel, basis_projection, spline };

std::string_view to_string(Family f);

/// A hat matrix M (yhat = M y) together with where it came from.
struct RegressorMatrix {
  DenseMatrix m;
  Family family = Family::basis_projection;
  double complexity = 0.0;

  std::size_t size() const noexcept { return m.rows(); }
};

/// Distance used for neighbour search. `circular` is the 1-d wrap-around
/// distance min(|a-b| mod period, period - |a-b| mod period).
struct Metric {
  enum class Kind { euclidean, circular } kind = Kind::euclidean;
  double period = 0.0;

  static Metric circular(double period) { return {Kind::circular, period}; }
  double distance(std::span<const double> a, std::span<const double> b) const;
};

/// Neighbour order of point i: itself first, then by distance, ties broken
/// by smaller index.
std::vector<std::size_t> neighbour_order(const DenseMatrix& x, std::size_t i, const Metric& metric);

/// M_ij = 1/k for the k nearest neighbours of x_i (x_i included).
RegressorMatrix knn_matrix(const DenseMatrix& x, std::size_t k, const Metric& metric = {});

/// Like knn_matrix but skipping the closest neighbour (x_i itself), so the
/// diagonal is identically zero.
RegressorMatrix knn_prime_matrix(const DenseMatrix& x, std::size_t k, const Metric& metric = {});

/// Nadaraya-Watson weights with a Gaussian kernel of the given width.
RegressorMatrix kernel_matrix(const DenseMatrix& x, double width);

/// Orthogonal projection onto the column span of the n x d feature matrix.
/// A matrix with zero columns gives the zero regressor.
RegressorMatrix basis_projection_matrix(const DenseMatrix& features);

/// Smoothing-spline hat matrix for 1-d design points (any order, no ties).
RegressorMatrix spline_matrix(std::span<const double> x, double lambda);

using FeatureMap = std::function<Vector(std::span<const double>)>;

/// 1, t, ..., t^{d-1} evaluated through Chebyshev polynomials of the point
/// mapped from [lo, hi] to [-1, 1]; the column span is the polynomial one.
FeatureMap polynomial_feature_map(std::size_t d, double lo, double hi);

/// Rows phi(x_i)^T for every design point.
DenseMatrix feature_matrix(const FeatureMap& phi, const DenseMatrix& x);

/// Natural cubic spline machinery on sorted distinct knots.
namespace spline {

/// N_ij = N_j(x_i) with N_1 = 1, N_2 = x, N_{k+2} = d_k - d_{n-1}.
DenseMatrix natural_basis(std::span<const double> knots);

/// N_j''(t) of the basis above (j is 0-based).
double natural_basis_second_derivative(std::span<const double> knots, std::size_t j, double t);

/// Omega_ij = integral of N_i'' N_j'', exact (products of piecewise-linear
/// functions integrated interval by interval).
DenseMatrix natural_penalty(std::span<const double> knots);

/// Reinsch penalty K with f^T K f = integral of f''^2 for the natural
/// interpolating spline through values f at the knots.
DenseMatrix reinsch_penalty(std::span<const double> knots);

/// Hat matrices (I + lambda K)^-1 for a sweep of lambda, sharing one
/// eigendecomposition of K.
class Smoother {
 public:
  explicit Smoother(std::span<const double> knots);

  std::size_t size() const noexcept { return eigenvalues_.size(); }
  DenseMatrix hat_matrix(double lambda) const;
  /// Eigenvalues of the hat matrix, 1 / (1 + lambda kappa_i).
  Vector hat_eigenvalues(double lambda) const;
  double trace(double lambda) const;

 private:
  Vector eigenvalues_;
  DenseMatrix eigenvectors_;
};

}  // namespace spline

/// Everything needed to rebuild a regressor on any design: family,
/// complexity parameter, metric and, for basis_projection, the feature map.
struct RegressorSpec {
  Family family = Family::knn;
  double complexity = 1.0;
  Metric metric{};
  FeatureMap features{};

  RegressorMatrix build(const DenseMatrix& x) const;
};

/// Standard off-data prediction sum_j m_j(x0, x) y_j of the family.
double predict(const RegressorSpec& spec, std::span<const double> x0, const Dataset& data);

/// Self-consistent off-data prediction: builds M' on (x0, x) and returns
/// sum_{j>=1} M'_0j y_j / (1 - M'_00). Throws DegeneratePredictionError when
/// M'_00 >= 1 - 1e-10.
double canonical_predict(const RegressorSpec& spec, std::span<const double> x0, const Dataset& data);

/// Design with the query point prepended as row 0.
DenseMatrix prepend_point(std::span<const double> x0, const DenseMatrix& x);

}  // namespace lorp
