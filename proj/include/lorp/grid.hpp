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
#include <functional>

#include "lorp/linalg.hpp"

namespace lorp {

/// kNN on the regular torus {1..n1}^dim with cubic neighbourhoods of side k1.
struct GridSpec {
  std::size_t n1 = 0;
  std::size_t k1 = 1;
  std::size_t dim = 1;

  /// k1 odd, 1 <= k1 <= n1, dim >= 1.
  void validate() const;
  double n() const;
  double k() const;
};

/// 1-d circulant kNN matrix on n1 points of a circle.
DenseMatrix circulant_knn_matrix(std::size_t n1, std::size_t k1);

/// Eigenvalues b_l = sin(pi l k1/n1) / (k1 sin(pi l/n1)), l = 1..n1, with
/// b_{n1} = 1 (entry l-1 of the result).
Vector circulant_eigs(std::size_t n1, std::size_t k1);

/// -(k1/n1) sum_{l<n1} log(1 - b_l): the normalized -log det'(I - M) in 1-d.
double c1_exact(std::size_t n1, std::size_t k1);

/// The n1 -> infinity limit at fixed k1 (odd, >= 3), by quadrature.
double c1_limit_k(std::size_t k1, double tol = 1e-10);

/// The k1 -> infinity limit of c1_limit_k.
double c1_limit(double tol = 1e-10);

/// -log det'(I - M) for the dim-fold tensor product: the sum of
/// -log(1 - b_{l_1} ... b_{l_dim}) over every index tuple except the one with
/// all l_a = n1. Throws BudgetError beyond `budget` tuples.
double torus_logdet(const GridSpec& spec, std::size_t budget = 10'000'000);

/// (k1/n1) tr(M1^s). Closed walks are counted exactly while k1^s fits in a
/// double mantissa; beyond that the eigenvalue power sum is used.
double taylor_A(std::size_t n1, std::size_t k1, std::size_t s);

/// sum_{s <= s_max} (A_s^dim - k/n) / s, the truncated series for the
/// normalized torus log-determinant.
double c_d_taylor(const GridSpec& spec, std::size_t s_max);

/// dim -> infinity limit of c_d_taylor: sum of 1/s over the s <= s_max with
/// A_s exactly 1.
double c_d_taylor_dim_limit(std::size_t n1, std::size_t k1, std::size_t s_max = 64);

/// Adaptive Simpson quadrature; throws AccuracyError if the recursion depth
/// runs out before the error estimate meets tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 50);

}  // namespace lorp
