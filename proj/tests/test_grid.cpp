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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lorp/errors.hpp"
#include "lorp/grid.hpp"
#include "lorp/regressors.hpp"

using namespace lorp;

namespace {

// -log det' of I - M from a dense symmetric eigensolve, dropping eigenvalues of I - M near 0.
double dense_restricted_logdet(const DenseMatrix& m) {
  double s = 0.0;
  for (double v : sym_eig(DenseMatrix::identity(m.rows()) - m, {.symmetry_tol = 1e-9}).eigenvalues)
    if (std::abs(v) > 1e-9) s -= std::log(v);
  return s;
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q) out(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
  return out;
}

}  // namespace

TEST_CASE("circulant spectrum matches the dense matrix") {
  for (auto [n1, k1] : {std::pair<std::size_t, std::size_t>{5, 3}, {12, 5}, {17, 7}, {9, 9}}) {
    Vector b = circulant_eigs(n1, k1);
    std::sort(b.begin(), b.end());
    const auto e = sym_eig(circulant_knn_matrix(n1, k1)).eigenvalues;
    for (std::size_t i = 0; i < n1; ++i) CHECK(std::abs(b[i] - e[i]) < 1e-10);
    for (double v : b) CHECK(std::abs(v) <= 1.0 + 1e-15);
  }
  // The explicit matrix agrees with circular kNN on 1..5.
  DenseMatrix x(5, 1, Vector{1, 2, 3, 4, 5});
  const auto m = knn_matrix(x, 3, Metric::circular(5.0)).m;
  const auto c = circulant_knn_matrix(5, 3);
  for (std::size_t i = 0; i < 25; ++i) CHECK(m.entries()[i] == c.entries()[i]);
}

TEST_CASE("circulant spectrum edge cases") {
  for (double v : circulant_eigs(7, 1)) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  const Vector g = circulant_eigs(7, 7);
  for (std::size_t l = 0; l < 6; ++l) CHECK(std::abs(g[l]) < 1e-15);
  CHECK(g[6] == 1.0);
  CHECK_THROWS_AS(circulant_eigs(7, 4), ParameterError);
  CHECK_THROWS_AS(circulant_eigs(7, 9), ParameterError);

  const Vector b = circulant_eigs(31, 5);
  CHECK(std::count_if(b.begin(), b.end(), [](double v) { return std::abs(v - 1.0) < 1e-12; }) == 1);
}

TEST_CASE("c1_exact") {
  const Vector b = circulant_eigs(5, 3);
  const double direct = -(3.0 / 5.0) * (std::log(1 - b[0]) + std::log(1 - b[1]) + std::log(1 - b[2]) + std::log(1 - b[3]));
  CHECK(c1_exact(5, 3) == doctest::Approx(direct).epsilon(1e-14));

  const double dense = dense_restricted_logdet(circulant_knn_matrix(64, 5));
  CHECK(std::abs(64.0 / 5.0 * c1_exact(64, 5) - dense) < 1e-8);

  // O(k log n / n) finite-size bias: checked at n = 30001.
  CHECK(std::abs(c1_exact(30001, 3) - 3 * std::log(3.0)) < 5e-3);
  CHECK_THROWS_AS(c1_exact(7, 1), SingularityError);
}

TEST_CASE("c1 limits") {
  const double c3 = c1_limit_k(3);
  CHECK(std::abs(c3 - 3 * std::log(3.0)) < 1e-3);
  CHECK(std::abs(c3 - 3 * std::log(3.0)) < 1e-8);
  const double c9 = c1_limit_k(9);
  const double cinf = c1_limit();
  CHECK(std::abs(cinf - 3.202) < 0.01);
  CHECK(c3 > c9);
  CHECK(c9 > cinf);
  CHECK(c1_limit_k(101) == doctest::Approx(cinf).epsilon(1e-3));
  // Large-n exact sums approach the k-limit.
  CHECK(std::abs(c1_exact(200001, 9) - c9) < 2e-3);
  CHECK_THROWS_AS(c1_limit_k(4), ParameterError);
}

TEST_CASE("torus log-det") {
  CHECK(torus_logdet({41, 5, 1}) == doctest::Approx(41.0 / 5.0 * c1_exact(41, 5)).epsilon(1e-12));

  const auto m1 = circulant_knn_matrix(31, 3);
  const double dense = dense_restricted_logdet(kron(m1, m1));
  CHECK(std::abs(torus_logdet({31, 3, 2}) - dense) < 1e-6);

  const GridSpec big{801, 31, 2};
  CHECK(std::abs(big.k() / big.n() * torus_logdet(big) - 2.2) < 0.1);
  CHECK_THROWS_AS(torus_logdet({1001, 3, 3}), BudgetError);
}

TEST_CASE("Taylor coefficients") {
  for (auto [n1, k1] : {std::pair<std::size_t, std::size_t>{5, 3}, {31, 3}, {101, 7}, {1001, 31}, {9, 7}}) {
    CHECK(taylor_A(n1, k1, 1) == 1.0);
    CHECK(taylor_A(n1, k1, 2) == 1.0);
    for (std::size_t s = 3; s < 8; ++s) CHECK(taylor_A(n1, k1, s) < 1.0);
  }
  // Walk counts agree with the eigenvalue power sum.
  const Vector b = circulant_eigs(23, 5);
  for (std::size_t s = 1; s < 10; ++s) {
    double sum = 0;
    for (double v : b) sum += std::pow(v, static_cast<double>(s));
    CHECK(taylor_A(23, 5, s) == doctest::Approx(5.0 / 23.0 * sum).epsilon(1e-12));
  }
  CHECK(c_d_taylor_dim_limit(101, 3) == 1.5);
  CHECK(c_d_taylor_dim_limit(1001, 31) == 1.5);
}

TEST_CASE("Taylor series for the normalized log-det") {
  CHECK(std::abs(c_d_taylor({301, 3, 1}, 50000) - c1_exact(301, 3)) < 1e-4);

  const GridSpec g2{31, 3, 2};
  CHECK(std::abs(c_d_taylor(g2, 20000) - g2.k() / g2.n() * torus_logdet(g2)) < 1e-4);

  double prev = INFINITY;
  for (std::size_t d = 1; d <= 6; ++d) {
    const double c = c_d_taylor({101, 3, d}, 4000);
    CHECK(c <= prev);
    prev = c;
  }
  CHECK(c_d_taylor({101, 3, 60}, 200) == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("adaptive Simpson") {
  CHECK(adaptive_simpson([](double t) { return std::exp(t); }, 0, 1, 1e-12) == doctest::Approx(std::exp(1.0) - 1).epsilon(1e-12));
  CHECK_THROWS_AS(adaptive_simpson([](double t) { return 1.0 / t; }, 0.0, 1.0, 1e-12, 10), AccuracyError);
}
