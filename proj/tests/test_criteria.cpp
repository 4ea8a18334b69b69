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

#include <cmath>
#include <numbers>
#include <random>

#include "lorp/criteria.hpp"
#include "lorp/errors.hpp"
#include "lorp/lossrank.hpp"
#include "lorp/regressors.hpp"

using namespace lorp;

namespace {

DenseMatrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  DenseMatrix a(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) a(i, j) = nd(gen);
  return a;
}

Vector random_vector(std::size_t n, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Vector v(n);
  for (auto& x : v) x = nd(gen);
  return v;
}

DenseMatrix uniform_points(std::size_t n, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0, 1);
  DenseMatrix x(n, 2);
  for (double& v : const_cast<std::vector<double>&>(x.entries())) v = u(gen);
  return x;
}

}  // namespace

TEST_CASE("aic and bic") {
  CHECK(aic(100.0, 100, 3) == doctest::Approx(6.0));
  CHECK(bic(100.0, 100, 3) == doctest::Approx(3 * std::log(100.0)));
  CHECK(aic(7.0, 100, 6) - aic(7.0, 100, 3) == doctest::Approx(6.0));
  CHECK(bic(7.0, 100, 6) - bic(7.0, 100, 3) == doctest::Approx(3 * std::log(100.0)));
  for (std::size_t d : {1, 4, 9})
    CHECK(bic(3.3, 50, d) - aic(3.3, 50, d) == doctest::Approx(d * (std::log(50.0) - 2.0)).epsilon(1e-14));
  // The variance parameter accounts for n + 2 on the AIC side.
  CHECK(std::abs(corrected_aic(2.0, 10000, 5) - aic(2.0, 10000, 5) - 10002.0) < 0.1);
  CHECK(std::abs(corrected_aic(2.0, 100, 5) - aic(2.0, 100, 5) - 102.0) > 0.5);
  CHECK_THROWS_AS(aic(0.0, 10, 2), DomainError);
  CHECK_THROWS_AS(bic(-1.0, 10, 2), DomainError);
  CHECK_THROWS_AS(corrected_aic(1.0, 10, 8), DomainError);
}

TEST_CASE("bic never picks a larger nested model than aic") {
  std::mt19937_64 gen(1);
  const std::size_t n = 60, p = 8;
  int smaller_or_equal = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const DenseMatrix x = random_matrix(n, p, gen);
    Vector y = random_vector(n, gen);
    for (std::size_t i = 0; i < n; ++i) y[i] += x(i, 0) + 0.3 * x(i, 1);
    const Dataset data{x, y};
    std::size_t da = 0, db = 0;
    double ba = INFINITY, bb = INFINITY;
    for (std::size_t s = 1; s <= p; ++s) {
      std::vector<std::size_t> cols(s);
      for (std::size_t a = 0; a < s; ++a) cols[a] = a;
      const double rss = fit_subset(cols, data).rss;
      if (aic(rss, n, s) < ba) ba = aic(rss, n, s), da = s;
      if (bic(rss, n, s) < bb) bb = bic(rss, n, s), db = s;
    }
    smaller_or_equal += db <= da;
  }
  CHECK(smaller_or_equal >= 90);
}

TEST_CASE("gcv") {
  const Vector y{1, -2, 0.5, 3};
  CHECK(gcv(DenseMatrix(4, 4), y) == doctest::Approx(norm2_squared(y) / 4));
  DenseMatrix x(4, 1, Vector{0, 1, 2, 3});
  const auto global = knn_matrix(x, 4).m;
  double mean = 0.625, rss = 0;
  for (double v : y) rss += (v - mean) * (v - mean);
  CHECK(gcv(global, y) == doctest::Approx(4 * rss / 9));
  CHECK_THROWS_AS(gcv(DenseMatrix::identity(4), y), DegenerateFitError);

  const auto m = knn_matrix(x, 2).m;
  Vector shifted = y;
  for (auto& v : shifted) v += 5.0;
  CHECK(gcv(m, shifted) == doctest::Approx(gcv(m, y)).epsilon(1e-12));
}

TEST_CASE("effective dimensions") {
  std::mt19937_64 gen(3);
  const DenseMatrix x = uniform_points(24, gen);
  for (std::size_t k = 1; k <= 6; ++k) {
    CHECK(deff_htf(knn_matrix(x, k).m) == doctest::Approx(24.0 / k).epsilon(1e-14));
    if (k < 24) CHECK(deff_htf(knn_prime_matrix(x, k).m) == 0.0);
  }
  const DenseMatrix phi = random_matrix(24, 5, gen);
  CHECK(deff_htf(basis_projection_matrix(phi).m) == doctest::Approx(5.0).epsilon(1e-12));

  for (double alpha : {0.01, 1.0, 30.0}) {
    const auto b = bayes_hat_matrix(phi, alpha, 2.0);
    CHECK(std::abs(deff_htf(b.m) - deff_mckay(5, alpha, b.a)) < 1e-8);
  }
  CHECK_THROWS_AS(deff_mckay(2, 1.0, DenseMatrix{{1, 1}, {1, 1}}), SingularityError);
}

TEST_CASE("bms evidence") {
  const Vector y{1, 2, -1};
  const double c = 1.5 * std::log(3.0 / (2 * std::numbers::pi * std::numbers::e));
  CHECK(bms_neg_log_evidence(DenseMatrix(3, 3), y) == doctest::Approx(1.5 * std::log(6.0) - c));
  CHECK_THROWS_AS(bms_neg_log_evidence(DenseMatrix::identity(3), y), SingularityError);
}

TEST_CASE("bms with the gram prior is projective LoRP plus a constant") {
  std::mt19937_64 gen(19);
  const std::size_t n = 40;
  const DenseMatrix phi_all = random_matrix(n, 5, gen);
  Vector y = random_vector(n, gen);
  for (std::size_t i = 0; i < n; ++i) y[i] += 2 * phi_all(i, 0) - phi_all(i, 1) + 0.5 * phi_all(i, 2);
  std::vector<double> offsets;
  for (std::size_t d = 1; d <= 5; ++d) {
    DenseMatrix phi(n, d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t a = 0; a < d; ++a) phi(i, a) = phi_all(i, a);
    const auto proj = basis_projection_matrix(phi).m;
    const auto lr = projective_loss_rank(d, y, proj * std::span<const double>(y));
    REQUIRE(lr.alpha_m.has_value());
    const double beta = 3.0;
    const auto bayes = bayes_hat_matrix(phi, *lr.alpha_m * beta, beta, PriorCovariance::gram);
    offsets.push_back(bms_neg_log_evidence(bayes.m, y) - lr.value);
  }
  for (double o : offsets) CHECK(std::abs(o - offsets.front()) < 1e-8);
  CHECK(offsets.front() == doctest::Approx(-0.5 * n * std::log(n / (2 * std::numbers::pi * std::numbers::e))));
}

TEST_CASE("bms fit term grows with the prior precision") {
  std::mt19937_64 gen(20);
  const DenseMatrix phi = random_matrix(30, 4, gen);
  const Vector y = random_vector(30, gen);
  double prev = -INFINITY;
  for (double alpha : {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
    const auto b = bayes_hat_matrix(phi, alpha, 1.0);
    const double fit = 15.0 * std::log(quadratic_form(DenseMatrix::identity(30) - b.m, y));
    CHECK(fit > prev);
    prev = fit;
  }
}

TEST_CASE("taylor log-det") {
  const DenseMatrix zero(4, 4);
  for (std::size_t order : {1, 3, 10}) CHECK(taylor_logdet(zero, order) == 0.0);

  std::mt19937_64 gen(6);
  for (int rep = 0; rep < 3; ++rep) {
    DenseMatrix m = random_matrix(6, 6, gen);
    m *= 0.5 / deflated_spectral_radius(m);
    const double exact = -log_abs_det(DenseMatrix::identity(6) - m);
    CHECK(std::abs(taylor_logdet(m, 30) - exact) < 1e-6);
  }
  CHECK_THROWS_AS(taylor_logdet(2.0 * DenseMatrix::identity(3), 5), DivergenceError);
}

TEST_CASE("taylor log-det on the unit-deflated space") {
  // Circular 3-NN on 7 points: symmetric circulant with one unit mode.
  DenseMatrix x(7, 1);
  for (std::size_t i = 0; i < 7; ++i) x(i, 0) = static_cast<double>(i);
  const auto m = knn_matrix(x, 3, Metric::circular(7.0)).m;
  double exact = 0.0;
  for (double l : sym_eig(DenseMatrix::identity(7) - m).eigenvalues)
    if (std::abs(l) > 1e-9) exact -= std::log(l);
  CHECK(deflated_spectral_radius(m) < 1.0);
  CHECK(std::abs(taylor_logdet(m, 400, true) - exact) < 1e-8);
}

TEST_CASE("knn' pathology: zero trace, positive second-order term") {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 gen(seed);
    const DenseMatrix x = uniform_points(30, gen);
    for (std::size_t k = 1; k < 30; k += 4) {
      const auto m = knn_prime_matrix(x, k).m;
      const Vector terms = taylor_logdet_terms(m, 2);
      CHECK(terms[0] == 0.0);
      CHECK(terms[1] > 0.0);
    }
  }
}
