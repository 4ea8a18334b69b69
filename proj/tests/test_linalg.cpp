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
#include <complex>
#include <random>

#include "lorp/errors.hpp"
#include "lorp/linalg.hpp"

using namespace lorp;

namespace {

DenseMatrix random_symmetric(std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) a(i, j) = a(j, i) = nd(gen);
  return a;
}

DenseMatrix random_spd(std::size_t n, unsigned seed) {
  DenseMatrix a = random_symmetric(n, seed);
  DenseMatrix s = gram(a);
  for (std::size_t i = 0; i < n; ++i) s(i, i) += 0.5;
  return s;
}

// Real roots of the monic cubic t^3 + a t^2 + b t + c with three real roots (trigonometric form).
std::vector<double> cubic_roots(double a, double b, double c) {
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double m = 2.0 * std::sqrt(-p / 3.0);
  const double theta = std::acos(std::clamp(3.0 * q / (p * m), -1.0, 1.0)) / 3.0;
  std::vector<double> r;
  for (int k = 0; k < 3; ++k) r.push_back(m * std::cos(theta - 2.0 * M_PI * k / 3.0) - a / 3.0);
  std::sort(r.begin(), r.end());
  return r;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
  return m;
}

}  // namespace

TEST_CASE("sym_eig small closed forms") {
  auto s = sym_eig(DenseMatrix::identity(3), {.zero_tol_abs = 1e-12});
  for (double v : s.eigenvalues) CHECK(v == doctest::Approx(1.0));
  CHECK(s.zero_mode_count == 0);

  auto t = sym_eig(DenseMatrix{{2, 1}, {1, 2}});
  CHECK(t.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(t.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("sym_eig matches characteristic polynomial roots for 3x3") {
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const DenseMatrix a = random_symmetric(3, seed);
    const double tr = a.trace();
    const double minors = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) + a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0) +
                          a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    const double det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
                       a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                       a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    const auto roots = cubic_roots(-tr, minors, -det);
    const auto s = sym_eig(a);
    for (int k = 0; k < 3; ++k) CHECK(s.eigenvalues[k] == doctest::Approx(roots[k]).epsilon(1e-10));
  }
}

TEST_CASE("sym_eig trace, reconstruction and permutation invariance") {
  const DenseMatrix a = random_symmetric(6, 42);
  const auto s = sym_eig(a, {.want_vectors = true});
  CHECK(std::abs(s.sum() - a.trace()) < 1e-10);
  CHECK(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));

  const DenseMatrix& v = *s.eigenvectors;
  const DenseMatrix rec = v * DenseMatrix::diagonal(s.eigenvalues) * v.transposed();
  CHECK((rec - a).frobenius_norm() <= 1e-10 * a.frobenius_norm());

  const std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
  DenseMatrix p(6, 6);
  for (std::size_t i = 0; i < 6; ++i) p(i, perm[i]) = 1.0;
  const auto sp = sym_eig(p.transposed() * a * p);
  for (std::size_t i = 0; i < 6; ++i) CHECK(sp.eigenvalues[i] == doctest::Approx(s.eigenvalues[i]).epsilon(1e-10));
}

TEST_CASE("sym_eig of S0 squares the shifted spectrum of symmetric M") {
  const DenseMatrix m = random_symmetric(5, 7);
  const DenseMatrix i_m = DenseMatrix::identity(5) - m;
  const auto sm = sym_eig(m);
  const auto s0 = sym_eig(gram(i_m));
  std::vector<double> expect;
  for (double b : sm.eigenvalues) expect.push_back((1.0 - b) * (1.0 - b));
  std::sort(expect.begin(), expect.end());
  for (std::size_t i = 0; i < 5; ++i) CHECK(s0.eigenvalues[i] == doctest::Approx(expect[i]).epsilon(1e-9));
}

TEST_CASE("sym_eig rejects bad input") {
  CHECK_THROWS_AS(sym_eig(DenseMatrix(2, 3)), DimensionError);
  CHECK_THROWS_AS(sym_eig(DenseMatrix{{1, 2}, {0, 1}}), AsymmetryError);
}

TEST_CASE("sym_eig zero-mode count") {
  const auto s = sym_eig(DenseMatrix{{1, 1}, {1, 1}});
  CHECK(s.zero_mode_count == 1);
  CHECK(s.eigenvalues[0] == doctest::Approx(0.0));
}

TEST_CASE("log_det_psd") {
  CHECK(log_det_psd(DenseMatrix::identity(4)) == 0.0);
  CHECK(log_det_psd(DenseMatrix::diagonal(Vector{2, 8})) == doctest::Approx(std::log(16.0)));
  const DenseMatrix a = random_spd(5, 3);
  double ref = 0.0;
  for (double l : sym_eig(a).eigenvalues) ref += std::log(l);
  CHECK(std::abs(log_det_psd(a) - ref) < 1e-8);
  CHECK_THROWS_AS(log_det_psd(DenseMatrix{{1, 2}, {2, 1}}), DefinitenessError);
}

TEST_CASE("log_det_psd is additive over commuting polynomials") {
  const DenseMatrix a = random_spd(5, 11);
  const DenseMatrix b = a * a + 2.0 * a + DenseMatrix::identity(5);
  CHECK(std::abs(log_det_psd(a * b) - log_det_psd(a) - log_det_psd(b)) < 1e-8);
}

TEST_CASE("solve_spd") {
  const Vector b{3, -1, 2};
  const Vector x = solve_spd(DenseMatrix::identity(3), b);
  for (int i = 0; i < 3; ++i) CHECK(x[i] == b[i]);
  const Vector y = solve_spd(DenseMatrix::diagonal(Vector{2, 4}), Vector{2, 4});
  CHECK(y[0] == doctest::Approx(1.0));
  CHECK(y[1] == doctest::Approx(1.0));

  const DenseMatrix a = random_spd(6, 5);
  const Vector rhs{1, 2, 3, 4, 5, 6};
  const Vector z = solve_spd(a, rhs);
  Vector r = a * z;
  for (int i = 0; i < 6; ++i) r[i] -= rhs[i];
  CHECK(std::sqrt(norm2_squared(r)) <= 1e-9 * std::sqrt(norm2_squared(rhs)));

  CHECK_THROWS_AS(solve_spd(DenseMatrix{{1, 1}, {1, 1}}, Vector{1, 1}), SingularityError);
}

TEST_CASE("LU log-determinant and solve") {
  const DenseMatrix a{{0, 2, 1}, {1, 1, 0}, {3, 0, 1}};
  // det = 0*(1) - 2*(1-0) + 1*(0-3) = -5
  CHECK(log_abs_det(a) == doctest::Approx(std::log(5.0)));
  const DenseMatrix x = solve(a, DenseMatrix::identity(3));
  CHECK(max_abs_diff(a * x, DenseMatrix::identity(3)) < 1e-12);
  CHECK_THROWS_AS(log_abs_det(DenseMatrix{{1, 2}, {2, 4}}), SingularityError);
}

TEST_CASE("thin QR") {
  const DenseMatrix a{{1, 0}, {1, 1}, {1, 2}, {1, 3}};
  const auto qr = thin_qr(a);
  CHECK(max_abs_diff(qr.q * qr.r, a) < 1e-12);
  CHECK(max_abs_diff(qr.q.transposed() * qr.q, DenseMatrix::identity(2)) < 1e-12);
  CHECK(qr.r(1, 0) == 0.0);

  const DenseMatrix bad{{1, 2, 0}, {1, 2, 1}, {1, 2, 3}, {1, 2, 5}};
  try {
    thin_qr(bad);
    FAIL("expected RankError");
  } catch (const RankError& e) {
    CHECK(e.column() == 1);
  }
}
