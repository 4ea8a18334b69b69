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
#include <algorithm>
#include <cmath>
#include <string>

#include "lorp/errors.hpp"
#include "lorp/regressors.hpp"

namespace lorp::spline {

namespace {

void check_knots(std::span<const double> knots, std::size_t min_size) {
  if (knots.size() < min_size)
    throw DimensionError("spline: need at least " + std::to_string(min_size) + " knots");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i] > knots[i - 1])) throw TieError("spline: knots must be strictly increasing");
}

double pos(double v) { return v > 0.0 ? v : 0.0; }

double truncated_cubic_term(std::span<const double> knots, std::size_t k, double t) {
  const double xn = knots.back();
  return (std::pow(pos(t - knots[k]), 3) - std::pow(pos(t - xn), 3)) / (xn - knots[k]);
}

double truncated_cubic_second(std::span<const double> knots, std::size_t k, double t) {
  const double xn = knots.back();
  return 6.0 * (pos(t - knots[k]) - pos(t - xn)) / (xn - knots[k]);
}

}  // namespace

DenseMatrix natural_basis(std::span<const double> knots) {
  check_knots(knots, 2);
  const std::size_t n = knots.size();
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = knots[i];
    out(i, 0) = 1.0;
    out(i, 1) = t;
    const double last = n >= 2 ? truncated_cubic_term(knots, n - 2, t) : 0.0;
    for (std::size_t k = 0; k + 2 < n; ++k) out(i, k + 2) = truncated_cubic_term(knots, k, t) - last;
  }
  return out;
}

double natural_basis_second_derivative(std::span<const double> knots, std::size_t j, double t) {
  const std::size_t n = knots.size();
  if (j >= n) throw ParameterError("spline: basis index out of range");
  if (j < 2) return 0.0;
  return truncated_cubic_second(knots, j - 2, t) - truncated_cubic_second(knots, n - 2, t);
}

DenseMatrix natural_penalty(std::span<const double> knots) {
  check_knots(knots, 2);
  const std::size_t n = knots.size();
  DenseMatrix omega(n, n);
  Vector lo(n), mid(n), hi(n);
  for (std::size_t iv = 0; iv + 1 < n; ++iv) {
    const double a = knots[iv], b = knots[iv + 1], c = 0.5 * (a + b), w = (b - a) / 6.0;
    for (std::size_t j = 0; j < n; ++j) {
      lo[j] = natural_basis_second_derivative(knots, j, a);
      mid[j] = natural_basis_second_derivative(knots, j, c);
      hi[j] = natural_basis_second_derivative(knots, j, b);
    }
    for (std::size_t i = 2; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        const double v = w * (lo[i] * lo[j] + 4.0 * mid[i] * mid[j] + hi[i] * hi[j]);
        omega(i, j) += v;
        if (j != i) omega(j, i) += v;
      }
  }
  return omega;
}

DenseMatrix reinsch_penalty(std::span<const double> knots) {
  check_knots(knots, 3);
  const std::size_t n = knots.size(), m = n - 2;
  Vector h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = knots[i + 1] - knots[i];
  DenseMatrix q(n, m), r(m, m);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    q(j - 1, j - 1) = 1.0 / h[j - 1];
    q(j, j - 1) = -1.0 / h[j - 1] - 1.0 / h[j];
    q(j + 1, j - 1) = 1.0 / h[j];
    r(j - 1, j - 1) = (h[j - 1] + h[j]) / 3.0;
    if (j < m) r(j - 1, j) = r(j, j - 1) = h[j] / 6.0;
  }
  DenseMatrix k = q * solve_spd(r, q.transposed());
  // Symmetrise away rounding.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) k(i, j) = k(j, i) = 0.5 * (k(i, j) + k(j, i));
  return k;
}

Smoother::Smoother(std::span<const double> knots) {
  const DenseMatrix k = reinsch_penalty(knots);
  SymEigOptions opts;
  opts.want_vectors = true;
  Spectrum s = sym_eig(k, opts);
  eigenvalues_ = std::move(s.eigenvalues);
  eigenvectors_ = std::move(*s.eigenvectors);
  // Linear functions are penalty-free; pin the two smallest modes to zero.
  eigenvalues_[0] = 0.0;
  eigenvalues_[1] = 0.0;
  for (std::size_t i = 2; i < eigenvalues_.size(); ++i) eigenvalues_[i] = std::max(eigenvalues_[i], 0.0);
}

Vector Smoother::hat_eigenvalues(double lambda) const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("spline: lambda must be >= 0");
  Vector out(eigenvalues_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + lambda * eigenvalues_[i]);
  return out;
}

double Smoother::trace(double lambda) const {
  const Vector e = hat_eigenvalues(lambda);
  double s = 0.0;
  for (double v : e) s += v;
  return s;
}

DenseMatrix Smoother::hat_matrix(double lambda) const {
  const Vector e = hat_eigenvalues(lambda);
  const std::size_t n = e.size();
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t a = 0; a < n; ++a) s += eigenvectors_(i, a) * e[a] * eigenvectors_(j, a);
      out(i, j) = out(j, i) = s;
    }
  return out;
}

}  // namespace lorp::spline
