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
#include "lorp/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lorp/errors.hpp"

namespace lorp {

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::aic: return "aic";
    case Criterion::bic: return "bic";
    case Criterion::caic: return "caic";
    case Criterion::gcv: return "gcv";
    case Criterion::bms_evidence: return "bms_evidence";
    case Criterion::deff_htf: return "deff_htf";
    case Criterion::deff_mckay: return "deff_mckay";
    case Criterion::taylor_logdet: return "taylor_logdet";
  }
  return "unknown";
}

namespace {

double log_sigma2(double rss, std::size_t n, std::size_t d) {
  if (!(rss > 0.0) || !std::isfinite(rss)) throw DomainError("criterion: residual sum of squares must be positive");
  if (d >= n) throw DomainError("criterion: need d < n");
  return static_cast<double>(n) * std::log(rss / static_cast<double>(n));
}

void check_square(const DenseMatrix& m) {
  if (!m.square()) throw DimensionError("criterion: M must be square");
}

}  // namespace

double aic(double rss, std::size_t n, std::size_t d) { return log_sigma2(rss, n, d) + 2.0 * static_cast<double>(d); }

double bic(double rss, std::size_t n, std::size_t d) {
  return log_sigma2(rss, n, d) + static_cast<double>(d) * std::log(static_cast<double>(n));
}

double corrected_aic(double rss, std::size_t n, std::size_t d) {
  if (d + 2 >= n) throw DomainError("corrected AIC: need d < n - 2");
  const double nn = static_cast<double>(n), dd = static_cast<double>(d);
  return log_sigma2(rss, n, d) + nn * (nn + dd) / (nn - dd - 2.0);
}

double gcv(const DenseMatrix& m, std::span<const double> y) {
  check_square(m);
  if (m.rows() != y.size()) throw DimensionError("gcv: M and y sizes differ");
  const std::size_t n = m.rows();
  const double tr = static_cast<double>(n) - m.trace();
  if (std::abs(tr) <= 1e-12 * static_cast<double>(n)) throw DegenerateFitError("gcv: tr(I - M) is zero");
  const Vector fit = m * y;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) rss += (y[i] - fit[i]) * (y[i] - fit[i]);
  return static_cast<double>(n) * rss / (tr * tr);
}

double deff_htf(const DenseMatrix& m) {
  check_square(m);
  return m.trace();
}

double deff_mckay(std::size_t d, double alpha, const DenseMatrix& a) {
  check_square(a);
  if (a.rows() != d) throw DimensionError("deff_mckay: A must be d x d");
  const DenseMatrix inv = solve_spd(a, DenseMatrix::identity(d));
  return static_cast<double>(d) - alpha * inv.trace();
}

BayesRegressor bayes_hat_matrix(const DenseMatrix& phi, double alpha, double beta, const DenseMatrix& prior) {
  if (!(alpha >= 0.0) || !(beta > 0.0)) throw ParameterError("bayes: need alpha >= 0 and beta > 0");
  const std::size_t d = phi.cols();
  if (prior.rows() != d || prior.cols() != d) throw DimensionError("bayes: prior matrix must be d x d");
  const DenseMatrix b = gram(phi);
  BayesRegressor out;
  out.a = alpha * prior + beta * b;
  // M = beta Phi A^-1 Phi^T
  const DenseMatrix w = solve_spd(out.a, phi.transposed());
  out.m = beta * (phi * w);
  const std::size_t n = phi.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.m(i, j) = out.m(j, i) = 0.5 * (out.m(i, j) + out.m(j, i));
  return out;
}

BayesRegressor bayes_hat_matrix(const DenseMatrix& phi, double alpha, double beta, PriorCovariance prior) {
  return bayes_hat_matrix(phi, alpha, beta,
                          prior == PriorCovariance::identity ? DenseMatrix::identity(phi.cols()) : gram(phi));
}

double bms_neg_log_evidence(const DenseMatrix& m, std::span<const double> y) {
  check_square(m);
  if (m.rows() != y.size()) throw DimensionError("bms: M and y sizes differ");
  const std::size_t n = m.rows();
  const DenseMatrix s = DenseMatrix::identity(n) - m;
  const double q = quadratic_form(s, y);
  if (!(q > 0.0)) throw SingularityError("bms: y^T S y is not positive");
  const double nn = static_cast<double>(n);
  return 0.5 * nn * std::log(q) - 0.5 * log_abs_det(s) - 0.5 * nn * std::log(nn / (2.0 * std::numbers::pi * std::numbers::e));
}

namespace {

std::size_t unit_mode_count(const DenseMatrix& m) {
  const DenseMatrix i_m = DenseMatrix::identity(m.rows()) - m;
  return sym_eig(gram(i_m)).zero_mode_count;
}

/// Columns of the eigenvectors of a PSD matrix for its zero modes.
DenseMatrix null_basis(const DenseMatrix& psd) {
  SymEigOptions opts;
  opts.want_vectors = true;
  const Spectrum s = sym_eig(psd, opts);
  DenseMatrix out(psd.rows(), s.zero_mode_count);
  for (std::size_t i = 0; i < psd.rows(); ++i)
    for (std::size_t j = 0; j < s.zero_mode_count; ++j) out(i, j) = (*s.eigenvectors)(i, j);
  return out;
}

}  // namespace

Vector taylor_logdet_terms(const DenseMatrix& m, std::size_t order, bool restricted) {
  check_square(m);
  const double m1 = restricted ? static_cast<double>(unit_mode_count(m)) : 0.0;
  Vector out;
  out.reserve(order);
  DenseMatrix power = m;
  for (std::size_t s = 1; s <= order; ++s) {
    out.push_back((power.trace() - m1) / static_cast<double>(s));
    if (s < order) power = power * m;
  }
  return out;
}

double deflated_spectral_radius(const DenseMatrix& m) {
  check_square(m);
  const std::size_t n = m.rows();
  const DenseMatrix i_m = DenseMatrix::identity(n) - m;
  DenseMatrix b = m;
  const DenseMatrix v = null_basis(gram(i_m));
  if (v.cols() > 0) {
    // Oblique projector onto the unit eigenspace: V (U^T V)^-1 U^T.
    const DenseMatrix u = null_basis(gram(i_m.transposed()));
    if (u.cols() != v.cols()) throw DivergenceError("unit eigenvalue of M is not semisimple");
    const DenseMatrix ut = u.transposed();
    const DenseMatrix p1 = v * solve(ut * v, ut);
    b -= p1;
  }
  // rho(B) = lim |B^(2^j)|^(1/2^j), with the scale carried in log form.
  double log_scale = 0.0;
  double radius = 0.0;
  for (int j = 0; j <= 16; ++j) {
    const double f = b.frobenius_norm();
    if (!(f > 0.0)) return 0.0;
    log_scale += std::log(f);
    b *= 1.0 / f;
    radius = std::exp(log_scale / std::ldexp(1.0, j));
    if (j < 16) {
      b = b * b;
      log_scale *= 2.0;
    }
  }
  return radius;
}

double taylor_logdet(const DenseMatrix& m, std::size_t order, bool restricted) {
  const double radius = deflated_spectral_radius(m);
  if (!(radius < 1.0)) throw DivergenceError("taylor log-det: deflated spectral radius " + std::to_string(radius) + " >= 1");
  double s = 0.0;
  for (double t : taylor_logdet_terms(m, order, restricted)) s += t;
  return s;
}

}  // namespace lorp
