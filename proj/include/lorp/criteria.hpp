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
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "lorp/linalg.hpp"

namespace lorp {

enum class Criterion { aic, bic, caic, gcv, bms_evidence, deff_htf, deff_mckay, taylor_logdet };

std::string_view to_string(Criterion c);

struct CriterionValue {
  Criterion name = Criterion::aic;
  double value = 0.0;
  std::string model_id;
};

/// Gaussian plug-in criteria with the constants shared by all models dropped.
/// n log(rss/n) + 2d.
double aic(double rss, std::size_t n, std::size_t d);
/// n log(rss/n) + d log n.
double bic(double rss, std::size_t n, std::size_t d);
/// n log(rss/n) + n(n+d)/(n-d-2); needs d < n-2.
double corrected_aic(double rss, std::size_t n, std::size_t d);

/// n |(I-M)y|^2 / tr(I-M)^2. Throws DegenerateFitError when tr(I-M) vanishes.
double gcv(const DenseMatrix& m, std::span<const double> y);

/// tr M.
double deff_htf(const DenseMatrix& m);
/// d - alpha tr(A^-1) for the posterior precision A.
double deff_mckay(std::size_t d, double alpha, const DenseMatrix& a);

/// Posterior mean smoother of Gaussian linear regression on features phi:
/// A = alpha C + beta Phi^T Phi, M = beta Phi A^-1 Phi^T. C defaults to I.
struct BayesRegressor {
  DenseMatrix m;
  DenseMatrix a;  // posterior precision
};

enum class PriorCovariance { identity, gram };

BayesRegressor bayes_hat_matrix(const DenseMatrix& phi, double alpha, double beta,
                                PriorCovariance prior = PriorCovariance::identity);
BayesRegressor bayes_hat_matrix(const DenseMatrix& phi, double alpha, double beta, const DenseMatrix& prior);

/// Negative log evidence with the noise precision at its plug-in estimate
/// n / y^T S y: n/2 log y^T S y - 1/2 log det S - n/2 log(n / (2 pi e)), S = I - M.
double bms_neg_log_evidence(const DenseMatrix& m, std::span<const double> y);

/// tr(M^s)/s for s = 1..order. With `restricted`, the multiplicity of the
/// eigenvalue 1 (the zero modes of (I-M)^T(I-M)) is removed from every trace.
Vector taylor_logdet_terms(const DenseMatrix& m, std::size_t order, bool restricted = false);

/// Spectral radius of M with its unit modes deflated, by repeated squaring.
double deflated_spectral_radius(const DenseMatrix& m);

/// Partial sum of taylor_logdet_terms; tends to -log det'(I-M). Throws
/// DivergenceError when the deflated spectral radius is not below 1.
double taylor_logdet(const DenseMatrix& m, std::size_t order, bool restricted = false);

}  // namespace lorp
