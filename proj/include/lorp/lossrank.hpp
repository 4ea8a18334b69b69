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
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "lorp/linalg.hpp"
#include "lorp/regressors.hpp"

namespace lorp {

enum class AlphaMode { optimize_alpha, fixed_alpha, caic_alpha, projective_closed_form };

std::string_view to_string(AlphaMode m);

/// Regularized loss rank of a linear regressor, natural log. The log v_n
/// constant is left out unless include_vn is set.
struct LossRankScore {
  double alpha = 0.0;
  double value = 0.0;
  double fit_term = 0.0;         // n/2 log y^T S_alpha y
  double complexity_term = 0.0;  // -1/2 log det S_alpha
  bool include_vn = false;
  AlphaMode mode = AlphaMode::optimize_alpha;
  /// Set for a perfect fit (y in the nullspace of I - M); value is -inf.
  bool degenerate = false;
};

/// The spectrum of S0 = (I-M)^T (I-M) plus the two quadratic forms of y the
/// loss rank depends on. Eigenvalues flagged as zero modes are pinned to 0.
struct LossRankInputs {
  Spectrum spectrum;
  double q0 = 0.0;      // y^T S0 y
  double ynorm2 = 0.0;  // y^T y
  std::size_t n = 0;
};

LossRankInputs loss_rank_inputs(const DenseMatrix& m, std::span<const double> y, const SymEigOptions& opts = {});

/// log of the volume of the unit Euclidean n-ball, pi^{n/2} / Gamma(n/2 + 1).
double log_unit_ball_volume(std::size_t n);

/// log of the volume of the unit rho-norm ball in n dimensions.
double log_unit_ball_volume(std::size_t n, double rho_norm);

/// n/2 log(q0 + alpha |y|^2) - 1/2 sum log(lambda_i + alpha). alpha = 0 is
/// allowed only without zero modes (SingularityError otherwise).
LossRankScore loss_rank_fixed_alpha(const LossRankInputs& in, double alpha);
LossRankScore loss_rank_fixed_alpha(const DenseMatrix& m, std::span<const double> y, double alpha);

/// Same with alpha = exp(log_alpha), for regularizers far below the double
/// range (the corrected-AIC choice).
LossRankScore loss_rank_fixed_log_alpha(const LossRankInputs& in, double log_alpha);

/// The objective g(alpha) and its derivative, as used by optimize_alpha.
double loss_rank_objective(const Spectrum& s, double q0, double ynorm2, std::size_t n, double alpha);
double loss_rank_objective_derivative(const Spectrum& s, double q0, double ynorm2, std::size_t n, double alpha);

inline constexpr double kAlphaMin = 1e-12;
inline constexpr double kAlphaMax = 1e6;

/// Minimizes g over [kAlphaMin, kAlphaMax]: log grid of 200 points, golden
/// section in the best bracket, then bisection on g'. Throws
/// DegenerateFitError when q0 vanishes relative to |y|^2.
LossRankScore optimize_alpha(const Spectrum& spectrum, double q0, double ynorm2, std::size_t n);

struct LossRankOptions {
  AlphaMode mode = AlphaMode::optimize_alpha;
  /// Used by fixed_alpha.
  double alpha = 1.0;
  bool include_vn = false;
  /// Remove the zero modes of S0 from the determinant (the same infinite
  /// constant for every regressor sharing them).
  bool drop_common_zero_modes = false;
};

/// Loss rank of hat matrix M for response y. A perfect fit is reported as
/// degenerate with value -inf rather than thrown. projective_closed_form and
/// caic_alpha are not available here (they need the projection structure);
/// use projective_loss_rank / caic_score.
LossRankScore loss_rank(const DenseMatrix& m, std::span<const double> y, const LossRankOptions& opts = {});

/// KL(p || q) between Bernoulli(p) and Bernoulli(q).
double bernoulli_kl(double p, double q);

/// Binary entropy in nats.
double binary_entropy(double p);

struct ProjectiveScore {
  std::size_t d = 0;
  std::size_t n = 0;
  double rho_fit = 0.0;
  /// rho d / ((1-rho) n - d); absent unless 1 - rho > d/n.
  std::optional<double> alpha_m;
  double kl = 0.0;
  double value = 0.0;
};

/// Closed-form loss rank of a rank-d projection with fitted values yhat:
/// n/2 log y^T y - n/2 KL(d/n || 1 - rho). Requires 0 < d < n and rho in (0,1).
ProjectiveScore projective_loss_rank(std::size_t d, std::span<const double> y, std::span<const double> yhat);
ProjectiveScore projective_loss_rank(std::size_t d, std::size_t n, double rho_fit, double ynorm2);

/// Least-squares fit of y on the given columns of x.
struct SubsetFit {
  std::size_t size = 0;
  std::size_t n = 0;
  double rss = 0.0;
  double ynorm2 = 0.0;
  Vector fitted;
};

SubsetFit fit_subset(std::span<const std::size_t> columns, const Dataset& data);

/// Variable-selection form: n/2 log(n sigma^2) + n/2 H(|S|/n) + |S|/2 log((1-rho)/rho).
double variable_selection_score(std::span<const std::size_t> columns, const Dataset& data);
double variable_selection_score(const SubsetFit& fit);

/// Corrected AIC recovered by the regularizer exp(-n(n+s)/(s(n-s-2))):
/// n log sigma^2 + n(n+s)/(n-s-2). Requires s < n-2.
double caic_score(std::span<const std::size_t> columns, const Dataset& data);
double caic_score(const SubsetFit& fit);
/// log of the corrected-AIC regularizer for subset size s.
double caic_log_alpha(std::size_t n, std::size_t s);

/// n log |(I - shrink M) y|_rho - log |det(I - shrink M)| + log v_n^rho.
double rho_norm_loss_rank(const DenseMatrix& m, std::span<const double> y, double rho_norm, double shrink = 1.0);

/// Predictor y' -> yhat' for a fixed design.
using ResponseMap = std::function<Vector(std::span<const double>)>;
/// Loss(y', yhat'); the default is the squared error.
using LossFunction = std::function<double(std::span<const double>, std::span<const double>)>;

inline constexpr std::size_t kEnumerationBudget = 10'000'000;

/// Number of y' in the product of the per-coordinate value sets whose loss
/// is at most the loss of y (ties count, within a relative 1e-12).
std::size_t discrete_rank_oracle(const ResponseMap& predictor, const std::vector<Vector>& yspace,
                                 std::span<const double> y, const LossFunction& loss = {},
                                 std::size_t budget = kEnumerationBudget);
/// Same value set for every coordinate.
std::size_t discrete_rank_oracle(const ResponseMap& predictor, const Vector& values, std::span<const double> y,
                                 const LossFunction& loss = {}, std::size_t budget = kEnumerationBudget);

/// Volume of {y' in box : loss(y') <= L}, counted on the eps-grid of cell
/// midpoints. Each box side must be a whole number of eps.
double grid_volume_oracle(const std::function<double(std::span<const double>)>& loss,
                          const std::vector<std::pair<double, double>>& bounds, double level, double eps,
                          std::size_t budget = 100'000'000);

}  // namespace lorp
