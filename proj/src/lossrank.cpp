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
#include "lorp/lossrank.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lorp/errors.hpp"

namespace lorp {

std::string_view to_string(AlphaMode m) {
  switch (m) {
    case AlphaMode::optimize_alpha: return "optimize_alpha";
    case AlphaMode::fixed_alpha: return "fixed_alpha";
    case AlphaMode::caic_alpha: return "caic_alpha";
    case AlphaMode::projective_closed_form: return "projective_closed_form";
  }
  return "unknown";
}

namespace {

constexpr double kDegenerateFitRel = 1e-14;

double mode_eigenvalue(const Spectrum& s, std::size_t i) {
  return i < s.zero_mode_count ? 0.0 : std::max(s.eigenvalues[i], 0.0);
}

void check_inputs(double q0, double ynorm2, std::size_t n, const Spectrum& s) {
  if (n == 0 || s.size() > n) throw DimensionError("loss rank: spectrum larger than n");
  if (!(ynorm2 > 0.0)) throw ParameterError("loss rank: y must be nonzero");
  if (!(q0 >= -1e-12 * ynorm2)) throw ParameterError("loss rank: y^T S0 y must be nonnegative");
}

LossRankScore make_score(double fit, double complexity, double alpha, AlphaMode mode) {
  LossRankScore out;
  out.alpha = alpha;
  out.fit_term = fit;
  out.complexity_term = complexity;
  out.value = fit + complexity;
  out.mode = mode;
  out.degenerate = std::isinf(fit) && fit < 0.0;
  return out;
}

}  // namespace

LossRankInputs loss_rank_inputs(const DenseMatrix& m, std::span<const double> y, const SymEigOptions& opts) {
  if (!m.square()) throw DimensionError("loss rank: M must be square");
  if (m.rows() != y.size()) throw DimensionError("loss rank: M and y sizes differ");
  if (!m.all_finite()) throw DomainError("loss rank: M has non-finite entries");
  const std::size_t n = m.rows();
  const DenseMatrix i_m = DenseMatrix::identity(n) - m;
  LossRankInputs in;
  in.n = n;
  in.spectrum = sym_eig(gram(i_m), opts);
  for (std::size_t i = 0; i < in.spectrum.zero_mode_count; ++i) in.spectrum.eigenvalues[i] = 0.0;
  in.q0 = norm2_squared(i_m * y);
  in.ynorm2 = norm2_squared(y);
  return in;
}

double log_unit_ball_volume(std::size_t n) {
  const double h = 0.5 * static_cast<double>(n);
  return h * std::log(std::numbers::pi) - std::lgamma(h + 1.0);
}

double log_unit_ball_volume(std::size_t n, double rho_norm) {
  if (!(rho_norm > 0.0)) throw ParameterError("rho-norm exponent must be positive");
  if (n == 0) return 0.0;
  const double inv = 1.0 / rho_norm;
  double s = static_cast<double>(n) * std::numbers::ln2;
  const double g1 = std::lgamma(inv + 1.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double a = static_cast<double>(i);
    s += std::lgamma(a * inv + 1.0) + g1 - std::lgamma((a + 1.0) * inv + 1.0);
  }
  return s;
}

LossRankScore loss_rank_fixed_alpha(const LossRankInputs& in, double alpha) {
  check_inputs(in.q0, in.ynorm2, in.n, in.spectrum);
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ParameterError("loss rank: alpha must be >= 0");
  if (alpha == 0.0 && in.spectrum.zero_mode_count > 0)
    throw SingularityError("loss rank: alpha = 0 but S0 has a nullspace of dimension " +
                           std::to_string(in.spectrum.zero_mode_count));
  const double nn = static_cast<double>(in.n);
  const double fit = 0.5 * nn * std::log(std::max(in.q0, 0.0) + alpha * in.ynorm2);
  double logdet = 0.0;
  for (std::size_t i = 0; i < in.spectrum.size(); ++i) logdet += std::log(mode_eigenvalue(in.spectrum, i) + alpha);
  return make_score(fit, -0.5 * logdet, alpha, AlphaMode::fixed_alpha);
}

LossRankScore loss_rank_fixed_alpha(const DenseMatrix& m, std::span<const double> y, double alpha) {
  return loss_rank_fixed_alpha(loss_rank_inputs(m, y), alpha);
}

namespace {

/// log(exp(a) + exp(b)).
double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

LossRankScore loss_rank_fixed_log_alpha(const LossRankInputs& in, double log_alpha) {
  check_inputs(in.q0, in.ynorm2, in.n, in.spectrum);
  if (std::isnan(log_alpha)) throw ParameterError("loss rank: log alpha is NaN");
  const double ninf = -std::numeric_limits<double>::infinity();
  const double nn = static_cast<double>(in.n);
  const double log_q0 = in.q0 > 0.0 ? std::log(in.q0) : ninf;
  const double fit = 0.5 * nn * log_add(log_q0, log_alpha + std::log(in.ynorm2));
  double logdet = 0.0;
  for (std::size_t i = 0; i < in.spectrum.size(); ++i) {
    const double lam = mode_eigenvalue(in.spectrum, i);
    logdet += log_add(lam > 0.0 ? std::log(lam) : ninf, log_alpha);
  }
  return make_score(fit, -0.5 * logdet, std::exp(log_alpha), AlphaMode::caic_alpha);
}

double loss_rank_objective(const Spectrum& s, double q0, double ynorm2, std::size_t n, double alpha) {
  double v = 0.5 * static_cast<double>(n) * std::log(std::max(q0, 0.0) + alpha * ynorm2);
  for (std::size_t i = 0; i < s.size(); ++i) v -= 0.5 * std::log(mode_eigenvalue(s, i) + alpha);
  return v;
}

double loss_rank_objective_derivative(const Spectrum& s, double q0, double ynorm2, std::size_t n, double alpha) {
  double v = 0.5 * static_cast<double>(n) * ynorm2 / (std::max(q0, 0.0) + alpha * ynorm2);
  for (std::size_t i = 0; i < s.size(); ++i) v -= 0.5 / (mode_eigenvalue(s, i) + alpha);
  return v;
}

LossRankScore optimize_alpha(const Spectrum& spectrum, double q0, double ynorm2, std::size_t n) {
  check_inputs(q0, ynorm2, n, spectrum);
  if (q0 <= kDegenerateFitRel * ynorm2)
    throw DegenerateFitError("loss rank: y is fitted exactly (y^T S0 y = " + std::to_string(q0) + ")");

  auto h = [&](double t) { return loss_rank_objective(spectrum, q0, ynorm2, n, std::exp(t)); };
  auto dh = [&](double t) { return loss_rank_objective_derivative(spectrum, q0, ynorm2, n, std::exp(t)); };

  constexpr int kGrid = 200;
  const double t_lo = std::log(kAlphaMin), t_hi = std::log(kAlphaMax);
  const double step = (t_hi - t_lo) / (kGrid - 1);
  int best = 0;
  double best_value = h(t_lo);
  for (int i = 1; i < kGrid; ++i) {
    const double v = h(t_lo + step * i);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  double a = t_lo + step * std::max(best - 1, 0);
  double b = t_lo + step * std::min(best + 1, kGrid - 1);

  // Golden section on the bracket around the best probe.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = h(c), fd = h(d);
  for (int it = 0; it < 200 && b - a > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = h(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = h(d);
    }
  }
  double t_best = fc <= fd ? c : d;
  double v_best = std::min(fc, fd);
  if (best_value < v_best) {
    t_best = t_lo + step * best;
    v_best = best_value;
  }

  // g is flat near its minimum, so polish by bisecting on g'.
  double lo = t_lo + step * std::max(best - 1, 0);
  double hi = t_lo + step * std::min(best + 1, kGrid - 1);
  if (dh(lo) < 0.0 && dh(hi) > 0.0) {
    for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(lo));
         ++it) {
      const double mid = 0.5 * (lo + hi);
      (dh(mid) < 0.0 ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    const double v = h(t);
    if (v <= v_best + 1e-12 * std::max(1.0, std::abs(v_best))) {
      t_best = t;
      v_best = v;
    }
  }

  const double alpha = std::exp(t_best);
  const double fit = 0.5 * static_cast<double>(n) * std::log(q0 + alpha * ynorm2);
  LossRankScore out = make_score(fit, v_best - fit, alpha, AlphaMode::optimize_alpha);
  out.value = v_best;
  return out;
}

LossRankScore loss_rank(const DenseMatrix& m, std::span<const double> y, const LossRankOptions& opts) {
  LossRankInputs in = loss_rank_inputs(m, y);
  if (opts.drop_common_zero_modes && in.spectrum.zero_mode_count > 0) {
    in.spectrum.eigenvalues.erase(in.spectrum.eigenvalues.begin(),
                                  in.spectrum.eigenvalues.begin() + static_cast<long>(in.spectrum.zero_mode_count));
    in.spectrum.zero_mode_count = 0;
  }
  const std::size_t n = in.n;

  LossRankScore out;
  switch (opts.mode) {
    case AlphaMode::optimize_alpha: {
      if (in.q0 <= kDegenerateFitRel * in.ynorm2) {
        out.mode = AlphaMode::optimize_alpha;
        out.alpha = kAlphaMin;
        out.fit_term = -std::numeric_limits<double>::infinity();
        out.value = out.fit_term;
        out.degenerate = true;
        break;
      }
      out = optimize_alpha(in.spectrum, in.q0, in.ynorm2, n);
      break;
    }
    case AlphaMode::fixed_alpha: {
      out = loss_rank_fixed_alpha(in, opts.alpha);
      break;
    }
    default:
      throw ParameterError("loss rank: mode " + std::string(to_string(opts.mode)) +
                           " needs a projection; use projective_loss_rank or caic_score");
  }
  if (opts.include_vn) {
    out.include_vn = true;
    out.value += log_unit_ball_volume(n);
  }
  return out;
}

double bernoulli_kl(double p, double q) {
  auto term = [](double a, double b) { return a == 0.0 ? 0.0 : a * std::log(a / b); };
  return term(p, q) + term(1.0 - p, 1.0 - q);
}

double binary_entropy(double p) {
  auto term = [](double a) { return a == 0.0 ? 0.0 : -a * std::log(a); };
  return term(p) + term(1.0 - p);
}

ProjectiveScore projective_loss_rank(std::size_t d, std::size_t n, double rho_fit, double ynorm2) {
  if (d == 0 || d >= n) throw DomainError("projective loss rank: need 0 < d < n");
  if (!(rho_fit > 0.0 && rho_fit < 1.0)) throw DomainError("projective loss rank: fit ratio must lie in (0, 1)");
  if (!(ynorm2 > 0.0)) throw DomainError("projective loss rank: y must be nonzero");
  const double nn = static_cast<double>(n), dd = static_cast<double>(d);
  ProjectiveScore out;
  out.d = d;
  out.n = n;
  out.rho_fit = rho_fit;
  if ((1.0 - rho_fit) * nn > dd) out.alpha_m = rho_fit * dd / ((1.0 - rho_fit) * nn - dd);
  out.kl = bernoulli_kl(dd / nn, 1.0 - rho_fit);
  out.value = 0.5 * nn * std::log(ynorm2) - 0.5 * nn * out.kl;
  return out;
}

ProjectiveScore projective_loss_rank(std::size_t d, std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw DimensionError("projective loss rank: y and yhat sizes differ");
  double rss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) rss += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  const double ynorm2 = norm2_squared(y);
  return projective_loss_rank(d, y.size(), ynorm2 > 0.0 ? rss / ynorm2 : 0.0, ynorm2);
}

SubsetFit fit_subset(std::span<const std::size_t> columns, const Dataset& data) {
  data.validate();
  const std::size_t n = data.size();
  SubsetFit out;
  out.size = columns.size();
  out.n = n;
  out.ynorm2 = norm2_squared(data.y);
  out.fitted.assign(n, 0.0);
  if (columns.empty()) {
    out.rss = out.ynorm2;
    return out;
  }
  if (columns.size() > n) throw RankError("subset larger than the sample", columns[n]);
  DenseMatrix xs(n, columns.size());
  for (std::size_t a = 0; a < columns.size(); ++a) {
    if (columns[a] >= data.dim()) throw ParameterError("subset column " + std::to_string(columns[a]) + " out of range");
    for (std::size_t i = 0; i < n; ++i) xs(i, a) = data.x(i, columns[a]);
  }
  QrDecomposition qr;
  try {
    qr = thin_qr(xs);
  } catch (const RankError& e) {
    throw RankError("subset design is rank deficient at column " + std::to_string(columns[e.column()]),
                    columns[e.column()]);
  }
  for (std::size_t a = 0; a < columns.size(); ++a) {
    const Vector q = qr.q.col(a);
    const double c = dot(q, data.y);
    for (std::size_t i = 0; i < n; ++i) out.fitted[i] += c * q[i];
  }
  for (std::size_t i = 0; i < n; ++i) out.rss += (data.y[i] - out.fitted[i]) * (data.y[i] - out.fitted[i]);
  return out;
}

double variable_selection_score(const SubsetFit& fit) {
  const std::size_t s = fit.size, n = fit.n;
  if (s == 0 || s >= n) throw DomainError("variable selection score: need 0 < |S| < n");
  const double rho = fit.rss / fit.ynorm2;
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("variable selection score: fit ratio must lie in (0, 1)");
  const double nn = static_cast<double>(n), ss = static_cast<double>(s);
  return 0.5 * nn * std::log(fit.rss) + 0.5 * nn * binary_entropy(ss / nn) +
         0.5 * ss * std::log((1.0 - rho) / rho);
}

double variable_selection_score(std::span<const std::size_t> columns, const Dataset& data) {
  return variable_selection_score(fit_subset(columns, data));
}

double caic_log_alpha(std::size_t n, std::size_t s) {
  if (s == 0 || s + 2 >= n) throw DomainError("corrected AIC: need 0 < |S| < n - 2");
  const double nn = static_cast<double>(n), ss = static_cast<double>(s);
  return -nn * (nn + ss) / (ss * (nn - ss - 2.0));
}

double caic_score(const SubsetFit& fit) {
  const std::size_t s = fit.size, n = fit.n;
  if (s + 2 >= n) throw DomainError("corrected AIC: need |S| < n - 2");
  if (!(fit.rss > 0.0)) throw DegenerateFitError("corrected AIC: residual sum of squares is zero");
  const double nn = static_cast<double>(n), ss = static_cast<double>(s);
  return nn * std::log(fit.rss / nn) + nn * (nn + ss) / (nn - ss - 2.0);
}

double caic_score(std::span<const std::size_t> columns, const Dataset& data) {
  return caic_score(fit_subset(columns, data));
}

double rho_norm_loss_rank(const DenseMatrix& m, std::span<const double> y, double rho_norm, double shrink) {
  if (!m.square() || m.rows() != y.size()) throw DimensionError("rho-norm loss rank: M and y sizes differ");
  if (!(rho_norm > 0.0) || !std::isfinite(rho_norm)) throw ParameterError("rho-norm exponent must be positive");
  if (!(shrink > 0.0 && shrink <= 1.0)) throw ParameterError("rho-norm loss rank: shrink must lie in (0, 1]");
  const std::size_t n = m.rows();
  const DenseMatrix a = DenseMatrix::identity(n) - shrink * m;
  const Vector r = a * y;
  double peak = 0.0;
  for (double v : r) peak = std::max(peak, std::abs(v));
  if (!(peak > 0.0)) throw DegenerateFitError("rho-norm loss rank: residual is zero");
  double s = 0.0;
  for (double v : r) s += std::pow(std::abs(v) / peak, rho_norm);
  const double log_norm = std::log(peak) + std::log(s) / rho_norm;
  return static_cast<double>(n) * log_norm - log_abs_det(a) + log_unit_ball_volume(n, rho_norm);
}

}  // namespace lorp
