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
#include "lorp/regressors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lorp/errors.hpp"

namespace lorp {

void Dataset::validate() const {
  if (y.size() < 2) throw DimensionError("dataset needs at least 2 observations");
  if (x.rows() != y.size())
    throw DimensionError("dataset has " + std::to_string(x.rows()) + " design points but " +
                         std::to_string(y.size()) + " responses");
  if (!x.all_finite() || !std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); }))
    throw DomainError("dataset contains non-finite values");
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::knn: return "knn";
    case Family::knn_prime: return "knn_prime";
    case Family::kernel: return "kernel";
    case Family::basis_projection: return "basis_projection";
    case Family::spline: return "spline";
  }
  return "unknown";
}

double Metric::distance(std::span<const double> a, std::span<const double> b) const {
  if (a.size() != b.size()) throw DimensionError("distance: dimension mismatch");
  if (kind == Kind::circular) {
    if (a.size() != 1 || !(period > 0.0)) throw ParameterError("circular metric needs 1-d points and period > 0");
    double d = std::fmod(std::abs(a[0] - b[0]), period);
    return std::min(d, period - d);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

namespace {

/// Indices of x sorted by distance to q; `self` (if < n) is forced first.
std::vector<std::size_t> order_by_distance(const DenseMatrix& x, std::span<const double> q, const Metric& metric,
                                           std::size_t self) {
  const std::size_t n = x.rows();
  Vector dist(n);
  for (std::size_t j = 0; j < n; ++j) dist[j] = metric.distance(x.row(j), q);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if ((a == self) != (b == self)) return a == self;
    return dist[a] < dist[b];
  });
  return idx;
}

void check_design(const DenseMatrix& x) {
  if (x.rows() == 0) throw DimensionError("empty design");
  if (!x.all_finite()) throw DomainError("design contains non-finite values");
}

RegressorMatrix neighbour_average(const DenseMatrix& x, std::size_t k, std::size_t skip, const Metric& metric,
                                  Family family) {
  const std::size_t n = x.rows();
  RegressorMatrix out{DenseMatrix(n, n), family, static_cast<double>(k)};
  const double w = 1.0 / static_cast<double>(k);
  for (std::size_t i = 0; i < n; ++i) {
    const auto order = neighbour_order(x, i, metric);
    for (std::size_t r = skip; r < skip + k; ++r) out.m(i, order[r]) = w;
  }
  return out;
}

}  // namespace

std::vector<std::size_t> neighbour_order(const DenseMatrix& x, std::size_t i, const Metric& metric) {
  return order_by_distance(x, x.row(i), metric, i);
}

RegressorMatrix knn_matrix(const DenseMatrix& x, std::size_t k, const Metric& metric) {
  check_design(x);
  if (k < 1 || k > x.rows())
    throw ParameterError("knn: k = " + std::to_string(k) + " must lie in [1, " + std::to_string(x.rows()) + "]");
  return neighbour_average(x, k, 0, metric, Family::knn);
}

RegressorMatrix knn_prime_matrix(const DenseMatrix& x, std::size_t k, const Metric& metric) {
  check_design(x);
  if (k < 1 || k >= x.rows())
    throw ParameterError("knn_prime: k = " + std::to_string(k) + " must lie in [1, " +
                         std::to_string(x.rows() - 1) + "]");
  return neighbour_average(x, k, 1, metric, Family::knn_prime);
}

namespace {

Vector kernel_weights(const DenseMatrix& x, std::span<const double> q, double width) {
  Vector w(x.rows());
  const double scale = 1.0 / (2.0 * width * width);
  for (std::size_t j = 0; j < x.rows(); ++j) {
    double d2 = 0.0;
    auto r = x.row(j);
    for (std::size_t a = 0; a < r.size(); ++a) d2 += (r[a] - q[a]) * (r[a] - q[a]);
    w[j] = std::exp(-d2 * scale);
  }
  return w;
}

}  // namespace

RegressorMatrix kernel_matrix(const DenseMatrix& x, double width) {
  check_design(x);
  if (!(width > 0.0) || !std::isfinite(width)) throw ParameterError("kernel: width must be positive");
  const std::size_t n = x.rows();
  RegressorMatrix out{DenseMatrix(n, n), Family::kernel, width};
  for (std::size_t i = 0; i < n; ++i) {
    const Vector w = kernel_weights(x, x.row(i), width);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) out.m(i, j) = w[j] / total;
  }
  return out;
}

RegressorMatrix basis_projection_matrix(const DenseMatrix& features) {
  const std::size_t n = features.rows(), d = features.cols();
  RegressorMatrix out{DenseMatrix(n, n), Family::basis_projection, static_cast<double>(d)};
  if (d == 0) return out;
  if (d > n) throw RankError("basis projection: more features than points", n);
  const QrDecomposition qr = thin_qr(features);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t a = 0; a < d; ++a) s += qr.q(i, a) * qr.q(j, a);
      out.m(i, j) = out.m(j, i) = s;
    }
  return out;
}

namespace {

/// Sorted order of 1-d points; throws TieError on duplicates.
std::vector<std::size_t> sorted_distinct_order(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  for (std::size_t i = 1; i < order.size(); ++i)
    if (!(x[order[i]] > x[order[i - 1]]))
      throw TieError("spline: duplicate design point " + std::to_string(x[order[i]]));
  return order;
}

}  // namespace

RegressorMatrix spline_matrix(std::span<const double> x, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ParameterError("spline: lambda must be >= 0");
  if (x.size() < 4) throw DimensionError("spline: need at least 4 design points");
  const auto order = sorted_distinct_order(x);
  Vector knots(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) knots[i] = x[order[i]];
  const DenseMatrix sorted_hat = spline::Smoother(knots).hat_matrix(lambda);
  const std::size_t n = x.size();
  RegressorMatrix out{DenseMatrix(n, n), Family::spline, lambda};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.m(order[i], order[j]) = sorted_hat(i, j);
  return out;
}

FeatureMap polynomial_feature_map(std::size_t d, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = hi > lo ? 0.5 * (hi - lo) : 1.0;
  return [d, mid, half](std::span<const double> p) {
    if (p.size() != 1) throw DimensionError("polynomial features need 1-d points");
    const double t = (p[0] - mid) / half;
    Vector phi(d);
    for (std::size_t a = 0; a < d; ++a) {
      if (a == 0) phi[a] = 1.0;
      else if (a == 1) phi[a] = t;
      else phi[a] = 2.0 * t * phi[a - 1] - phi[a - 2];
    }
    return phi;
  };
}

DenseMatrix feature_matrix(const FeatureMap& phi, const DenseMatrix& x) {
  if (x.rows() == 0) return {};
  const Vector first = phi(x.row(0));
  DenseMatrix out(x.rows(), first.size());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const Vector f = i == 0 ? first : phi(x.row(i));
    if (f.size() != first.size()) throw DimensionError("feature map returned inconsistent sizes");
    std::copy(f.begin(), f.end(), out.row(i).begin());
  }
  return out;
}

RegressorMatrix RegressorSpec::build(const DenseMatrix& x) const {
  switch (family) {
    case Family::knn: return knn_matrix(x, static_cast<std::size_t>(complexity), metric);
    case Family::knn_prime: return knn_prime_matrix(x, static_cast<std::size_t>(complexity), metric);
    case Family::kernel: return kernel_matrix(x, complexity);
    case Family::basis_projection: {
      if (!features) throw ParameterError("basis_projection needs a feature map");
      return basis_projection_matrix(feature_matrix(features, x));
    }
    case Family::spline: {
      if (x.cols() != 1) throw DimensionError("spline needs 1-d design points");
      return spline_matrix(x.entries(), complexity);
    }
  }
  throw ParameterError("unknown regressor family");
}

DenseMatrix prepend_point(std::span<const double> x0, const DenseMatrix& x) {
  if (x0.size() != x.cols()) throw DimensionError("query point dimension mismatch");
  DenseMatrix out(x.rows() + 1, x.cols());
  std::copy(x0.begin(), x0.end(), out.row(0).begin());
  for (std::size_t i = 0; i < x.rows(); ++i) std::copy(x.row(i).begin(), x.row(i).end(), out.row(i + 1).begin());
  return out;
}

namespace {

double natural_spline_eval(std::span<const double> knots, std::span<const double> values, double t);

}  // namespace

double predict(const RegressorSpec& spec, std::span<const double> x0, const Dataset& data) {
  data.validate();
  if (x0.size() != data.dim()) throw DimensionError("query point dimension mismatch");
  const std::size_t n = data.size();
  switch (spec.family) {
    case Family::knn:
    case Family::knn_prime: {
      const auto k = static_cast<std::size_t>(spec.complexity);
      const std::size_t skip = spec.family == Family::knn_prime ? 1 : 0;
      if (k < 1 || k + skip > n) throw ParameterError("predict: k out of range");
      const auto order = order_by_distance(data.x, x0, spec.metric, n);
      double s = 0.0;
      for (std::size_t r = skip; r < skip + k; ++r) s += data.y[order[r]];
      return s / static_cast<double>(k);
    }
    case Family::kernel: {
      if (!(spec.complexity > 0.0)) throw ParameterError("kernel: width must be positive");
      const Vector w = kernel_weights(data.x, x0, spec.complexity);
      const double total = std::accumulate(w.begin(), w.end(), 0.0);
      if (!(total > 0.0)) throw DegeneratePredictionError("kernel: all weights underflow at query point");
      return dot(w, data.y) / total;
    }
    case Family::basis_projection: {
      if (!spec.features) throw ParameterError("basis_projection needs a feature map");
      const DenseMatrix phi = feature_matrix(spec.features, data.x);
      const Vector phi0 = spec.features(x0);
      if (phi.cols() == 0) return 0.0;
      const QrDecomposition qr = thin_qr(phi);
      // w = R^-1 Q^T y
      const std::size_t d = phi.cols();
      Vector w(d);
      for (std::size_t a = 0; a < d; ++a) w[a] = dot(qr.q.col(a), data.y);
      for (std::size_t a = d; a-- > 0;) {
        for (std::size_t b = a + 1; b < d; ++b) w[a] -= qr.r(a, b) * w[b];
        w[a] /= qr.r(a, a);
      }
      return dot(phi0, w);
    }
    case Family::spline: {
      if (data.dim() != 1) throw DimensionError("spline needs 1-d design points");
      const auto order = sorted_distinct_order(data.x.entries());
      Vector knots(n), ys(n);
      for (std::size_t i = 0; i < n; ++i) {
        knots[i] = data.x(order[i], 0);
        ys[i] = data.y[order[i]];
      }
      const Vector fitted = spline::Smoother(knots).hat_matrix(spec.complexity) * std::span<const double>(ys);
      return natural_spline_eval(knots, fitted, x0[0]);
    }
  }
  throw ParameterError("unknown regressor family");
}

double canonical_predict(const RegressorSpec& spec, std::span<const double> x0, const Dataset& data) {
  data.validate();
  const DenseMatrix xp = prepend_point(x0, data.x);
  const RegressorMatrix mp = spec.build(xp);
  const double m00 = mp.m(0, 0);
  if (!(m00 < 1.0 - 1e-10))
    throw DegeneratePredictionError("canonical prediction undefined: M'_00 = " + std::to_string(m00));
  double s = 0.0;
  for (std::size_t j = 0; j < data.size(); ++j) s += mp.m(0, j + 1) * data.y[j];
  return s / (1.0 - m00);
}

namespace {

/// Natural cubic spline through (knots, values), evaluated at t; linear
/// extrapolation outside the knot range.
double natural_spline_eval(std::span<const double> knots, std::span<const double> values, double t) {
  const std::size_t n = knots.size();
  Vector h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = knots[i + 1] - knots[i];
  // Second derivatives at interior knots: R gamma = Q^T f.
  Vector gamma(n, 0.0);
  if (n > 2) {
    const std::size_t m = n - 2;
    DenseMatrix r(m, m);
    Vector rhs(m);
    for (std::size_t j = 0; j < m; ++j) {
      r(j, j) = (h[j] + h[j + 1]) / 3.0;
      if (j + 1 < m) r(j, j + 1) = r(j + 1, j) = h[j + 1] / 6.0;
      rhs[j] = (values[j + 2] - values[j + 1]) / h[j + 1] - (values[j + 1] - values[j]) / h[j];
    }
    const Vector g = solve_spd(r, rhs);
    for (std::size_t j = 0; j < m; ++j) gamma[j + 1] = g[j];
  }
  if (t <= knots[0]) {
    const double slope = (values[1] - values[0]) / h[0] - h[0] * gamma[1] / 6.0;
    return values[0] + slope * (t - knots[0]);
  }
  if (t >= knots[n - 1]) {
    const double slope = (values[n - 1] - values[n - 2]) / h[n - 2] + h[n - 2] * gamma[n - 2] / 6.0;
    return values[n - 1] + slope * (t - knots[n - 1]);
  }
  const std::size_t i =
      static_cast<std::size_t>(std::upper_bound(knots.begin(), knots.end(), t) - knots.begin()) - 1;
  const double a = (knots[i + 1] - t) / h[i];
  const double b = (t - knots[i]) / h[i];
  return a * values[i] + b * values[i + 1] +
         ((a * a * a - a) * gamma[i] + (b * b * b - b) * gamma[i + 1]) * h[i] * h[i] / 6.0;
}

}  // namespace

}  // namespace lorp
