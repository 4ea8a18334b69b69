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
#include "lorp/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lorp/errors.hpp"

namespace lorp {

void GridSpec::validate() const {
  if (n1 < 1) throw ParameterError("grid: n1 must be positive");
  if (k1 % 2 == 0) throw ParameterError("grid: k1 = " + std::to_string(k1) + " must be odd");
  if (k1 < 1 || k1 > n1) throw ParameterError("grid: need 1 <= k1 <= n1");
  if (dim < 1) throw ParameterError("grid: dim must be >= 1");
}

double GridSpec::n() const { return std::pow(static_cast<double>(n1), static_cast<double>(dim)); }
double GridSpec::k() const { return std::pow(static_cast<double>(k1), static_cast<double>(dim)); }

DenseMatrix circulant_knn_matrix(std::size_t n1, std::size_t k1) {
  GridSpec{n1, k1, 1}.validate();
  const std::size_t h = (k1 - 1) / 2;
  DenseMatrix m(n1, n1);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n1; ++j) {
      const std::size_t d = i > j ? i - j : j - i;
      if (std::min(d, n1 - d) <= h) m(i, j) = 1.0 / static_cast<double>(k1);
    }
  return m;
}

Vector circulant_eigs(std::size_t n1, std::size_t k1) {
  GridSpec{n1, k1, 1}.validate();
  Vector b(n1);
  const double n = static_cast<double>(n1), k = static_cast<double>(k1);
  for (std::size_t l = 1; l < n1; ++l) {
    const double t = std::numbers::pi * static_cast<double>(l) / n;
    b[l - 1] = std::sin(t * k) / (k * std::sin(t));
  }
  b[n1 - 1] = 1.0;
  return b;
}

double c1_exact(std::size_t n1, std::size_t k1) {
  const Vector b = circulant_eigs(n1, k1);
  double s = 0.0;
  for (std::size_t l = 0; l + 1 < n1; ++l) {
    if (!(1.0 - b[l] > 0.0)) throw SingularityError("c1_exact: mode " + std::to_string(l + 1) + " has eigenvalue 1");
    s -= std::log1p(-b[l]);
  }
  return static_cast<double>(k1) / static_cast<double>(n1) * s;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
  struct Rec {
    const std::function<double(double)>& f;
    double step(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) const {
      const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      const double flm = f(lm), frm = f(rm);
      const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
      const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
      const double err = left + right - whole;
      if (std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
      if (depth <= 0) throw AccuracyError("adaptive Simpson: recursion depth exhausted");
      return step(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  } rec{f};
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return rec.step(a, b, fa, fm, fb, whole, tol, max_depth);
}

namespace {

/// k sin z - sin kz, by Taylor series when kz is small.
double dirichlet_gap(double k, double z) {
  const double kz = k * z;
  if (std::abs(kz) > 0.5) return k * std::sin(z) - std::sin(kz);
  // sum_{m>=1} (-1)^m z^{2m+1} (k - k^{2m+1}) / (2m+1)!
  double s = 0.0, zp = z, kp = k, fact = 1.0;
  for (int m = 1; m < 30; ++m) {
    zp *= z * z;
    kp *= k * k;
    fact *= (2.0 * m) * (2.0 * m + 1.0);
    const double term = (m % 2 ? -1.0 : 1.0) * zp * (k - kp) / fact;
    s += term;
    if (std::abs(term) < 1e-18 * std::abs(s)) break;
  }
  return s;
}

/// 1 - sin(t)/t, by Taylor series for small t.
double sinc_gap(double t) {
  if (std::abs(t) > 0.5) return 1.0 - std::sin(t) / t;
  double s = 0.0, tp = 1.0, fact = 1.0;
  for (int m = 1; m < 30; ++m) {
    tp *= t * t;
    fact *= (2.0 * m) * (2.0 * m + 1.0);
    const double term = (m % 2 ? 1.0 : -1.0) * tp / fact;
    s += term;
    if (std::abs(term) < 1e-18 * std::abs(s)) break;
  }
  return s;
}

}  // namespace

double c1_limit_k(std::size_t k1, double tol) {
  if (k1 < 3 || k1 % 2 == 0) throw ParameterError("c1_limit_k: k1 must be odd and >= 3");
  const double k = static_cast<double>(k1);
  const double c = (k * k - 1.0) / 6.0;
  const double half_pi = 0.5 * std::numbers::pi;
  // log(1 - s(z)) = log(c z^2) + log((1 - s(z)) / (c z^2)); the first part is integrated exactly.
  auto smooth = [&](double z) {
    if (z == 0.0) return 0.0;
    const double gap = dirichlet_gap(k, z) / (k * std::sin(z));
    return std::log(gap / (c * z * z));
  };
  double integral = half_pi * (std::log(c) + 2.0 * std::log(half_pi) - 2.0);
  const double panel = std::numbers::pi / k;
  for (double a = 0.0; a < half_pi; a += panel) {
    const double b = std::min(a + panel, half_pi);
    integral += adaptive_simpson(smooth, a, b, tol * panel);
  }
  return -2.0 * k / std::numbers::pi * integral;
}

double c1_limit(double tol) {
  constexpr int kPanels = 2000;
  const double pi = std::numbers::pi;
  // -(2/pi) int_0^inf log(1 - sin t / t) dt. First panel with the t^2/6 singularity removed.
  auto smooth = [](double t) { return t == 0.0 ? 0.0 : std::log(sinc_gap(t) * 6.0 / (t * t)); };
  auto plain = [](double t) { return std::log(sinc_gap(t)); };
  double integral = pi * (2.0 * std::log(pi) - 2.0 - std::log(6.0)) + adaptive_simpson(smooth, 0.0, pi, tol);
  for (int j = 1; j < kPanels; ++j) integral += adaptive_simpson(plain, j * pi, (j + 1) * pi, tol);
  // Tail beyond T = N pi: -log(1-u) = u + u^2/2 + O(u^3) with u = sin t / t.
  const double t = kPanels * pi;
  const double tail = (kPanels % 2 ? -1.0 : 1.0) / t + 1.0 / (4.0 * t);
  return -2.0 / pi * integral + 2.0 / pi * tail;
}

double torus_logdet(const GridSpec& spec, std::size_t budget) {
  spec.validate();
  double total = 1.0;
  for (std::size_t a = 0; a < spec.dim; ++a) total *= static_cast<double>(spec.n1);
  if (total > static_cast<double>(budget))
    throw BudgetError("torus_logdet: " + std::to_string(static_cast<long long>(total)) + " modes exceed budget");
  const Vector b = circulant_eigs(spec.n1, spec.k1);
  const std::size_t n1 = spec.n1, dim = spec.dim;
  std::vector<std::size_t> idx(dim, 0);
  // prefix[a] = product of b over axes < a.
  Vector prefix(dim + 1, 1.0);
  for (std::size_t a = 0; a < dim; ++a) prefix[a + 1] = prefix[a] * b[0];
  const auto count = static_cast<std::size_t>(total);
  double s = 0.0;
  for (std::size_t it = 0; it < count; ++it) {
    bool all_unit = true;
    for (std::size_t a = 0; a < dim && all_unit; ++a) all_unit = idx[a] == n1 - 1;
    if (!all_unit) {
      const double p = prefix[dim];
      if (!(1.0 - p > 0.0)) throw SingularityError("torus_logdet: non-constant mode with eigenvalue 1");
      s -= std::log1p(-p);
    }
    // Advance the last axis fastest and refresh the prefix products.
    std::size_t a = dim;
    while (a-- > 0) {
      if (++idx[a] < n1) break;
      idx[a] = 0;
    }
    if (a == static_cast<std::size_t>(-1)) break;
    for (std::size_t c = a; c < dim; ++c) prefix[c + 1] = prefix[c] * b[idx[c]];
  }
  return s;
}

namespace {

/// Closed walks of length s on Z_{n1} with steps in [-h, h]; exact in
/// doubles while the counts stay below 2^53.
double closed_walks(std::size_t n1, std::size_t k1, std::size_t s) {
  const std::size_t h = (k1 - 1) / 2;
  Vector dist(n1, 0.0), next(n1), prefix(n1 + 1);
  dist[0] = 1.0;
  for (std::size_t step = 0; step < s; ++step) {
    prefix[0] = 0.0;
    for (std::size_t i = 0; i < n1; ++i) prefix[i + 1] = prefix[i] + dist[i];
    for (std::size_t i = 0; i < n1; ++i) {
      // Sum of dist over positions i-h..i+h modulo n1.
      double v = 0.0;
      if (2 * h + 1 >= n1) {
        v = prefix[n1] * static_cast<double>((2 * h + 1) / n1);
        const std::size_t rem = (2 * h + 1) % n1;
        const std::size_t start = (i + n1 - h % n1) % n1;
        for (std::size_t r = 0; r < rem; ++r) v += dist[(start + r) % n1];
      } else {
        const long lo = static_cast<long>(i) - static_cast<long>(h), hi = static_cast<long>(i + h);
        const long n = static_cast<long>(n1);
        if (lo >= 0 && hi < n) {
          v = prefix[hi + 1] - prefix[lo];
        } else if (lo < 0) {
          v = prefix[hi + 1] + (prefix[n1] - prefix[n + lo]);
        } else {
          v = (prefix[n1] - prefix[lo]) + prefix[hi - n + 1];
        }
      }
      next[i] = v;
    }
    std::swap(dist, next);
  }
  return dist[0];
}

}  // namespace

double taylor_A(std::size_t n1, std::size_t k1, std::size_t s) {
  GridSpec{n1, k1, 1}.validate();
  if (s < 1) throw ParameterError("taylor_A: s must be >= 1");
  const double k = static_cast<double>(k1);
  if (static_cast<double>(s) * std::log2(k) < 52.0) return closed_walks(n1, k1, s) / std::pow(k, static_cast<double>(s - 1));
  const Vector b = circulant_eigs(n1, k1);
  double sum = 0.0;
  for (double v : b) sum += std::pow(v, static_cast<double>(s));
  return k / static_cast<double>(n1) * sum;
}

double c_d_taylor(const GridSpec& spec, std::size_t s_max) {
  spec.validate();
  if (s_max < 2) throw ParameterError("c_d_taylor: s_max must be >= 2");
  const double kn = spec.k() / spec.n();
  const double d = static_cast<double>(spec.dim);
  const Vector b = circulant_eigs(spec.n1, spec.k1);
  const double k1n1 = static_cast<double>(spec.k1) / static_cast<double>(spec.n1);
  Vector power(b.size(), 1.0);
  double total = 0.0;
  for (std::size_t s = 1; s <= s_max; ++s) {
    for (std::size_t l = 0; l < b.size(); ++l) power[l] *= b[l];
    double a;
    if (s <= 64 && static_cast<double>(s) * std::log2(static_cast<double>(spec.k1)) < 52.0) {
      a = taylor_A(spec.n1, spec.k1, s);
    } else {
      double sum = 0.0;
      for (double v : power) sum += v;
      a = k1n1 * sum;
    }
    total += (std::pow(a, d) - kn) / static_cast<double>(s);
  }
  return total;
}

double c_d_taylor_dim_limit(std::size_t n1, std::size_t k1, std::size_t s_max) {
  GridSpec{n1, k1, 1}.validate();
  if (k1 < 3 || k1 >= n1) throw ParameterError("c_d_taylor_dim_limit: need 3 <= k1 < n1");
  double total = 0.0;
  for (std::size_t s = 1; s <= s_max; ++s) {
    if (static_cast<double>(s) * std::log2(static_cast<double>(k1)) >= 52.0) break;
    if (taylor_A(n1, k1, s) == 1.0) total += 1.0 / static_cast<double>(s);
  }
  return total;
}

}  // namespace lorp
