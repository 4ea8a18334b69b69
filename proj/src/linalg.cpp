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
#include "lorp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lorp/errors.hpp"

namespace lorp {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_)
    throw DimensionError("DenseMatrix: " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                         " needs " + std::to_string(rows_ * cols_) + " entries, got " +
                         std::to_string(data_.size()));
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("DenseMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> d) {
  DenseMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

DenseMatrix DenseMatrix::column(std::span<const double> v) {
  return DenseMatrix(v.size(), 1, std::vector<double>(v.begin(), v.end()));
}

Vector DenseMatrix::col(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double DenseMatrix::trace() const {
  if (!square()) throw DimensionError("trace of non-square matrix");
  double t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double DenseMatrix::frobenius_norm() const { return std::sqrt(norm2_squared(data_)); }

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("matrix sum: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("matrix difference: shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("matrix product: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Vector operator*(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionError("matrix-vector product: size mismatch");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: size mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2_squared(std::span<const double> a) { return dot(a, a); }

double quadratic_form(const DenseMatrix& a, std::span<const double> x) { return dot(x, a * x); }

DenseMatrix gram(const DenseMatrix& a) {
  DenseMatrix g(a.cols(), a.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto r = a.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      if (r[i] == 0.0) continue;
      for (std::size_t j = i; j < a.cols(); ++j) g(i, j) += r[i] * r[j];
    }
  }
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

double asymmetry(const DenseMatrix& a) {
  if (!a.square()) throw DimensionError("asymmetry of non-square matrix");
  double scale = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      scale = std::max(scale, std::abs(a(i, j)));
      worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
    }
  return scale == 0.0 ? 0.0 : worst / scale;
}

double Spectrum::sum() const { return std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0); }

namespace {

void require_square(const DenseMatrix& a, const char* what) {
  if (!a.square())
    throw DimensionError(std::string(what) + ": matrix is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected square");
  if (!a.all_finite()) throw DomainError(std::string(what) + ": non-finite entry");
}

}  // namespace

Spectrum sym_eig(const DenseMatrix& input, const SymEigOptions& opts) {
  require_square(input, "sym_eig");
  if (asymmetry(input) > opts.symmetry_tol)
    throw AsymmetryError("sym_eig: input is not symmetric (relative asymmetry " +
                         std::to_string(asymmetry(input)) + ")");
  const std::size_t n = input.rows();
  DenseMatrix a = input;
  // Symmetrize exactly so the rotations see a symmetric operand.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));

  DenseMatrix v = opts.want_vectors ? DenseMatrix::identity(n) : DenseMatrix();
  Vector d(n), b(n), z(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = b[i] = a(i, i);

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::abs(a(p, q));
    if (off == 0.0) break;
    const double thresh = sweep < 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double g = 100.0 * std::abs(a(p, q));
        if (sweep > 3 && std::abs(d[p]) + g == std::abs(d[p]) && std::abs(d[q]) + g == std::abs(d[q])) {
          a(p, q) = 0.0;
          continue;
        }
        if (std::abs(a(p, q)) <= thresh) continue;
        const double h = d[q] - d[p];
        double t;
        if (std::abs(h) + g == std::abs(h)) {
          t = a(p, q) / h;
        } else {
          const double theta = 0.5 * h / a(p, q);
          t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double hh = t * a(p, q);
        z[p] -= hh;
        z[q] += hh;
        d[p] -= hh;
        d[q] += hh;
        a(p, q) = 0.0;
        auto rotate = [&](DenseMatrix& m, std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
          const double gg = m(i, j);
          const double hv = m(k, l);
          m(i, j) = gg - s * (hv + gg * tau);
          m(k, l) = hv + s * (gg - hv * tau);
        };
        for (std::size_t j = 0; j < p; ++j) rotate(a, j, p, j, q);
        for (std::size_t j = p + 1; j < q; ++j) rotate(a, p, j, j, q);
        for (std::size_t j = q + 1; j < n; ++j) rotate(a, p, j, q, j);
        if (opts.want_vectors)
          for (std::size_t j = 0; j < n; ++j) rotate(v, j, p, j, q);
      }
    }
    for (std::size_t p = 0; p < n; ++p) {
      b[p] += z[p];
      d[p] = b[p];
      z[p] = 0.0;
    }
    if (sweep == kMaxSweeps - 1) throw AccuracyError("sym_eig: Jacobi sweeps did not converge");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });

  Spectrum out;
  out.eigenvalues.resize(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.eigenvalues[i] = d[order[i]];
    scale = std::max(scale, std::abs(d[i]));
  }
  out.zero_tolerance = opts.zero_tol_abs ? *opts.zero_tol_abs : opts.zero_tol_rel * scale;
  out.zero_mode_count = static_cast<std::size_t>(
      std::count_if(out.eigenvalues.begin(), out.eigenvalues.end(),
                    [&](double e) { return std::abs(e) <= out.zero_tolerance; }));
  if (opts.want_vectors) {
    DenseMatrix sorted(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) sorted(i, j) = v(i, order[j]);
    out.eigenvectors = std::move(sorted);
  }
  return out;
}

DenseMatrix cholesky(const DenseMatrix& a) {
  require_square(a, "cholesky");
  const std::size_t n = a.rows();
  DenseMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0))
      throw DefinitenessError("cholesky: matrix is not positive definite (pivot " + std::to_string(j) + ")");
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

double log_det_psd(const DenseMatrix& a) {
  const DenseMatrix l = cholesky(a);
  double s = 0.0;
  for (std::size_t i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

namespace {

Vector cholesky_solve(const DenseMatrix& l, std::span<const double> b) {
  const std::size_t n = l.rows();
  Vector x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) x[i] -= l(i, k) * x[k];
    x[i] /= l(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) x[i] -= l(k, i) * x[k];
    x[i] /= l(i, i);
  }
  return x;
}

DenseMatrix spd_factor_or_throw(const DenseMatrix& a) {
  try {
    return cholesky(a);
  } catch (const DefinitenessError& e) {
    throw SingularityError(std::string("solve_spd: ") + e.what());
  }
}

}  // namespace

Vector solve_spd(const DenseMatrix& a, std::span<const double> b) {
  if (a.rows() != b.size()) throw DimensionError("solve_spd: right-hand side size mismatch");
  return cholesky_solve(spd_factor_or_throw(a), b);
}

DenseMatrix solve_spd(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("solve_spd: right-hand side size mismatch");
  const DenseMatrix l = spd_factor_or_throw(a);
  DenseMatrix x(b.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    const Vector xj = cholesky_solve(l, b.col(j));
    for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = xj[i];
  }
  return x;
}

namespace {

struct Lu {
  DenseMatrix lu;
  std::vector<std::size_t> perm;
  int sign = 1;
};

Lu lu_factor(const DenseMatrix& a, const char* what) {
  require_square(a, what);
  const std::size_t n = a.rows();
  Lu f{a, std::vector<std::size_t>(n), 1};
  std::iota(f.perm.begin(), f.perm.end(), 0);
  double scale = 0.0;
  for (double v : a.entries()) scale = std::max(scale, std::abs(v));
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(f.lu(i, k)) > std::abs(f.lu(piv, k))) piv = i;
    if (std::abs(f.lu(piv, k)) <= 1e-14 * scale || f.lu(piv, k) == 0.0)
      throw SingularityError(std::string(what) + ": matrix is singular (pivot " + std::to_string(k) + ")");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
      f.sign = -f.sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = f.lu(i, k) /= f.lu(k, k);
      if (m == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) f.lu(i, j) -= m * f.lu(k, j);
    }
  }
  return f;
}

}  // namespace

double log_abs_det(const DenseMatrix& a) {
  const Lu f = lu_factor(a, "log_abs_det");
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) s += std::log(std::abs(f.lu(i, i)));
  return s;
}

DenseMatrix solve(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("solve: right-hand side size mismatch");
  const Lu f = lu_factor(a, "solve");
  const std::size_t n = a.rows();
  DenseMatrix x(n, b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = b(f.perm[i], c);
      for (std::size_t k = 0; k < i; ++k) y[i] -= f.lu(i, k) * y[k];
    }
    for (std::size_t i = n; i-- > 0;) {
      for (std::size_t k = i + 1; k < n; ++k) y[i] -= f.lu(i, k) * y[k];
      y[i] /= f.lu(i, i);
    }
    for (std::size_t i = 0; i < n; ++i) x(i, c) = y[i];
  }
  return x;
}

QrDecomposition thin_qr(const DenseMatrix& input, double rank_tol) {
  const std::size_t m = input.rows(), n = input.cols();
  if (m < n) throw DimensionError("thin_qr: more columns than rows");
  if (!input.all_finite()) throw DomainError("thin_qr: non-finite entry");
  DenseMatrix a = input;
  std::vector<Vector> reflectors(n);
  for (std::size_t k = 0; k < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < m; ++i) norm += a(i, k) * a(i, k);
    norm = std::sqrt(norm);
    Vector v(m - k, 0.0);
    if (norm > 0.0) {
      const double alpha = a(k, k) > 0 ? -norm : norm;
      for (std::size_t i = k; i < m; ++i) v[i - k] = a(i, k);
      v[0] -= alpha;
      const double vn = std::sqrt(norm2_squared(v));
      if (vn > 0.0)
        for (double& x : v) x /= vn;
      for (std::size_t j = k; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = k; i < m; ++i) s += v[i - k] * a(i, j);
        for (std::size_t i = k; i < m; ++i) a(i, j) -= 2.0 * s * v[i - k];
      }
    }
    reflectors[k] = std::move(v);
  }
  QrDecomposition out{DenseMatrix(m, n), DenseMatrix(n, n)};
  double rmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) out.r(i, j) = a(i, j);
    rmax = std::max(rmax, std::abs(a(i, i)));
  }
  for (std::size_t j = 0; j < n; ++j)
    if (!(std::abs(out.r(j, j)) > rank_tol * rmax))
      throw RankError("design matrix is rank deficient at column " + std::to_string(j), j);
  // Accumulate Q = H_0 ... H_{n-1} applied to the first n unit vectors.
  for (std::size_t j = 0; j < n; ++j) out.q(j, j) = 1.0;
  for (std::size_t k = n; k-- > 0;) {
    const Vector& v = reflectors[k];
    if (v.empty()) continue;
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < m; ++i) s += v[i - k] * out.q(i, j);
      for (std::size_t i = k; i < m; ++i) out.q(i, j) -= 2.0 * s * v[i - k];
    }
  }
  return out;
}

}  // namespace lorp
