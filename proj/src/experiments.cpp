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
#include "lorp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>

#include "lorp/criteria.hpp"
#include "lorp/errors.hpp"
#include "lorp/lossrank.hpp"
#include "lorp/random.hpp"

namespace lorp {

namespace {

/// Calls body(i) for i in [0, count) on up to `jobs` threads; the first
/// exception is rethrown on the calling thread.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& body) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::size_t first_argmin(std::span<const double> v) {
  return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

CriterionEstimate percent_estimate(std::string name, std::size_t hits, std::size_t reps) {
  const double p = 100.0 * static_cast<double>(hits) / static_cast<double>(reps);
  return {std::move(name), p, std::sqrt(p * (100.0 - p) / static_cast<double>(reps))};
}

}  // namespace

void Table1Config::validate() const {
  if (d < 1) throw ParameterError("table1: d must be >= 1");
  if (n <= d + 1) throw ParameterError("table1: need n > d + 1");
  if (!(snr > 0.0)) throw ParameterError("table1: snr must be positive");
  if (!(signal > 0.0)) throw ParameterError("table1: signal length must be positive");
  if (replications < 1) throw ParameterError("table1: replications must be >= 1");
}

Table1Draw gen_table1(const Table1Config& config, std::uint64_t replication, std::uint32_t attempt) {
  config.validate();
  RandomStream rng(config.seed, attempt, replication);
  const std::size_t n = config.n, d = config.d;
  Table1Draw out;
  out.data.x = DenseMatrix(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) out.data.x(i, j) = rng.uniform(-1.0, 1.0);
  out.true_size = 1 + static_cast<std::size_t>(rng.below(d));
  out.beta.assign(d, 0.0);
  double unorm2 = 0.0;
  do {
    unorm2 = 0.0;
    for (std::size_t j = 0; j < out.true_size; ++j) {
      out.beta[j] = rng.uniform(-1.0, 1.0);
      unorm2 += out.beta[j] * out.beta[j];
    }
  } while (!(unorm2 > 0.0));
  const double length = config.signal_is_squared_norm ? std::sqrt(config.signal) : config.signal;
  for (std::size_t j = 0; j < out.true_size; ++j) out.beta[j] *= length / std::sqrt(unorm2);
  out.sigma2 = norm2_squared(out.beta) / config.snr;
  const double sd = std::sqrt(out.sigma2);
  out.data.y = out.data.x * std::span<const double>(out.beta);
  for (double& v : out.data.y) v += sd * rng.normal();
  return out;
}

Vector nested_rss(const DenseMatrix& x, std::span<const double> y) {
  const QrDecomposition qr = thin_qr(x);
  double rss = norm2_squared(y);
  Vector out(x.cols());
  for (std::size_t a = 0; a < x.cols(); ++a) {
    double c = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) c += qr.q(i, a) * y[i];
    rss -= c * c;
    out[a] = rss;
  }
  return out;
}

Table1Result run_table1(const Table1Config& config) {
  config.validate();
  struct Outcome {
    bool lorp = false, aic = false, bic = false;
    std::size_t resampled = 0;
  };
  std::vector<Outcome> outcomes(config.replications);
  parallel_for(config.replications, config.jobs, [&](std::size_t rep) {
    Outcome& o = outcomes[rep];
    for (std::uint32_t attempt = 0;; ++attempt) {
      if (attempt > 100) throw DegenerateFitError("table1: design draws keep coming out rank deficient");
      const Table1Draw draw = gen_table1(config, rep, attempt);
      Vector rss;
      try {
        rss = nested_rss(draw.data.x, draw.data.y);
      } catch (const RankError&) {
        ++o.resampled;
        continue;
      }
      const std::size_t n = config.n, d = config.d;
      const double yy = norm2_squared(draw.data.y);
      Vector lr(d), a(d), b(d);
      for (std::size_t k = 1; k <= d; ++k) {
        lr[k - 1] = variable_selection_score(SubsetFit{k, n, rss[k - 1], yy, {}});
        a[k - 1] = aic(rss[k - 1], n, k);
        b[k - 1] = bic(rss[k - 1], n, k);
      }
      o.lorp = first_argmin(lr) + 1 == draw.true_size;
      o.aic = first_argmin(a) + 1 == draw.true_size;
      o.bic = first_argmin(b) + 1 == draw.true_size;
      break;
    }
  });
  std::size_t hl = 0, ha = 0, hb = 0;
  Table1Result out;
  out.config = config;
  for (const auto& o : outcomes) {
    hl += o.lorp;
    ha += o.aic;
    hb += o.bic;
    out.resampled += o.resampled;
  }
  out.criteria = {percent_estimate("lorp", hl, config.replications), percent_estimate("aic", ha, config.replications),
                  percent_estimate("bic", hb, config.replications)};
  return out;
}

void Table2Config::validate() const {
  if (n < 6) throw ParameterError("table2: n must be >= 6");
  if (!(sigma > 0.0)) throw ParameterError("table2: sigma must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("table2: delta must lie in (0, 1)");
  if (max_order + 3 > n) throw ParameterError("table2: need K <= n - 3");
  if (replications < 1) throw ParameterError("table2: replications must be >= 1");
}

std::size_t Table2Config::orders() const { return max_order > 0 ? max_order : std::min<std::size_t>(163, n - 3); }

namespace {

Vector shibata_design(std::size_t n, double delta) {
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = delta * static_cast<double>(i + 1) / static_cast<double>(n + 1);
  return x;
}

}  // namespace

Dataset gen_shibata(const Table2Config& config, std::uint64_t replication) {
  config.validate();
  RandomStream rng(config.seed, 0, replication);
  const Vector x = shibata_design(config.n, config.delta);
  Dataset out{DenseMatrix(config.n, 1, x), Vector(config.n)};
  for (std::size_t i = 0; i < config.n; ++i) out.y[i] = -std::log1p(-x[i]) + config.sigma * rng.normal();
  return out;
}

DenseMatrix shibata_features(std::span<const double> x, std::size_t orders, double delta) {
  DenseMatrix phi(x.size(), orders);
  for (std::size_t i = 0; i < x.size(); ++i) {
    phi(i, 0) = 1.0;
    for (std::size_t l = 1; l < orders; ++l)
      phi(i, l) = std::cos(std::numbers::pi * static_cast<double>(l) * x[i] / delta) / static_cast<double>(l + 1);
  }
  return phi;
}

Table2Result run_table2(const Table2Config& config) {
  config.validate();
  const std::size_t n = config.n, orders = config.orders();
  const Vector x = shibata_design(n, config.delta);
  Vector truth(n);
  for (std::size_t i = 0; i < n; ++i) truth[i] = -std::log1p(-x[i]);
  const QrDecomposition qr = thin_qr(shibata_features(x, orders, config.delta));

  Table2Result out;
  out.config = config;
  out.orders = orders;
  double rmax = 0.0, rmin = INFINITY;
  for (std::size_t a = 0; a < orders; ++a) {
    rmax = std::max(rmax, std::abs(qr.r(a, a)));
    rmin = std::min(rmin, std::abs(qr.r(a, a)));
  }
  out.condition = rmax / rmin;

  const Vector ct = qr.q.transposed() * std::span<const double>(truth);
  const double tt = norm2_squared(truth);
  const double s2 = config.sigma * config.sigma;
  {
    double bias = tt;
    out.min_risk = INFINITY;
    for (std::size_t k = 1; k <= orders; ++k) {
      bias -= ct[k - 1] * ct[k - 1];
      const double risk = std::max(bias, 0.0) + static_cast<double>(k) * s2;
      if (risk < out.min_risk) {
        out.min_risk = risk;
        out.best_order = k;
      }
    }
  }

  struct Losses {
    double lorp = 0, aic = 0, bic = 0;
  };
  std::vector<Losses> losses(config.replications);
  parallel_for(config.replications, config.jobs, [&](std::size_t rep) {
    const Dataset data = gen_shibata(config, rep);
    Vector c(orders, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t a = 0; a < orders; ++a) c[a] += qr.q(i, a) * data.y[i];
    const double yy = norm2_squared(data.y);
    Vector lr(orders), a(orders), b(orders), loss(orders);
    double rss = yy, cross = 0.0, fit = 0.0;
    for (std::size_t k = 1; k <= orders; ++k) {
      const double ck = c[k - 1];
      rss -= ck * ck;
      cross += ct[k - 1] * ck;
      fit += ck * ck;
      loss[k - 1] = tt - 2.0 * cross + fit;
      lr[k - 1] = caic_score(SubsetFit{k, n, rss, yy, {}});
      a[k - 1] = aic(rss, n, k);
      b[k - 1] = bic(rss, n, k);
    }
    losses[rep] = {loss[first_argmin(lr)], loss[first_argmin(a)], loss[first_argmin(b)]};
  });

  auto efficiency = [&](std::string name, double Losses::*field) {
    double mean = 0.0, sq = 0.0;
    for (const auto& l : losses) mean += l.*field;
    mean /= static_cast<double>(losses.size());
    for (const auto& l : losses) sq += (l.*field - mean) * (l.*field - mean);
    const double reps = static_cast<double>(losses.size());
    const double sd = reps > 1 ? std::sqrt(sq / (reps - 1.0)) : 0.0;
    const double eff = out.min_risk / mean;
    return CriterionEstimate{std::move(name), eff, eff * sd / (mean * std::sqrt(reps))};
  };
  out.criteria = {efficiency("lorp", &Losses::lorp), efficiency("aic", &Losses::aic), efficiency("bic", &Losses::bic)};
  return out;
}

void Figure1Config::validate() const {
  if (n < 4) throw ParameterError("figure1: n must be >= 4");
  if (!(sigma >= 0.0)) throw ParameterError("figure1: sigma must be >= 0");
  if (protocol == Figure1Protocol::knn && (k_min < 1 || k_min > k_max || k_max > n))
    throw ParameterError("figure1: need 1 <= k_min <= k_max <= n");
  if (protocol == Figure1Protocol::spline && (lambda_count < 1 || !(log_lambda_max >= log_lambda_min)))
    throw ParameterError("figure1: bad lambda grid");
}

Vector Figure1Config::parameters() const {
  Vector out;
  if (protocol == Figure1Protocol::knn) {
    for (std::size_t k = k_min; k <= k_max; ++k) out.push_back(static_cast<double>(k));
  } else {
    for (std::size_t i = 0; i < lambda_count; ++i) {
      const double t = lambda_count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(lambda_count - 1);
      out.push_back(std::pow(10.0, log_lambda_min + t * (log_lambda_max - log_lambda_min)));
    }
  }
  return out;
}

double figure1_function(double x) { return std::sin(12.0 * (x + 0.2)) / (x + 0.2); }

double epe_knn(std::span<const double> f, const DenseMatrix& x, double sigma, std::size_t k) {
  if (f.size() != x.rows()) throw DimensionError("epe_knn: f and x sizes differ");
  const DenseMatrix m = knn_matrix(x, k).m;
  const Vector local = m * f;
  const double s2 = sigma * sigma;
  double total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    total += s2 + (f[i] - local[i]) * (f[i] - local[i]) + s2 / static_cast<double>(k);
  return total;
}

double epe_linear(const DenseMatrix& m, std::span<const double> f, double sigma) {
  if (!m.square() || m.rows() != f.size()) throw DimensionError("epe_linear: M and f sizes differ");
  const Vector fit = m * f;
  double bias = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) bias += (f[i] - fit[i]) * (f[i] - fit[i]);
  double variance = 0.0;
  for (double v : m.entries()) variance += v * v;
  const double s2 = sigma * sigma;
  return bias + s2 * variance + static_cast<double>(f.size()) * s2;
}

Figure1Result run_figure1(const Figure1Config& config) {
  config.validate();
  const std::size_t n = config.n;
  RandomStream rng(config.seed, 0, config.replication);
  Vector xs(n);
  if (config.design == Figure1Design::uniform) {
    for (auto& v : xs) v = rng.uniform();
    std::sort(xs.begin(), xs.end());
  } else {
    for (std::size_t i = 0; i < n; ++i) xs[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  }
  Vector f(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    f[i] = figure1_function(xs[i]);
    y[i] = f[i] + config.sigma * rng.normal();
  }
  const DenseMatrix x(n, 1, xs);

  Figure1Result out;
  out.config = config;
  std::optional<spline::Smoother> smoother;
  if (config.protocol == Figure1Protocol::spline) smoother.emplace(xs);
  for (double p : config.parameters()) {
    CurvePoint pt;
    pt.parameter = p;
    DenseMatrix m;
    if (config.protocol == Figure1Protocol::knn) {
      const auto k = static_cast<std::size_t>(p);
      m = knn_matrix(x, k).m;
      pt.epe = epe_knn(f, x, config.sigma, k);
    } else {
      m = smoother->hat_matrix(p);
      pt.epe = epe_linear(m, f, config.sigma);
    }
    pt.loss_rank = loss_rank(m, y).value;
    pt.gcv = gcv(m, y);
    out.curve.push_back(pt);
  }
  auto pick = [&](double CurvePoint::*field) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.curve.size(); ++i)
      if (out.curve[i].*field < out.curve[best].*field) best = i;
    return out.curve[best].parameter;
  };
  out.argmin_loss_rank = pick(&CurvePoint::loss_rank);
  out.argmin_gcv = pick(&CurvePoint::gcv);
  out.argmin_epe = pick(&CurvePoint::epe);
  return out;
}

std::vector<Figure1Result> run_figure1_batch(const Figure1Config& config, std::size_t count, std::size_t jobs) {
  std::vector<Figure1Result> out(count);
  parallel_for(count, jobs, [&](std::size_t r) {
    Figure1Config c = config;
    c.replication = r;
    out[r] = run_figure1(c);
  });
  return out;
}

Vector standardize(std::span<const double> curve) {
  const double n = static_cast<double>(curve.size());
  double mean = 0.0;
  for (double v : curve) mean += v / n;
  double sq = 0.0;
  for (double v : curve) sq += (v - mean) * (v - mean);
  const double sd = curve.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
  Vector out(curve.begin(), curve.end());
  if (sd > 0.0)
    for (double& v : out) v /= sd;
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) throw DimensionError("median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace lorp
