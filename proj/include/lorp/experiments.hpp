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
#include <cstdint>
#include <string>
#include <vector>

#include "lorp/linalg.hpp"
#include "lorp/regressors.hpp"

namespace lorp {

/// Percent of replications (or mean efficiency) for one criterion, with its
/// Monte-Carlo standard error.
struct CriterionEstimate {
  std::string name;
  double estimate = 0.0;
  double standard_error = 0.0;
};

// ---------------------------------------------------------------- subset selection

struct Table1Config {
  std::size_t n = 100;
  std::size_t d = 5;
  double snr = 10.0;
  std::size_t replications = 200;
  std::uint64_t seed = 1;
  /// Signal length: |beta| = signal, or |beta|^2 = signal when set.
  double signal = 10.0;
  bool signal_is_squared_norm = false;
  std::size_t jobs = 1;

  void validate() const;
};

struct Table1Draw {
  Dataset data;
  std::size_t true_size = 0;
  Vector beta;
  double sigma2 = 0.0;
};

/// One replication: X uniform on [-1,1]^{n x d}, true order uniform on
/// {1..d}, beta = signal * u / |u| on the leading coordinates, Gaussian noise
/// with variance |beta|^2 / snr.
Table1Draw gen_table1(const Table1Config& config, std::uint64_t replication, std::uint32_t attempt = 0);

/// Residual sums of squares of the nested fits on columns {0}, {0,1}, ...
Vector nested_rss(const DenseMatrix& x, std::span<const double> y);

struct Table1Result {
  Table1Config config;
  /// lorp, aic, bic: percent of replications recovering the true order.
  std::vector<CriterionEstimate> criteria;
  /// Design draws replaced because they were rank deficient.
  std::size_t resampled = 0;
};

Table1Result run_table1(const Table1Config& config);

// ---------------------------------------------------------------- mean efficiency

struct Table2Config {
  std::size_t n = 400;
  double sigma = 0.05;
  /// Number of candidate orders; 0 means min(163, n - 3).
  std::size_t max_order = 0;
  std::size_t replications = 200;
  std::uint64_t seed = 1;
  double delta = 0.99;
  std::size_t jobs = 1;

  void validate() const;
  std::size_t orders() const;
};

/// x_i = delta i/(n+1), y = log(1/(1-x)) + noise.
Dataset gen_shibata(const Table2Config& config, std::uint64_t replication);

/// Columns 1, cos(pi l x / delta)/(l+1) for l = 1..K-1.
DenseMatrix shibata_features(std::span<const double> x, std::size_t orders, double delta);

struct Table2Result {
  Table2Config config;
  std::size_t orders = 0;
  double min_risk = 0.0;
  std::size_t best_order = 0;
  /// max |R_ii| / min |R_ii| of the feature QR.
  double condition = 0.0;
  /// lorp (corrected-AIC regularizer), aic, bic: min risk / mean loss.
  std::vector<CriterionEstimate> criteria;
};

Table2Result run_table2(const Table2Config& config);

// ---------------------------------------------------------------- smoother tuning

enum class Figure1Protocol { knn, spline };
enum class Figure1Design { uniform, grid };

struct Figure1Config {
  Figure1Protocol protocol = Figure1Protocol::knn;
  std::size_t n = 100;
  double sigma = 0.5;
  std::uint64_t seed = 1;
  std::uint64_t replication = 0;
  Figure1Design design = Figure1Design::uniform;
  std::size_t k_min = 2;
  std::size_t k_max = 20;
  /// log10 range and count of the lambda grid.
  double log_lambda_min = -6.0;
  double log_lambda_max = -1.0;
  std::size_t lambda_count = 26;

  void validate() const;
  Vector parameters() const;
};

/// sin(12(x+0.2)) / (x+0.2).
double figure1_function(double x);

/// sum_i [sigma^2 + (f_i - mean of f over the k-neighbourhood of x_i)^2 + sigma^2/k].
double epe_knn(std::span<const double> f, const DenseMatrix& x, double sigma, std::size_t k);

/// |(I-M) f|^2 + sigma^2 tr(M M^T) + n sigma^2 for any linear smoother.
double epe_linear(const DenseMatrix& m, std::span<const double> f, double sigma);

struct CurvePoint {
  double parameter = 0.0;
  double loss_rank = 0.0;
  double gcv = 0.0;
  double epe = 0.0;
};

struct Figure1Result {
  Figure1Config config;
  std::vector<CurvePoint> curve;
  double argmin_loss_rank = 0.0;
  double argmin_gcv = 0.0;
  double argmin_epe = 0.0;
};

Figure1Result run_figure1(const Figure1Config& config);

/// run_figure1 over replications 0..count-1 (design and noise redrawn each time).
std::vector<Figure1Result> run_figure1_batch(const Figure1Config& config, std::size_t count, std::size_t jobs = 1);

/// Curve divided by its standard deviation (display scaling; argmin unchanged).
Vector standardize(std::span<const double> curve);

double median(std::vector<double> v);

}  // namespace lorp
