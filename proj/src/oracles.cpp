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
#include <cmath>
#include <string>

#include "lorp/errors.hpp"
#include "lorp/lossrank.hpp"

namespace lorp {

namespace {

double squared_error(std::span<const double> y, std::span<const double> yhat) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  return s;
}

bool within(double v, double level) { return v <= level + 1e-12 * std::max(1.0, std::abs(level)); }

}  // namespace

std::size_t discrete_rank_oracle(const ResponseMap& predictor, const std::vector<Vector>& yspace,
                                 std::span<const double> y, const LossFunction& loss, std::size_t budget) {
  const std::size_t n = y.size();
  if (yspace.size() != n) throw DimensionError("rank oracle: one value set per coordinate required");
  std::size_t total = 1;
  for (const auto& vals : yspace) {
    if (vals.empty()) throw ParameterError("rank oracle: empty value set");
    if (total > budget / vals.size()) throw BudgetError("rank oracle: enumeration exceeds budget of " + std::to_string(budget));
    total *= vals.size();
  }
  const LossFunction& l = loss ? loss : LossFunction(squared_error);
  auto eval = [&](std::span<const double> v) {
    const Vector fit = predictor(v);
    if (fit.size() != n) throw DimensionError("rank oracle: predictor returned the wrong size");
    return l(v, fit);
  };
  const double level = eval(y);

  std::vector<std::size_t> idx(n, 0);
  Vector current(n);
  for (std::size_t i = 0; i < n; ++i) current[i] = yspace[i][0];
  std::size_t count = 0;
  for (std::size_t it = 0; it < total; ++it) {
    if (within(eval(current), level)) ++count;
    for (std::size_t i = 0; i < n; ++i) {
      if (++idx[i] < yspace[i].size()) {
        current[i] = yspace[i][idx[i]];
        break;
      }
      idx[i] = 0;
      current[i] = yspace[i][0];
    }
  }
  return count;
}

std::size_t discrete_rank_oracle(const ResponseMap& predictor, const Vector& values, std::span<const double> y,
                                 const LossFunction& loss, std::size_t budget) {
  return discrete_rank_oracle(predictor, std::vector<Vector>(y.size(), values), y, loss, budget);
}

double grid_volume_oracle(const std::function<double(std::span<const double>)>& loss,
                          const std::vector<std::pair<double, double>>& bounds, double level, double eps,
                          std::size_t budget) {
  if (!(eps > 0.0)) throw ParameterError("volume oracle: eps must be positive");
  const std::size_t n = bounds.size();
  if (n == 0) throw DimensionError("volume oracle: no coordinates");
  std::vector<std::size_t> cells(n);
  std::size_t total = 1;
  for (std::size_t a = 0; a < n; ++a) {
    const double width = bounds[a].second - bounds[a].first;
    if (!(width > 0.0)) throw ParameterError("volume oracle: empty interval");
    const double steps = std::round(width / eps);
    if (std::abs(steps * eps - width) > 1e-9 * std::max(1.0, width))
      throw ParameterError("volume oracle: eps does not divide the interval");
    cells[a] = static_cast<std::size_t>(steps);
    if (total > budget / cells[a]) throw BudgetError("volume oracle: grid exceeds budget of " + std::to_string(budget));
    total *= cells[a];
  }
  std::vector<std::size_t> idx(n, 0);
  Vector point(n);
  for (std::size_t a = 0; a < n; ++a) point[a] = bounds[a].first + 0.5 * eps;
  std::size_t count = 0;
  for (std::size_t it = 0; it < total; ++it) {
    if (within(loss(point), level)) ++count;
    for (std::size_t a = 0; a < n; ++a) {
      if (++idx[a] < cells[a]) {
        point[a] = bounds[a].first + (static_cast<double>(idx[a]) + 0.5) * eps;
        break;
      }
      idx[a] = 0;
      point[a] = bounds[a].first + 0.5 * eps;
    }
  }
  return static_cast<double>(count) * std::pow(eps, static_cast<double>(n));
}

}  // namespace lorp
