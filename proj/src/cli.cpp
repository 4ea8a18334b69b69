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
#include "lorp/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>

#include "lorp/criteria.hpp"
#include "lorp/experiments.hpp"
#include "lorp/grid.hpp"
#include "lorp/lossrank.hpp"

namespace lorp::cli {

using nlohmann::json;

nlohmann::json RunManifest::to_json() const {
  return {{"format_version", kFormatVersion},
          {"subcommand", subcommand},
          {"inputs", inputs},
          {"parameters", parameters},
          {"alpha_mode", alpha_mode},
          {"output", output},
          {"seed", seed},
          {"argv", argv}};
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto p = s.find(sep);
    out.push_back(trim(s.substr(0, p)));
    if (p == std::string_view::npos) return out;
    s.remove_prefix(p + 1);
  }
}

double parse_double(std::string_view s, const std::string& where) {
  s = trim(s);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v))
    throw ParseError(where + ": '" + std::string(s) + "' is not a finite number");
  return v;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt4(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

/// "1,2,3", "range:a:b" (integers, inclusive) or "logspace:a:b:count" (powers of ten).
Vector parse_list(const std::string& text, const std::string& what) {
  Vector out;
  if (text.rfind("logspace:", 0) == 0) {
    const auto parts = split(std::string_view(text).substr(9), ':');
    if (parts.size() != 3) throw ParameterError(what + ": expected logspace:a:b:count");
    const double a = parse_double(parts[0], what), b = parse_double(parts[1], what);
    const double c = parse_double(parts[2], what);
    if (c < 1 || c != std::floor(c)) throw ParameterError(what + ": logspace count must be a positive integer");
    const auto count = static_cast<std::size_t>(c);
    for (std::size_t i = 0; i < count; ++i)
      out.push_back(std::pow(10.0, count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1)));
  } else if (text.rfind("range:", 0) == 0) {
    const auto parts = split(std::string_view(text).substr(6), ':');
    if (parts.size() != 2) throw ParameterError(what + ": expected range:a:b");
    const double a = parse_double(parts[0], what), b = parse_double(parts[1], what);
    if (a != std::floor(a) || b != std::floor(b) || b < a) throw ParameterError(what + ": bad integer range");
    for (double v = a; v <= b; v += 1.0) out.push_back(v);
  } else if (!trim(text).empty()) {
    for (auto field : split(text, ',')) out.push_back(parse_double(field, what));
  }
  if (out.empty()) throw ParameterError(what + " is empty");
  return out;
}

std::size_t as_count(double p, const std::string& what, std::size_t lo, std::size_t hi) {
  if (p != std::floor(p) || p < static_cast<double>(lo) || p > static_cast<double>(hi))
    throw ParameterError(what + " must be an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                         "], got " + fmt17(p));
  return static_cast<std::size_t>(p);
}

std::uint64_t default_seed() {
  const char* env = std::getenv("LORP_SEED");
  if (env == nullptr) return 1;
  const std::string_view s = trim(env);
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size())
    throw ParameterError("LORP_SEED must be a nonnegative integer");
  return v;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParameterError("cannot open output file " + path);
  f << text;
  if (!f) throw ParameterError("failed writing " + path);
}

std::string table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (width.size() <= c) width.push_back(0);
      width[c] = std::max(width[c], r[c].size());
    }
  std::string out;
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      out += r[c];
      if (c + 1 < r.size()) out += std::string(width[c] - r[c].size() + 2, ' ');
    }
    out += '\n';
  }
  return out;
}

// Regressor families exposed on the command line.

const std::vector<std::string> kFamilies{"knn", "kernel", "spline", "poly", "subset"};

struct Candidate {
  DenseMatrix m;
  bool projection = false;
  std::size_t rank = 0;
};

Candidate build_candidate(const std::string& family, double p, const DenseMatrix& x) {
  const std::size_t n = x.rows();
  Candidate c;
  if (family == "knn") {
    c.m = knn_matrix(x, as_count(p, "k", 1, n)).m;
  } else if (family == "kernel") {
    c.m = kernel_matrix(x, p).m;
  } else if (family == "spline") {
    if (x.cols() != 1) throw DimensionError("spline family needs exactly one x column");
    const Vector xs = x.col(0);
    c.m = spline_matrix(xs, p).m;
  } else if (family == "poly") {
    if (x.cols() != 1) throw DimensionError("poly family needs exactly one x column");
    c.projection = true;
    c.rank = as_count(p, "polynomial basis size", 0, n);
    const auto [lo, hi] = std::minmax_element(x.entries().begin(), x.entries().end());
    c.m = c.rank == 0 ? DenseMatrix(n, n)
                      : basis_projection_matrix(feature_matrix(polynomial_feature_map(c.rank, *lo, *hi), x)).m;
  } else if (family == "subset") {
    c.projection = true;
    c.rank = as_count(p, "subset size", 0, x.cols());
    DenseMatrix cols(n, c.rank);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < c.rank; ++j) cols(i, j) = x(i, j);
    c.m = c.rank == 0 ? DenseMatrix(n, n) : basis_projection_matrix(cols).m;
  } else {
    throw ParameterError("unknown family " + family);
  }
  return c;
}

struct AlphaChoice {
  std::string text = "optimize";
  AlphaMode mode = AlphaMode::optimize_alpha;
  double value = 1.0;
};

AlphaChoice parse_alpha(const std::string& text) {
  AlphaChoice a;
  a.text = text;
  if (text == "optimize") {
    a.mode = AlphaMode::optimize_alpha;
  } else if (text == "caic") {
    a.mode = AlphaMode::caic_alpha;
  } else if (text == "projective") {
    a.mode = AlphaMode::projective_closed_form;
  } else if (text.rfind("fixed:", 0) == 0) {
    a.mode = AlphaMode::fixed_alpha;
    a.value = parse_double(std::string_view(text).substr(6), "--alpha");
    if (!(a.value > 0.0)) throw ParameterError("--alpha fixed value must be positive");
  } else {
    throw ParameterError("--alpha must be optimize, fixed:<value>, caic or projective");
  }
  return a;
}

Dataset inline_dataset(const std::string& xs, const std::string& ys) {
  const Vector x = parse_list(xs, "--x"), y = parse_list(ys, "--y");
  if (x.size() != y.size()) throw DimensionError("--x and --y have different lengths");
  return {DenseMatrix(x.size(), 1, x), y};
}

// select

struct SelectArgs {
  std::string data, family, grid, alpha = "optimize", y_domain, out;
  bool include_vn = false;
};

int cmd_select(const SelectArgs& a, std::ostream& out, std::ostream& err) {
  const Dataset data = read_csv_file(a.data);
  const Vector grid = parse_list(a.grid, "--grid");
  const AlphaChoice alpha = parse_alpha(a.alpha);
  std::optional<Vector> domain;
  if (!a.y_domain.empty()) domain = parse_list(a.y_domain, "--y-domain");
  if (alpha.mode == AlphaMode::caic_alpha || alpha.mode == AlphaMode::projective_closed_form) {
    if (a.family != "poly" && a.family != "subset")
      throw ParameterError("--alpha " + alpha.text + " needs a projection family (poly or subset)");
    if (a.include_vn) throw ParameterError("--include-vn applies to optimize and fixed alpha only");
  }

  RunManifest manifest;
  manifest.subcommand = "select";
  manifest.inputs = {a.data};
  manifest.alpha_mode = domain ? "discrete-rank" : alpha.text;
  manifest.output = a.out;
  manifest.parameters = {{"family", a.family}, {"grid", grid}, {"include_vn", a.include_vn}};
  if (domain) manifest.parameters["y_domain"] = *domain;
  manifest.argv = {"select", "--data", a.data, "--family", a.family, "--grid", a.grid, "--alpha", a.alpha};
  if (domain) manifest.argv.insert(manifest.argv.end(), {"--y-domain", a.y_domain});
  if (a.include_vn) manifest.argv.push_back("--include-vn");
  if (!a.out.empty()) manifest.argv.insert(manifest.argv.end(), {"--out", a.out});

  const std::size_t n = data.size();
  const double yy = norm2_squared(data.y);
  json candidates = json::array();
  std::optional<std::size_t> winner;
  double best = INFINITY;
  std::vector<DenseMatrix> matrices;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Candidate c = build_candidate(a.family, grid[i], data.x);
    const Vector fitted = c.m * std::span<const double>(data.y);
    double rss = 0.0;
    for (std::size_t j = 0; j < n; ++j) rss += (data.y[j] - fitted[j]) * (data.y[j] - fitted[j]);
    json score;
    double key = 0.0;
    bool degenerate = false;
    if (domain) {
      const DenseMatrix& m = c.m;
      const auto rank = discrete_rank_oracle([&m](std::span<const double> v) { return m * v; }, *domain, data.y);
      score = {{"rank", rank}};
      key = static_cast<double>(rank);
    } else if (alpha.mode == AlphaMode::projective_closed_form) {
      try {
        const ProjectiveScore ps = projective_loss_rank(c.rank, data.y, fitted);
        score = {{"mode", "projective"}, {"d", ps.d},   {"rho_fit", num(ps.rho_fit)},
                 {"kl", num(ps.kl)},     {"value", num(ps.value)},
                 {"alpha", ps.alpha_m ? num(*ps.alpha_m) : json(nullptr)}};
        key = ps.value;
      } catch (const DegenerateFitError&) {
        degenerate = true;
      }
      score["degenerate"] = degenerate;
    } else if (alpha.mode == AlphaMode::caic_alpha) {
      try {
        key = caic_score(SubsetFit{c.rank, n, rss, yy, {}});
        score = {{"mode", "caic"},
                 {"value", num(key)},
                 {"log_alpha", c.rank > 0 ? json(caic_log_alpha(n, c.rank)) : json(nullptr)}};
      } catch (const DegenerateFitError&) {
        degenerate = true;
      }
      score["degenerate"] = degenerate;
    } else {
      LossRankOptions opts;
      opts.mode = alpha.mode;
      opts.alpha = alpha.value;
      opts.include_vn = a.include_vn;
      const LossRankScore s = loss_rank(c.m, data.y, opts);
      score = {{"mode", std::string(to_string(s.mode))},
               {"alpha", num(s.alpha)},
               {"value", num(s.value)},
               {"fit_term", num(s.fit_term)},
               {"complexity_term", num(s.complexity_term)},
               {"include_vn", s.include_vn},
               {"degenerate", s.degenerate}};
      key = s.value;
      degenerate = s.degenerate;
    }
    json criteria = {{"trace", num(deff_htf(c.m))}};
    try {
      criteria["gcv"] = num(gcv(c.m, data.y));
    } catch (const DegenerateFitError&) {
      criteria["gcv"] = nullptr;
    }
    if (c.projection) {
      criteria["aic"] = c.rank < n ? num(aic(rss, n, c.rank)) : json(nullptr);
      criteria["bic"] = c.rank < n ? num(bic(rss, n, c.rank)) : json(nullptr);
    }
    candidates.push_back({{"parameter", grid[i]}, {"score", score}, {"criteria", criteria}});
    if (!degenerate && key < best) {
      best = key;
      winner = i;
    }
    matrices.push_back(c.m);
  }

  json report = {{"manifest", manifest.to_json()}, {"candidates", candidates}, {"winner", nullptr}};
  if (winner) {
    report["winner"] = {{"index", *winner},
                        {"parameter", grid[*winner]},
                        {"fitted", matrices[*winner] * std::span<const double>(data.y)}};
  }
  write_text(a.out, report.dump(2) + "\n", out);
  if (!winner) {
    err << "lorp: every candidate is a degenerate (perfect) fit; no winner\n";
    return exit_code(ErrorKind::numerical);
  }
  return 0;
}

// bench

struct BenchArgs {
  std::string protocol, out, format = "csv", design;
  std::optional<std::size_t> n, d, reps, max_order, k_min, k_max, lambda_count, replication;
  std::optional<double> snr, signal, sigma, delta, log_lambda_min, log_lambda_max;
  bool squared_signal = false;
  std::optional<std::uint64_t> seed;
  std::size_t jobs = 1;
  std::vector<std::string> given;  // long names of the options actually passed
};

void require_only(const BenchArgs& a, const std::set<std::string>& allowed) {
  static const std::set<std::string> common{"seed", "jobs", "out", "format"};
  for (const auto& g : a.given)
    if (!allowed.count(g) && !common.count(g))
      throw ParameterError("option --" + g + " does not apply to bench " + a.protocol);
}

struct BenchOutput {
  json body;
  std::vector<std::string> csv_header;
  std::vector<std::vector<double>> csv_rows;
  std::vector<std::string> csv_labels;  // optional leading text column
  std::string table_text;
};

std::string render_csv(const RunManifest& manifest, const BenchOutput& o) {
  std::string s = "# manifest: " + manifest.to_json().dump() + "\n";
  for (std::size_t c = 0; c < o.csv_header.size(); ++c) s += (c ? "," : "") + o.csv_header[c];
  s += '\n';
  for (std::size_t r = 0; r < o.csv_rows.size(); ++r) {
    std::string line = o.csv_labels.empty() ? "" : o.csv_labels[r];
    for (std::size_t c = 0; c < o.csv_rows[r].size(); ++c) {
      if (!line.empty() || c > 0 || !o.csv_labels.empty()) line += ',';
      line += fmt17(o.csv_rows[r][c]);
    }
    s += line + '\n';
  }
  return s;
}

BenchOutput estimates_output(const std::vector<CriterionEstimate>& est, const std::string& value_name) {
  BenchOutput o;
  o.csv_header = {"criterion", value_name, "standard_error"};
  std::vector<std::vector<std::string>> rows{{"criterion", value_name, "standard_error"}};
  json arr = json::array();
  for (const auto& e : est) {
    o.csv_labels.push_back(e.name);
    o.csv_rows.push_back({e.estimate, e.standard_error});
    rows.push_back({e.name, fmt4(e.estimate), fmt4(e.standard_error)});
    arr.push_back({{"criterion", e.name}, {"estimate", e.estimate}, {"standard_error", e.standard_error}});
  }
  o.body["results"] = arr;
  o.table_text = table(rows);
  return o;
}

int cmd_bench(BenchArgs a, std::ostream& out) {
  RunManifest manifest;
  manifest.subcommand = "bench";
  manifest.seed = a.seed ? *a.seed : default_seed();
  manifest.output = a.out;
  manifest.argv = {"bench", a.protocol};
  auto arg = [&](const char* flag, const std::string& v) { manifest.argv.insert(manifest.argv.end(), {flag, v}); };
  auto argn = [&](const char* flag, double v) { arg(flag, fmt17(v)); };

  BenchOutput o;
  if (a.protocol == "table1") {
    require_only(a, {"n", "d", "snr", "signal", "squared-signal", "reps"});
    Table1Config c;
    c.n = a.n.value_or(c.n);
    c.d = a.d.value_or(c.d);
    c.snr = a.snr.value_or(c.snr);
    c.signal = a.signal.value_or(c.signal);
    c.signal_is_squared_norm = a.squared_signal;
    c.replications = a.reps.value_or(c.replications);
    c.seed = manifest.seed;
    c.jobs = a.jobs;
    argn("--n", c.n), argn("--d", c.d), argn("--snr", c.snr), argn("--signal", c.signal);
    if (c.signal_is_squared_norm) manifest.argv.push_back("--squared-signal");
    argn("--reps", c.replications);
    const Table1Result r = run_table1(c);
    manifest.parameters = {{"n", c.n}, {"d", c.d}, {"snr", c.snr}, {"signal", c.signal},
                           {"signal_is_squared_norm", c.signal_is_squared_norm}, {"replications", c.replications}};
    o = estimates_output(r.criteria, "percent_correct");
    o.body["resampled_designs"] = r.resampled;
  } else if (a.protocol == "table2") {
    require_only(a, {"n", "sigma", "reps", "max-order", "delta"});
    Table2Config c;
    c.n = a.n.value_or(c.n);
    c.sigma = a.sigma.value_or(c.sigma);
    c.replications = a.reps.value_or(c.replications);
    c.max_order = a.max_order.value_or(c.max_order);
    c.delta = a.delta.value_or(c.delta);
    c.seed = manifest.seed;
    c.jobs = a.jobs;
    argn("--n", c.n), argn("--sigma", c.sigma), argn("--reps", c.replications);
    if (a.max_order) argn("--max-order", c.max_order);
    argn("--delta", c.delta);
    const Table2Result r = run_table2(c);
    manifest.parameters = {{"n", c.n},         {"sigma", c.sigma}, {"replications", c.replications},
                           {"orders", r.orders}, {"delta", c.delta}};
    o = estimates_output(r.criteria, "efficiency");
    o.body["min_risk"] = r.min_risk;
    o.body["best_order"] = r.best_order;
    o.body["condition"] = r.condition;
  } else {
    const bool knn = a.protocol == "figure1-knn";
    if (knn)
      require_only(a, {"n", "sigma", "k-min", "k-max", "replication", "design"});
    else
      require_only(a, {"n", "sigma", "log-lambda-min", "log-lambda-max", "lambda-count", "replication", "design"});
    Figure1Config c;
    c.protocol = knn ? Figure1Protocol::knn : Figure1Protocol::spline;
    c.n = a.n.value_or(c.n);
    c.sigma = a.sigma.value_or(c.sigma);
    c.seed = manifest.seed;
    c.replication = a.replication.value_or(c.replication);
    if (!a.design.empty()) c.design = a.design == "grid" ? Figure1Design::grid : Figure1Design::uniform;
    c.k_min = a.k_min.value_or(c.k_min);
    c.k_max = a.k_max.value_or(c.k_max);
    c.log_lambda_min = a.log_lambda_min.value_or(c.log_lambda_min);
    c.log_lambda_max = a.log_lambda_max.value_or(c.log_lambda_max);
    c.lambda_count = a.lambda_count.value_or(c.lambda_count);
    argn("--n", c.n), argn("--sigma", c.sigma), argn("--replication", c.replication);
    arg("--design", c.design == Figure1Design::grid ? "grid" : "uniform");
    manifest.parameters = {{"n", c.n},
                           {"sigma", c.sigma},
                           {"replication", c.replication},
                           {"design", c.design == Figure1Design::grid ? "grid" : "uniform"}};
    if (knn) {
      argn("--k-min", c.k_min), argn("--k-max", c.k_max);
      manifest.parameters["k_min"] = c.k_min;
      manifest.parameters["k_max"] = c.k_max;
    } else {
      argn("--log-lambda-min", c.log_lambda_min), argn("--log-lambda-max", c.log_lambda_max);
      argn("--lambda-count", c.lambda_count);
      manifest.parameters["log_lambda_min"] = c.log_lambda_min;
      manifest.parameters["log_lambda_max"] = c.log_lambda_max;
      manifest.parameters["lambda_count"] = c.lambda_count;
    }
    const Figure1Result r = run_figure1(c);
    const char* pname = knn ? "k" : "lambda";
    o.csv_header = {pname, "loss_rank", "gcv", "epe"};
    std::vector<std::vector<std::string>> rows{{pname, "loss_rank", "gcv", "epe"}};
    json curve = json::array();
    for (const auto& p : r.curve) {
      o.csv_rows.push_back({p.parameter, p.loss_rank, p.gcv, p.epe});
      rows.push_back({fmt4(p.parameter), fmt4(p.loss_rank), fmt4(p.gcv), fmt4(p.epe)});
      curve.push_back({{pname, p.parameter}, {"loss_rank", num(p.loss_rank)}, {"gcv", num(p.gcv)}, {"epe", p.epe}});
    }
    o.body["curve"] = curve;
    o.body["argmin"] = {{"loss_rank", r.argmin_loss_rank}, {"gcv", r.argmin_gcv}, {"epe", r.argmin_epe}};
    o.table_text = table(rows) + "argmin: loss_rank " + fmt4(r.argmin_loss_rank) + ", gcv " + fmt4(r.argmin_gcv) +
                   ", epe " + fmt4(r.argmin_epe) + "\n";
  }
  argn("--seed", static_cast<double>(manifest.seed));
  argn("--jobs", static_cast<double>(a.jobs));
  if (!a.out.empty())
    arg("--out", a.out);
  else
    arg("--format", a.format);
  manifest.parameters["protocol"] = a.protocol;

  json report = {{"manifest", manifest.to_json()}, {"protocol", a.protocol}};
  report.update(o.body);
  const std::string json_text = report.dump(2) + "\n";
  if (!a.out.empty()) {
    write_text(a.out + ".json", json_text, out);
    write_text(a.out + ".csv", render_csv(manifest, o), out);
    out << "wrote " << a.out << ".json and " << a.out << ".csv\n";
  } else if (a.format == "json") {
    out << json_text;
  } else if (a.format == "csv") {
    out << render_csv(manifest, o);
  } else {
    out << o.table_text;
  }
  return 0;
}

// grid-constants

struct GridArgs {
  std::size_t n1 = 801, k1 = 3, dim = 1, s_max = 64;
  bool limit = false, limit_inf = false, dim_inf = false;
  std::string format = "table", out;
};

void emit_values(const RunManifest& manifest, const std::vector<std::pair<std::string, double>>& values,
                 const std::string& format, const std::string& path, std::ostream& out) {
  if (format == "json") {
    json v = json::object();
    for (const auto& [k, x] : values) v[k] = num(x);
    write_text(path, json{{"manifest", manifest.to_json()}, {"values", v}}.dump(2) + "\n", out);
  } else {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [k, x] : values) rows.push_back({k, fmt4(x)});
    write_text(path, table(rows), out);
  }
}

int cmd_grid(const GridArgs& a, std::ostream& out) {
  GridSpec spec{a.n1, a.k1, a.dim};
  RunManifest manifest;
  manifest.subcommand = "grid-constants";
  manifest.output = a.out;
  manifest.seed = 0;
  manifest.parameters = {{"n1", a.n1}, {"k1", a.k1}, {"dim", a.dim}, {"s_max", a.s_max}};
  manifest.argv = {"grid-constants", "--n1", std::to_string(a.n1), "--k1", std::to_string(a.k1),
                   "--dim", std::to_string(a.dim), "--s-max", std::to_string(a.s_max)};
  std::vector<std::pair<std::string, double>> values;
  if (a.limit) {
    manifest.argv.push_back("--limit");
    values.emplace_back("c1_limit_k", c1_limit_k(a.k1));
  }
  if (a.limit_inf) {
    manifest.argv.push_back("--limit-inf");
    values.emplace_back("c1_limit", c1_limit());
  }
  if (a.dim_inf) {
    manifest.argv.push_back("--dim-inf");
    values.emplace_back("taylor_dim_limit", c_d_taylor_dim_limit(a.n1, a.k1, a.s_max));
  }
  if (values.empty()) {
    spec.validate();
    if (a.dim == 1)
      values.emplace_back("c_exact", c1_exact(a.n1, a.k1));
    else
      values.emplace_back("c_exact", spec.k() / spec.n() * torus_logdet(spec));
    values.emplace_back("c_taylor", c_d_taylor(spec, a.s_max));
  }
  manifest.argv.insert(manifest.argv.end(), {"--format", a.format});
  if (!a.out.empty()) manifest.argv.insert(manifest.argv.end(), {"--out", a.out});
  emit_values(manifest, values, a.format, a.out, out);
  return 0;
}

// oracle

struct OracleArgs {
  std::string kind, data, x, y, family, values, format = "table", out;
  double param = 0.0, lo = 0.0, hi = 0.0, eps = 1e-3;
  std::optional<std::size_t> budget;
};

int cmd_oracle(const OracleArgs& a, std::ostream& out) {
  const Dataset data = a.data.empty() ? inline_dataset(a.x, a.y) : read_csv_file(a.data);
  const Candidate c = build_candidate(a.family, a.param, data.x);
  const DenseMatrix& m = c.m;
  RunManifest manifest;
  manifest.subcommand = "oracle";
  manifest.output = a.out;
  manifest.seed = 0;
  manifest.argv = {"oracle", a.kind};
  if (a.data.empty()) {
    manifest.argv.insert(manifest.argv.end(), {"--x", a.x, "--y", a.y});
  } else {
    manifest.inputs = {a.data};
    manifest.argv.insert(manifest.argv.end(), {"--data", a.data});
  }
  manifest.argv.insert(manifest.argv.end(), {"--family", a.family, "--param", fmt17(a.param)});
  manifest.parameters = {{"kind", a.kind}, {"family", a.family}, {"param", a.param}};

  std::vector<std::pair<std::string, double>> values;
  if (a.kind == "rank") {
    const Vector domain = parse_list(a.values, "--values");
    const std::size_t budget = a.budget.value_or(kEnumerationBudget);
    manifest.argv.insert(manifest.argv.end(), {"--values", a.values, "--budget", std::to_string(budget)});
    manifest.parameters["values"] = domain;
    manifest.parameters["budget"] = budget;
    const auto r = discrete_rank_oracle([&m](std::span<const double> v) { return m * v; }, domain, data.y, {}, budget);
    values.emplace_back("rank", static_cast<double>(r));
  } else {
    if (!(a.hi > a.lo)) throw ParameterError("oracle volume needs --lo < --hi");
    const std::size_t budget = a.budget.value_or(100'000'000);
    manifest.argv.insert(manifest.argv.end(), {"--lo", fmt17(a.lo), "--hi", fmt17(a.hi), "--eps", fmt17(a.eps),
                                               "--budget", std::to_string(budget)});
    manifest.parameters.update({{"lo", a.lo}, {"hi", a.hi}, {"eps", a.eps}, {"budget", budget}});
    auto loss = [&m](std::span<const double> v) {
      const Vector f = m * v;
      double s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) s += (v[i] - f[i]) * (v[i] - f[i]);
      return s;
    };
    const double level = loss(data.y);
    const std::vector<std::pair<double, double>> box(data.size(), {a.lo, a.hi});
    values.emplace_back("volume", grid_volume_oracle(loss, box, level, a.eps, budget));
    values.emplace_back("level", level);
  }
  manifest.argv.insert(manifest.argv.end(), {"--format", a.format});
  if (!a.out.empty()) manifest.argv.insert(manifest.argv.end(), {"--out", a.out});
  emit_values(manifest, values, a.format, a.out, out);
  return 0;
}

}  // namespace

Dataset read_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0, p = 0;
  bool header = false;
  Vector xs, ys;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (lineno == 1 && view.rfind("\xEF\xBB\xBF", 0) == 0) view.remove_prefix(3);
    if (trim(view).empty()) continue;
    const auto fields = split(view, ',');
    const std::string where = source + ":" + std::to_string(lineno);
    if (!header) {
      if (fields.size() < 2 || fields.back() != "y")
        throw ParseError(where + ": header must be x1,...,xp,y");
      for (std::size_t j = 0; j + 1 < fields.size(); ++j)
        if (fields[j] != "x" + std::to_string(j + 1)) throw ParseError(where + ": header must be x1,...,xp,y");
      p = fields.size() - 1;
      header = true;
      continue;
    }
    if (fields.size() != p + 1)
      throw ParseError(where + ": expected " + std::to_string(p + 1) + " fields, got " + std::to_string(fields.size()));
    for (std::size_t j = 0; j < p; ++j) xs.push_back(parse_double(fields[j], where));
    ys.push_back(parse_double(fields[p], where));
  }
  if (!header) throw ParseError(source + ": missing header row");
  if (ys.empty()) throw ParseError(source + ": no data rows");
  Dataset d{DenseMatrix(ys.size(), p, std::move(xs)), std::move(ys)};
  d.validate();
  return d;
}

Dataset read_csv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  return read_csv(f, path);
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input: return 2;
    case ErrorKind::numerical: return 3;
    case ErrorKind::budget: return 4;
  }
  return 1;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Loss rank model selection"};
  app.name("lorp");
  app.require_subcommand(1);

  SelectArgs sel;
  auto* select = app.add_subcommand("select", "Rank candidate regressors for a dataset");
  select->add_option("--data", sel.data, "CSV with header x1..xp,y")->required();
  select->add_option("--family", sel.family, "Regressor family")->required()->check(CLI::IsMember(kFamilies));
  select->add_option("--grid", sel.grid, "Parameters: a,b,c | range:a:b | logspace:a:b:count")->required();
  select->add_option("--alpha", sel.alpha, "optimize | fixed:<v> | caic | projective");
  select->add_option("--y-domain", sel.y_domain, "Score by the discrete rank over this value set");
  select->add_flag("--include-vn", sel.include_vn, "Add log v_n to the loss rank");
  select->add_option("--out", sel.out, "Write the JSON report here");

  BenchArgs ben;
  auto* bench = app.add_subcommand("bench", "Run a simulation protocol");
  bench->add_option("protocol", ben.protocol)
      ->required()
      ->check(CLI::IsMember({"table1", "table2", "figure1-knn", "figure1-spline"}));
  bench->add_option("--n", ben.n);
  bench->add_option("--d", ben.d);
  bench->add_option("--snr", ben.snr);
  bench->add_option("--signal", ben.signal, "Length of beta");
  bench->add_flag("--squared-signal", ben.squared_signal, "Read --signal as |beta|^2");
  bench->add_option("--sigma", ben.sigma);
  bench->add_option("--reps", ben.reps);
  bench->add_option("--max-order", ben.max_order);
  bench->add_option("--delta", ben.delta);
  bench->add_option("--k-min", ben.k_min);
  bench->add_option("--k-max", ben.k_max);
  bench->add_option("--log-lambda-min", ben.log_lambda_min);
  bench->add_option("--log-lambda-max", ben.log_lambda_max);
  bench->add_option("--lambda-count", ben.lambda_count);
  bench->add_option("--replication", ben.replication);
  bench->add_option("--design", ben.design)->check(CLI::IsMember({"uniform", "grid"}));
  bench->add_option("--seed", ben.seed, "Defaults to LORP_SEED, else 1");
  bench->add_option("--jobs", ben.jobs)->check(CLI::Range(1, 1024));
  bench->add_option("--out", ben.out, "Write PREFIX.csv and PREFIX.json");
  bench->add_option("--format", ben.format)->check(CLI::IsMember({"csv", "json", "table"}));

  GridArgs gr;
  auto* grid = app.add_subcommand("grid-constants", "Log-determinant constants of grid kNN");
  grid->add_option("--n1", gr.n1);
  grid->add_option("--k1", gr.k1);
  grid->add_option("--dim", gr.dim);
  grid->add_option("--s-max", gr.s_max);
  grid->add_flag("--limit", gr.limit, "n1 -> infinity at fixed k1");
  grid->add_flag("--limit-inf", gr.limit_inf, "n1, k1 -> infinity");
  grid->add_flag("--dim-inf", gr.dim_inf, "dim -> infinity of the Taylor series");
  grid->add_option("--format", gr.format)->check(CLI::IsMember({"table", "json"}));
  grid->add_option("--out", gr.out);

  OracleArgs orc;
  auto* oracle = app.add_subcommand("oracle", "Count or measure the loss rank directly on tiny instances");
  oracle->add_option("kind", orc.kind)->required()->check(CLI::IsMember({"rank", "volume"}));
  auto* odata = oracle->add_option("--data", orc.data);
  auto* ox = oracle->add_option("--x", orc.x, "Comma list of 1-d design points")->excludes(odata);
  oracle->add_option("--y", orc.y, "Comma list of responses")->excludes(odata)->needs(ox);
  oracle->add_option("--family", orc.family)->required()->check(CLI::IsMember(kFamilies));
  oracle->add_option("--param", orc.param)->required();
  oracle->add_option("--values", orc.values, "Value set for rank");
  oracle->add_option("--lo", orc.lo);
  oracle->add_option("--hi", orc.hi);
  oracle->add_option("--eps", orc.eps);
  oracle->add_option("--budget", orc.budget);
  oracle->add_option("--format", orc.format)->check(CLI::IsMember({"table", "json"}));
  oracle->add_option("--out", orc.out);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : exit_code(ErrorKind::input);
  }

  try {
    if (select->parsed()) return cmd_select(sel, out, err);
    if (bench->parsed()) {
      for (const auto* opt : bench->get_options())
        if (opt->count() > 0 && !opt->get_lnames().empty()) ben.given.push_back(opt->get_lnames().front());
      return cmd_bench(ben, out);
    }
    if (grid->parsed()) return cmd_grid(gr, out);
    if (oracle->parsed()) {
      if (orc.data.empty() && (orc.x.empty() || orc.y.empty()))
        throw ParameterError("oracle needs --data or both --x and --y");
      if (orc.kind == "rank" && orc.values.empty()) throw ParameterError("oracle rank needs --values");
      return cmd_oracle(orc, out);
    }
  } catch (const Error& e) {
    err << "lorp: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "lorp: internal error: " << e.what() << "\n";
    return 1;
  }
  return exit_code(ErrorKind::input);
}

}  // namespace lorp::cli
