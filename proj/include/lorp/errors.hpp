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

#include <stdexcept>
#include <string>

namespace lorp {

/// Broad classes of failure; the CLI maps them onto exit codes.
enum class ErrorKind {
  input,      // malformed input or invalid parameter
  numerical,  // singular, indefinite, degenerate or divergent computation
  budget,     // enumeration budget exceeded
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define LORP_DEFINE_ERROR(Name, Kind)                              \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(Kind, what) {}  \
  }

LORP_DEFINE_ERROR(DimensionError, ErrorKind::input);
LORP_DEFINE_ERROR(ParameterError, ErrorKind::input);
LORP_DEFINE_ERROR(DomainError, ErrorKind::input);
LORP_DEFINE_ERROR(ParseError, ErrorKind::input);
LORP_DEFINE_ERROR(AsymmetryError, ErrorKind::input);
LORP_DEFINE_ERROR(TieError, ErrorKind::input);
LORP_DEFINE_ERROR(DefinitenessError, ErrorKind::numerical);
LORP_DEFINE_ERROR(SingularityError, ErrorKind::numerical);
LORP_DEFINE_ERROR(DegenerateFitError, ErrorKind::numerical);
LORP_DEFINE_ERROR(DegeneratePredictionError, ErrorKind::numerical);
LORP_DEFINE_ERROR(DivergenceError, ErrorKind::numerical);
LORP_DEFINE_ERROR(AccuracyError, ErrorKind::numerical);
LORP_DEFINE_ERROR(BudgetError, ErrorKind::budget);

#undef LORP_DEFINE_ERROR

/// Raised for rank-deficient designs; carries the first offending column.
class RankError : public Error {
 public:
  RankError(const std::string& what, std::size_t column)
      : Error(ErrorKind::numerical, what), column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

}  // namespace lorp
