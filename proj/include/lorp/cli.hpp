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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "lorp/errors.hpp"
#include "lorp/regressors.hpp"

namespace lorp::cli {

inline constexpr const char* kFormatVersion = "lorp-run/1";

/// Echoed into every artifact. Running `argv` again reproduces the artifact.
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> inputs;
  nlohmann::json parameters = nlohmann::json::object();
  std::string alpha_mode;
  std::string output;
  std::uint64_t seed = 1;
  std::vector<std::string> argv;

  nlohmann::json to_json() const;
};

/// Header row x1..xp,y then one numeric row per point. Blank lines are
/// skipped. Throws ParseError naming `source` and the line.
Dataset read_csv(std::istream& in, const std::string& source);
Dataset read_csv_file(const std::string& path);

/// 0 ok, 2 input, 3 numerical, 4 budget.
int exit_code(ErrorKind kind);

/// Runs one command line (program name excluded) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lorp::cli
