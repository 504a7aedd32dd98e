// Copyright 2026 The pfrac Authors
// SPDX-License-Identifier: Apache-2.0

// Batch front end: configuration text, the four commands, and JSON reports.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "pfrac/minimax_solvers.hpp"
#include "pfrac/spectral_core.hpp"
#include "pfrac/variational.hpp"

namespace pfrac {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitRefused = 2,
  kExitNonConvergence = 3,
  kExitConfigError = 4,
  kExitVerificationFailure = 5,
};

/// Parse or validation failure; the message names the line and field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct NonlinearityConfig {
  std::string key = "cubic_plus_one";
  double p = 3.0;
  std::optional<double> a1, a2, q, alpha, r0;
};

struct RunConfig {
  std::string command;
  ProblemSpec problem;
  bool lambda_auto = true;
  SpectrumParams discretization;
  NonlinearityConfig nonlinearity;
  SolverConfig solver;
  bool rho_auto = true;

  /// Registry entry with any configured constant overrides applied.
  Nonlinearity build_nonlinearity() const;
  /// Throws ConfigError naming the violated constraint.
  void validate() const;
};

/// Cubic example on (0,2π)²: s = 0.75, m = 1, γ = 0.5, f = 1+t³, M = 8, G = 32.
RunConfig example_config();

/// Flat `section.key = value` text with '#' comments. T accepts products
/// with `pi` such as `2*pi`; lambda and rho accept `auto`.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Every field in a fixed order; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const RunConfig& config);

struct RunOptions {
  std::uint64_t seed = 0;
  std::string golden_path;
  bool update_golden = false;
  /// Fault injection for the extension checks.
  bool corrupt_theta = false;
  std::string dump_dir;
  bool timings = false;
  /// reproduce-example only: fixed λ instead of the midpoint of Λ.
  std::optional<double> lambda;
  /// reproduce-example only: mode cutoff M.
  std::optional<int> modes;
};

struct RunResult {
  int exit_code = kExitSuccess;
  nlohmann::json report;
};

RunResult cmd_constants(const RunConfig& config, const RunOptions& options);
RunResult cmd_solve(const RunConfig& config, const RunOptions& options);
RunResult cmd_verify(const RunConfig& config, const RunOptions& options);
RunResult cmd_reproduce_example(const RunOptions& options);

/// Entry point used by the `pfrac` executable. Prints the report to stdout.
int run_cli(int argc, char** argv);

}  // namespace pfrac
