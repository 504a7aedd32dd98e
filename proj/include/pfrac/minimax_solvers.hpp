// Copyright 2026 The pfrac Authors
// SPDX-License-Identifier: Apache-2.0

// Two-solution search: a local minimizer of the reduced energy inside the
// ball {‖u‖_e² < ρ} and a mountain-pass critical point between it and a far
// endpoint of lower energy.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pfrac/spectral_core.hpp"
#include "pfrac/variational.hpp"

namespace pfrac {

/// Raised when a solver precondition cannot be met at run time (for example
/// no endpoint of lower energy within the doubling budget).
class SolverError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct SolverConfig {
  double rho = 1.0;
  double grad_tol = 1e-8;
  int max_iter = 2000;
  int path_points = 16;
  double armijo_c1 = 1e-4;
  double backtrack = 0.5;
  int max_halvings = 60;
  double distinct_tol = 1e-3;
  std::uint64_t seed = 0;
  double endpoint_margin = 1.0;
  /// Amplitude of a seeded random perturbation of the initial path interior,
  /// relative to the endpoint distance. Zero keeps the straight segment.
  double path_perturbation = 0.0;
  bool newton_polish = true;
  /// Newton is skipped above this many retained modes.
  int newton_max_dofs = 2000;
  /// Outer iterations between Newton attempts in the mountain-pass loop.
  int polish_every = 25;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct SolutionReport {
  explicit SolutionReport(FourierField u) : field(std::move(u)) {}

  FourierField field;
  std::string method;  // "ball_min" or "mountain_pass"
  /// "converged", "max_iter", "stalled", "boundary_active", "path_collapse"
  /// or "tolerance_not_reached" (critical point located, residual above grad_tol).
  std::string status;
  bool converged = false;
  double energy = 0.0;
  double residual_dual_norm = 0.0;
  double hs_norm = 0.0;
  double e_norm = 0.0;
  /// ‖u‖_e² < ρ.
  bool in_ball = false;
  /// |u|_{H^s} < ball_radius(ρ); implied by in_ball.
  bool in_S_rho = false;
  int iterations = 0;
  int newton_steps = 0;
  std::vector<double> residual_history;
  /// Energy per iteration (ball_min) or path maximum per iteration (mountain_pass).
  std::vector<double> energy_history;
};

struct MultiplicityReport {
  /// "two-solutions", "one-solution-only", "refused-inadmissible-lambda" or "non-convergence".
  std::string status;
  std::optional<SolutionReport> first;
  std::optional<SolutionReport> second;
  std::optional<FourierField> endpoint;
  double distance = 0.0;
  double lambda = 0.0;
  double lambda_max = 0.0;
  /// energy(first) < energy(second); false is reported, not fatal.
  bool energy_ordering = false;
  std::vector<std::string> diagnostics;
};

/// Fills the norm, energy, residual and membership fields for `u`.
SolutionReport describe_solution(const FourierField& u, const EnergyFunctional& I, const SolverConfig& cfg,
                                 const std::string& method);

/// Projected Armijo descent along the Riesz gradient, rescaling radially onto
/// ‖u‖_e <= √ρ. Near stationarity Newton steps are taken when they reduce the
/// residual without raising the energy or leaving the ball.
SolutionReport ball_minimize(const FourierField& start, const SolverConfig& cfg, const EnergyFunctional& I);

/// e = t v0 with v0 the constant field r0, doubling t from 1 until
/// energy(e) < energy(u_loc) - endpoint_margin. Throws SolverError after 40
/// doublings.
FourierField find_descent_endpoint(const FourierField& u_loc, const SolverConfig& cfg, const EnergyFunctional& I);

/// Discrete path deformation between u_a and u_b (energy(u_b) < energy(u_a)):
/// Armijo descent on the highest node, arc-length re-spacing in H^s, and a
/// periodic Newton polish from the highest node. Throws std::invalid_argument
/// when u_a == u_b or the energy precondition fails.
SolutionReport mountain_pass(const FourierField& u_a, const FourierField& u_b, const SolverConfig& cfg,
                             const EnergyFunctional& I);

/// Ball minimization from 0, endpoint search, mountain pass, then the
/// distinctness and membership checks. λ >= lambda_max is refused.
MultiplicityReport solve_multiplicity(const SolverConfig& cfg, const EnergyFunctional& I, double lambda_max);

}  // namespace pfrac
