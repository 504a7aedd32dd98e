// Copyright 2026 The pfrac Authors
// SPDX-License-Identifier: Apache-2.0

// Quantitative constants behind the two-solution result: embedding constants
// σ_r, the admissible range λ < λ_max(ρ), the radius of S_ρ, the upper bound
// for χ(ρ), and the closed-form interval Λ for the cubic example.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pfrac/bessel_extension.hpp"
#include "pfrac/quadrature.hpp"
#include "pfrac/spectral_core.hpp"
#include "pfrac/variational.hpp"

namespace pfrac {

enum class EstimateStatus { exact_closed_form, truncated_lower_bound };

std::string to_string(EstimateStatus status);

struct EmbeddingEstimate {
  double r = 0.0;
  /// σ_r: the closed form for r in {1,2}, the ascent value otherwise.
  double value = 0.0;
  EstimateStatus status = EstimateStatus::truncated_lower_bound;
  /// (1/√κ_s) times the best ratio found by the ascent.
  double ascent_value = 0.0;
  /// Number of retained modes the ascent ran over.
  std::size_t modes = 0;
  /// Share of the H^s norm carried by the zero mode at the best start.
  double constant_fraction = 0.0;
};

struct SigmaOptions {
  int starts = 16;
  int max_iter = 2000;
  std::uint64_t seed = 0;
  /// Grid for the L^r norm; 0 picks max(G, ceil(r) M + 1).
  int grid_points = 0;
};

/// (1/√κ_s) sup |u|_{L^r}/|u|_{H^s} over the truncated space, by normalised
/// gradient ascent on the H^s unit sphere from `starts` seeded random starts.
/// Throws std::invalid_argument unless 1 <= r < 2N/(N-2s).
EmbeddingEstimate sigma_estimate(double r, const ProblemSpec& spec, const SpectrumParams& params,
                                 const SigmaOptions& options = {});

/// m^{-s}/√κ_s.
double sigma2_closed_form(const ProblemSpec& spec);
/// T^{N/2} m^{-s}/√κ_s.
double sigma1_closed_form(const ProblemSpec& spec);

struct Sigmas {
  double sigma1 = 0.0;
  double sigma_q = 0.0;
};

/// λ_max(ρ) = q√ρ (1-γ')^{q/2} / (2κ_s (a1 σ1 q (1-γ')^{(q-1)/2} + a2 σ_q^q ρ^{(q-1)/2})),
/// γ' = γ/m^{2s}. Throws std::invalid_argument for ρ <= 0 or missing σ values.
double lambda_max(double rho, const ProblemSpec& spec, const Nonlinearity& nl, const Sigmas& sigmas);
/// λ_max with both σ values inflated by `inflation`.
double lambda_max_safe(double rho, const ProblemSpec& spec, const Nonlinearity& nl, const Sigmas& sigmas,
                       double inflation = 1.1);

/// √(ρ/(κ_s(1-γ'))).
double ball_radius(double rho, const ProblemSpec& spec);

/// κ_s [σ1 a1 /(√ρ √(1-γ')) + σ_q^q a2 ρ^{q/2-1} / (q (1-γ')^{q/2})].
double chi_upper(double rho, const ProblemSpec& spec, const Nonlinearity& nl, const Sigmas& sigmas);

/// h(ρ) = √ρ / (4σ1(1-γ')^{3/2} + σ4⁴ ρ^{3/2}), with σ4 = sigmas.sigma_q.
double example_h(double rho, const Sigmas& sigmas, const ProblemSpec& spec);

struct LambdaInterval {
  double lower = 0.0;
  double upper = 0.0;
  /// Maximiser of h.
  double argmax_rho = 0.0;
  double max_h = 0.0;
};

/// Λ = (0, (2/κ_s)(1-γ')² max h).
LambdaInterval example_lambda_interval(const Sigmas& sigmas, const ProblemSpec& spec);

/// Golden-section maximisation of g over [1e-6, ρ_big], ρ_big doubled from 1
/// until g starts to decrease.
template <class G>
ScalarMaximum maximize_over_rho(G&& g) {
  double hi = 1.0;
  double prev = g(hi);
  for (int k = 0; k < 200; ++k) {
    const double next = g(2.0 * hi);
    hi *= 2.0;
    if (next < prev) break;
    prev = next;
  }
  return golden_section_maximize(g, 1e-6, hi);
}

struct LambdaRange {
  double rho = 0.0;
  double lambda_max = 0.0;
  double lambda_max_safe = 0.0;
  double ball_radius = 0.0;
};

/// λ_max over `n` logarithmically spaced ρ in [rho_lo, rho_hi].
std::vector<LambdaRange> lambda_table(const ProblemSpec& spec, const Nonlinearity& nl, const Sigmas& sigmas,
                                      double rho_lo, double rho_hi, int n = 16);

/// Text store of ascent results, one `key = value` per line, '#' comments.
class GoldenStore {
 public:
  /// Throws std::runtime_error if the file cannot be read.
  static GoldenStore load(const std::string& path);
  /// Writes entries in key order.
  void save(const std::string& path) const;

  std::optional<double> lookup(const std::string& key) const;
  void set(const std::string& key, double value) { entries_[key] = value; }
  std::size_t size() const { return entries_.size(); }

  static std::string sigma_key(const ProblemSpec& spec, const SpectrumParams& params, double r);

 private:
  std::map<std::string, double> entries_;
};

}  // namespace pfrac
