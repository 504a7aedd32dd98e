// Copyright 2026 The pfrac Authors
// SPDX-License-Identifier: Apache-2.0

// Per-mode form of the degenerate-elliptic extension of (-Δ+m²)^s.
//
// A T-periodic trace u = Σ c_k e^{iωk·x}/√T^N extends into the half-cylinder
// as v(x,y) = Σ c_k θ(√μ_k y) e^{iωk·x}/√T^N with μ_k = ω²|k|²+m², where the
// profile θ solves θ'' + ((1-2s)/y) θ' - θ = 0, θ(0) = 1, θ(∞) = 0:
//
//     θ(y) = (2/Γ(s)) (y/2)^s K_s(y).
//
// The weighted energy of one mode is μ_k^s κ_s, and the conormal derivative
// -lim y^{1-2s} ∂_y θ(√μ y) equals κ_s μ^s, with κ_s = 2^{1-2s} Γ(1-s)/Γ(s).

#pragma once

#include <span>
#include <vector>

#include "pfrac/spectral_core.hpp"

namespace pfrac {

/// κ_s = 2^{1-2s} Γ(1-s)/Γ(s). Throws std::invalid_argument unless 0 < s < 1.
double kappa(double s);

/// Modified Bessel function of the second kind K_ν(y) for 0 <= ν < 2, y > 0.
/// Temme's series for y <= 2, Steed's continued fraction above.
double bessel_k(double nu, double y);

/// Radial profile θ and its derivative, with an optional fault-injection
/// switch used to exercise the verification battery.
class ExtensionProfile {
 public:
  explicit ExtensionProfile(double s, bool corrupted = false);

  double s() const { return s_; }
  bool corrupted() const { return corrupted_; }

  /// θ(y), y >= 0.
  double value(double y) const;
  /// θ'(y) = -(2^{1-s}/Γ(s)) y^s K_{1-s}(y), y > 0.
  double derivative(double y) const;

 private:
  double s_;
  double value_scale_;
  double slope_scale_;
  bool corrupted_;
};

double theta(double s, double y);
double theta_prime(double s, double y);

/// θ'' + ((1-2s)/y) θ' - θ with θ', θ'' from 8th-order central differences.
double ode_residual(const ExtensionProfile& profile, double y);
double ode_residual(double s, double y);

/// Nodes and weights for ∫_0^{Y*} y^{1-2s} g(y) dy.
///
/// (0, Y_c] uses y = Y_c e^{-v} with unit panels in v, which turns the
/// endpoint powers y^{1-2s}, y^{2s-1} into exponentials in v; [Y_c, Y*] is
/// composite Gauss–Legendre. Both lengths are divided by `scale`, so a mode
/// profile θ(√μ y) uses scale = √μ. The integrand is assumed to be
/// O(y^{min(0, 4s-2)}) at 0 and exponentially small beyond Y*.
class WeightedQuadrature {
 public:
  struct Options {
    double crossover = 1.0;
    double cutoff = 40.0;
    double panel_width = 0.5;
    int order = 12;
    double efolds = 40.0;
  };

  WeightedQuadrature(double s, double scale, Options options);
  explicit WeightedQuadrature(double s, double scale = 1.0);

  double s() const { return s_; }
  double cutoff() const { return cutoff_; }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  template <class G>
  double integrate(G&& g) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) acc += weights_[i] * g(nodes_[i]);
    return acc;
  }

 private:
  double s_;
  double cutoff_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// ∫_0^∞ y^{1-2s} (θ'² + θ²) dy, which should reproduce κ_s.
/// Throws NumericalError if the neglected tail beyond Y* is not negligible.
double profile_energy(double s);
double profile_energy(const ExtensionProfile& profile);

/// ∫_0^∞ y^{1-2s} (μ θ_k² + θ_k'²) dy for θ_k(y) = θ(√μ y), μ = ω²|k|²+m².
double mode_energy(std::span<const int> k, const ProblemSpec& spec);
double mode_energy_mu(const ExtensionProfile& profile, double mu);

/// Richardson-extrapolated -lim_{y→0+} y^{1-2s} d/dy θ(√μ y), sampled at
/// y_j = 2^{-j}, j = 3..14. Throws NumericalError when the table does not
/// settle below `rel_tol`.
double conormal_limit(double s, double mu, double rel_tol = 1e-8);
double conormal_limit(const ExtensionProfile& profile, double mu, double rel_tol = 1e-8);

struct TraceIdentityReport {
  /// Σ_k mode_energy(k) |c_k|², the weighted energy of the extension.
  double extension_energy = 0.0;
  /// κ_s |u|²_{H^s}.
  double trace_energy = 0.0;
  /// |extension - trace| / trace, zero when both vanish.
  double relative_gap = 0.0;
};

TraceIdentityReport verify_trace_identity(const FourierField& u);
TraceIdentityReport verify_trace_identity(const FourierField& u, const ExtensionProfile& profile);

}  // namespace pfrac
