// Copyright 2026 The pfrac Authors
// SPDX-License-Identifier: Apache-2.0

// Nonlinearities f(x,t), their hypothesis checkers, and the reduced energy
//
//     I(u) = (1/2λ) Σ_k (μ_k^s - γ)|c_k|² - ∫ F(x,u) dx
//
// on the truncated Fourier space, where μ_k^s = (ω²|k|²+m²)^s. The extension
// energy differs from I by the positive factor κ_s, which is reported but not
// carried through the solvers.

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pfrac/spectral_core.hpp"

namespace pfrac {

using Point = std::array<double, kMaxDim>;
using PointwiseFn = std::function<double(std::span<const double> x, double t)>;

struct Nonlinearity {
  std::string name;
  PointwiseFn f;
  /// Primitive F(x,t) = ∫_0^t f(x,τ) dτ. Optional; see primitive().
  PointwiseFn F;
  /// ∂f/∂t. Optional; see derivative().
  PointwiseFn df;
  double a1 = 1.0;
  double a2 = 1.0;
  double q = 4.0;
  double alpha = 3.0;
  double r0 = 2.0;
  /// Polynomial degree in t, or -1 when f is not a polynomial.
  int poly_degree = -1;

  double value(std::span<const double> x, double t) const { return f(x, t); }
  /// F when registered, otherwise adaptive Gauss–Legendre in t from 0.
  double primitive(std::span<const double> x, double t) const;
  /// df when registered, otherwise a 4th-order central difference.
  double derivative(std::span<const double> x, double t) const;
};

/// 1 + t³ with the constants (a1,a2,q,α,r0) = (1,1,4,3,2).
Nonlinearity cubic_plus_one();
/// t³ with (a1,a2,q,α,r0) = (1,1,4,4,1).
Nonlinearity pure_cubic();
/// |t|^{p-1} t with q = α = p+1, r0 = 1. Requires p > 1.
Nonlinearity odd_power(double p);

/// Accepts "cubic_plus_one", "pure_cubic", "odd_power" (power from `p`) and
/// "odd_power(5)". Throws std::invalid_argument for unknown keys.
Nonlinearity make_nonlinearity(const std::string& key, double p = 3.0);
std::vector<std::string> registry_keys();

/// Throws std::invalid_argument unless 2 < q < 2N/(N-2s), α > 2, r0 > 0, a1, a2 > 0.
void validate_constants(const Nonlinearity& nl, const ProblemSpec& spec);

/// Outcome of a sampling-based hypothesis check. `margin` is the smallest
/// slack over the lattice (negative on failure) and the witness fields
/// locate the sample where it occurred.
struct CheckReport {
  std::string name;
  bool pass = true;
  double margin = 0.0;
  Point witness_x{};
  double witness_t = 0.0;
  double witness_v = 0.0;
  std::size_t samples = 0;
};

/// Uniform lattice with `per_axis` points per direction in [0,T)^N.
std::vector<Point> lattice_points(const ProblemSpec& spec, int per_axis);

/// |f(x+Te_i,t) - f(x,t)| <= 1e-12 (1+|f|) for t in [-t_max, t_max].
CheckReport check_periodicity_f1(const Nonlinearity& nl, const ProblemSpec& spec, double t_max,
                                 std::span<const Point> x_samples, int n_t = 201);
/// |f(x,t)| <= a1 + a2 |t|^{q-1} for t in [-t_max, t_max].
CheckReport check_growth_f2(const Nonlinearity& nl, double t_max, std::span<const Point> x_samples,
                            int n_t = 2001);
/// 0 < α F(x,t) <= t f(x,t) for r0 <= |t| <= t_max.
CheckReport check_ar_f3(const Nonlinearity& nl, double t_max, std::span<const Point> x_samples, int n_t = 2001);
/// F(x,tv) >= t^α F(x,v) for t in t_grid (>= 1), v in v_grid (|v| >= r0).
CheckReport check_superhomogeneity(const Nonlinearity& nl, std::span<const double> t_grid,
                                   std::span<const double> v_grid, std::span<const Point> x_samples);
/// F(x,0) = 0 and ∂F/∂t = f by central differences.
CheckReport check_primitive(const Nonlinearity& nl, double t_max, std::span<const Point> x_samples,
                            int n_t = 201);

struct EnergyReport {
  double energy = 0.0;
  double quadratic = 0.0;
  double potential = 0.0;
  double gradient_dual_norm = 0.0;
  double hs_norm = 0.0;
  double e_norm = 0.0;
  /// Factor relating the reduced energy to the extension functional.
  double kappa = 0.0;
};

/// Reduced energy with pseudospectral evaluation of the nonlinear terms on an
/// oversampled grid: (p+1)M+1 points per axis for polynomial f of degree p,
/// which makes energy and gradient exact, and 2(2M+1) otherwise.
class EnergyFunctional {
 public:
  EnergyFunctional(SpacePtr space, Nonlinearity nl);

  const SpectralSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const Nonlinearity& nonlinearity() const { return nl_; }
  const GridTransform& nonlinear_grid() const { return nl_grid_; }
  double lambda() const { return space_->problem().lambda; }

  /// Point values of u on the nonlinear grid.
  std::vector<double> samples(const FourierField& u) const;
  /// Coefficients of f(·,u) on the retained modes.
  FourierField nonlinear_image(const FourierField& u) const;

  double quadratic(const FourierField& u) const;
  double potential(const FourierField& u) const;
  double energy(const FourierField& u) const;
  EnergyReport report(const FourierField& u) const;

  /// r_k = (1/λ)(μ_k^s - γ) c_k - ĝ_k, the derivative of the energy as a dual element.
  FourierField gradient(const FourierField& u) const;
  /// r_k / μ_k^s, the H^s representative of the gradient.
  FourierField riesz_gradient(const FourierField& u) const;
  /// (μ_k^s - γ) c_k - λ ĝ_k, the discrete weak form (λ times the gradient).
  FourierField residual(const FourierField& u) const;
  double residual_dual_norm(const FourierField& u) const;

  /// Newton correction δ with J δ = -residual(u), J the Jacobian of the
  /// residual. Solved by complete orthogonal decomposition; empty when the
  /// space has more than `max_dofs` modes or the solve is not finite.
  std::optional<FourierField> newton_correction(const FourierField& u, std::size_t max_dofs = 2000) const;

 private:
  void check_finite(std::span<const double> values, const char* what) const;

  SpacePtr space_;
  Nonlinearity nl_;
  GridTransform nl_grid_;
  std::vector<double> nodes_;  // nl grid coordinates, N per sample
};

/// Grid points per axis used for nonlinear terms.
int nonlinear_grid_points(const SpectrumParams& params, const Nonlinearity& nl);

}  // namespace pfrac
