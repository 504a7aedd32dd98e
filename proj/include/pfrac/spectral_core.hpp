// Copyright 2026 The pfrac Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pfrac {

using Complex = std::complex<double>;

/// Largest supported spatial dimension.
inline constexpr int kMaxDim = 3;

/// Multi-index k in Z^N. Entries past the active dimension are zero.
using MultiIndex = std::array<int, kMaxDim>;

/// Raised when a numerical procedure cannot deliver a trustworthy result
/// (corrupted field, overflow, quadrature or extrapolation failure).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scalar parameters of [(-Δ+m²)^s - γ] u = λ f(x,u) on the torus (0,T)^N.
struct ProblemSpec {
  double s = 0.75;
  double m = 1.0;
  double gamma = 0.5;
  double lambda = 1.0;
  double T = 6.283185307179586;
  int N = 2;

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;

  double omega() const;
  /// m^{2s}, the bottom of the symbol (ω²|k|²+m²)^s.
  double mass_power() const;
  /// γ / m^{2s}, which lies in [0,1) for a valid spec.
  double shift_ratio() const;
  /// 2N/(N-2s).
  double critical_exponent() const;
  /// T^N.
  double volume() const;

  bool operator==(const ProblemSpec&) const = default;
};

/// Symmetric-hypercube truncation |k_i| <= M and a uniform G^N collocation grid.
struct SpectrumParams {
  int M = 8;
  int grid_points = 32;

  void validate() const;
  bool operator==(const SpectrumParams&) const = default;
};

/// (ω²|k|² + m²)^s for the first spec.N entries of k.
double multiplier(std::span<const int> k, const ProblemSpec& spec);

/// Separable partial DFT between a G^N periodic grid and the retained modes
/// |k_i| <= K, normalised as c_k = T^{-N/2} ∫ u e^{-iωk·x} dx evaluated by
/// the rectangle rule. Sample ordering is row-major with x_1 slowest.
class GridTransform {
 public:
  GridTransform(int dim, int grid_points, int cutoff, double period);

  int dim() const { return dim_; }
  int grid_points() const { return grid_; }
  int cutoff() const { return cutoff_; }
  double period() const { return period_; }
  std::size_t num_samples() const { return num_samples_; }
  std::size_t num_modes() const { return num_modes_; }
  /// (T/G)^N, the rectangle-rule weight of every node.
  double cell_volume() const;

  /// Coordinates of grid node `sample`; writes dim() entries.
  void node(std::size_t sample, std::span<double> x) const;

  std::vector<Complex> forward(std::span<const double> samples) const;
  std::vector<Complex> forward(std::span<const Complex> samples) const;
  std::vector<Complex> inverse(std::span<const Complex> coeffs) const;

 private:
  std::vector<Complex> apply(std::vector<Complex> data, bool to_modes) const;

  int dim_;
  int grid_;
  int cutoff_;
  double period_;
  std::size_t num_samples_;
  std::size_t num_modes_;
  // forward_[kk * G + j] = exp(-2πi k j / G), k = kk - K.
  std::vector<Complex> forward_;
  std::vector<Complex> inverse_;
};

/// Immutable description of the truncated space: mode table, cached symbol
/// values, and the base collocation grid. Shared by every FourierField built
/// on it.
class SpectralSpace {
 public:
  static std::shared_ptr<const SpectralSpace> create(const ProblemSpec& problem,
                                                     const SpectrumParams& params);

  const ProblemSpec& problem() const { return problem_; }
  const SpectrumParams& params() const { return params_; }
  int dim() const { return problem_.N; }
  int cutoff() const { return params_.M; }
  std::size_t size() const { return size_; }

  MultiIndex mode(std::size_t index) const;
  std::size_t index(const MultiIndex& k) const;
  /// Index of -k. With row-major offsets k_i + M this is size()-1-index.
  std::size_t conjugate(std::size_t index) const { return size_ - 1 - index; }
  std::size_t zero_mode() const { return size_ / 2; }
  int wavenumber_sq(std::size_t index) const { return wavenumber_sq_[index]; }
  double multiplier(std::size_t index) const { return multiplier_[index]; }
  std::span<const double> multipliers() const { return multiplier_; }

  const GridTransform& grid() const { return grid_; }

  /// True when both spaces describe the same truncation of the same problem.
  bool compatible(const SpectralSpace& other) const;

 private:
  SpectralSpace(const ProblemSpec& problem, const SpectrumParams& params);

  ProblemSpec problem_;
  SpectrumParams params_;
  std::size_t size_;
  std::vector<int> wavenumber_sq_;
  std::vector<double> multiplier_;
  GridTransform grid_;
};

using SpacePtr = std::shared_ptr<const SpectralSpace>;

/// Truncated Fourier representation of a real T-periodic field. Coefficients
/// are stored for every retained k; realness is the Hermitian symmetry
/// c_{-k} = conj(c_k).
class FourierField {
 public:
  explicit FourierField(SpacePtr space);
  FourierField(SpacePtr space, std::vector<Complex> coeffs);

  static FourierField constant(SpacePtr space, double value);

  const SpectralSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::size_t size() const { return coeffs_.size(); }

  std::span<const Complex> coeffs() const { return coeffs_; }
  std::span<Complex> coeffs() { return coeffs_; }
  Complex operator[](std::size_t i) const { return coeffs_[i]; }
  Complex& operator[](std::size_t i) { return coeffs_[i]; }
  Complex at(const MultiIndex& k) const { return coeffs_[space_->index(k)]; }
  /// Sets c_k = value and c_{-k} = conj(value).
  void set_mode(const MultiIndex& k, Complex value);

  /// max_k |c_k - conj(c_{-k})|.
  double hermitian_defect() const;
  /// Replaces each pair by its Hermitian average; the zero mode becomes real.
  void enforce_hermitian();

  FourierField& operator+=(const FourierField& other);
  FourierField& operator-=(const FourierField& other);
  FourierField& operator*=(double a);
  /// this += a * x
  void axpy(double a, const FourierField& x);

  friend FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
  friend FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
  friend FourierField operator*(double a, FourierField u) { return u *= a; }
  friend FourierField operator*(FourierField u, double a) { return u *= a; }

 private:
  void require_compatible(const FourierField& other) const;

  SpacePtr space_;
  std::vector<Complex> coeffs_;
};

/// Samples on the base grid of `space` -> field. Throws on shape mismatch.
FourierField forward_transform(const SpacePtr& space, std::span<const double> samples);

/// Real samples on the base grid. Throws NumericalError if the coefficients
/// are not Hermitian to within 1e-10 of their magnitude.
std::vector<double> inverse_transform(const FourierField& u);

/// Same as inverse_transform but on a G^N grid of the caller's choosing.
std::vector<double> sample_on_grid(const FourierField& u, const GridTransform& grid);

FourierField apply_fractional_op(const FourierField& u);

double hs_norm(const FourierField& u);
double l2_norm(const FourierField& u);
/// Rectangle-rule L^r norm on a G^N grid; grid_points = 0 selects the base grid.
double lr_norm(const FourierField& u, double r, int grid_points = 0);
/// H^{-s} norm: (Σ |g_k|² / (ω²|k|²+m²)^s)^{1/2}.
double dual_norm(const FourierField& g);
/// Q(u,v) = Re Σ (ω²|k|²+m²)^s c_k conj(d_k).
double bilinear_form(const FourierField& u, const FourierField& v);
/// Re Σ c_k conj(d_k), the L² inner product.
double l2_inner(const FourierField& u, const FourierField& v);
/// Re Σ g_k conj(c_k), the H^{-s} x H^s duality pairing.
double dual_pairing(const FourierField& g, const FourierField& u);
/// ‖u‖_e = (κ_s (|u|²_{H^s} - γ |u|²_{L²}))^{1/2}.
double e_norm(const FourierField& u);
double hs_distance(const FourierField& u, const FourierField& v);

}  // namespace pfrac
