// Copyright 2026 The pfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "pfrac/spectral_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pfrac/bessel_extension.hpp"

namespace pfrac {

namespace {

std::string describe(const char* what, double value) {
  std::ostringstream os;
  os.precision(17);
  os << what << " (got " << value << ")";
  return os.str();
}

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// ProblemSpec / SpectrumParams

void ProblemSpec::validate() const {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument(describe("problem.s must satisfy 0 < s < 1", s));
  if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument(describe("problem.m must be > 0", m));
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument(describe("problem.T must be > 0", T));
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument(describe("problem.lambda must be > 0", lambda));
  if (N < 1 || N > kMaxDim) throw std::invalid_argument(describe("problem.N must be 1, 2 or 3", N));
  if (!(static_cast<double>(N) > 2.0 * s))
    throw std::invalid_argument("problem.N must exceed 2s so that 2N/(N-2s) is finite");
  if (!(gamma >= 0.0) || !(gamma < mass_power())) {
    throw std::invalid_argument(describe("problem.gamma must satisfy 0 <= gamma < m^(2s) (0<γ<m^{2s})", gamma));
  }
}

double ProblemSpec::omega() const { return 2.0 * std::numbers::pi / T; }
double ProblemSpec::mass_power() const { return std::pow(m, 2.0 * s); }
double ProblemSpec::shift_ratio() const { return gamma / mass_power(); }
double ProblemSpec::critical_exponent() const { return 2.0 * N / (N - 2.0 * s); }
double ProblemSpec::volume() const { return std::pow(T, N); }

void SpectrumParams::validate() const {
  if (M < 0) throw std::invalid_argument(describe("discretization.M must be >= 0", M));
  if (grid_points < 2 * M + 1) {
    throw std::invalid_argument(describe("discretization.grid_points must be >= 2M+1", grid_points));
  }
}

double multiplier(std::span<const int> k, const ProblemSpec& spec) {
  double k2 = 0.0;
  for (int i = 0; i < spec.N && i < static_cast<int>(k.size()); ++i) k2 += double(k[i]) * k[i];
  const double w = spec.omega();
  return std::pow(w * w * k2 + spec.m * spec.m, spec.s);
}

// ---------------------------------------------------------------------------
// GridTransform

GridTransform::GridTransform(int dim, int grid_points, int cutoff, double period)
    : dim_(dim), grid_(grid_points), cutoff_(cutoff), period_(period) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("GridTransform: dimension must be 1..3");
  if (grid_points < 1) throw std::invalid_argument("GridTransform: grid_points must be >= 1");
  if (cutoff < 0) throw std::invalid_argument("GridTransform: cutoff must be >= 0");
  num_samples_ = ipow(static_cast<std::size_t>(grid_), dim_);
  const int nk = 2 * cutoff_ + 1;
  num_modes_ = ipow(static_cast<std::size_t>(nk), dim_);

  std::vector<Complex> roots(grid_);
  for (int n = 0; n < grid_; ++n) {
    const double a = 2.0 * std::numbers::pi * n / grid_;
    roots[n] = Complex(std::cos(a), std::sin(a));
  }
  forward_.resize(static_cast<std::size_t>(nk) * grid_);
  inverse_.resize(static_cast<std::size_t>(nk) * grid_);
  for (int kk = 0; kk < nk; ++kk) {
    const long k = kk - cutoff_;
    for (int j = 0; j < grid_; ++j) {
      long n = (k * j) % grid_;
      if (n < 0) n += grid_;
      const Complex w = roots[static_cast<std::size_t>(n)];
      forward_[static_cast<std::size_t>(kk) * grid_ + j] = std::conj(w);
      inverse_[static_cast<std::size_t>(j) * nk + kk] = w;
    }
  }
}

double GridTransform::cell_volume() const { return std::pow(period_ / grid_, dim_); }

void GridTransform::node(std::size_t sample, std::span<double> x) const {
  const double h = period_ / grid_;
  for (int d = dim_ - 1; d >= 0; --d) {
    x[d] = h * static_cast<double>(sample % grid_);
    sample /= grid_;
  }
}

// Applies the 1-D matrix along each axis in turn. The tensor shape changes
// from G to 2K+1 (forward) or back (inverse) one axis at a time.
std::vector<Complex> GridTransform::apply(std::vector<Complex> data, bool to_modes) const {
  const int nk = 2 * cutoff_ + 1;
  const int n_in = to_modes ? grid_ : nk;
  const int n_out = to_modes ? nk : grid_;
  const std::vector<Complex>& mat = to_modes ? forward_ : inverse_;

  std::array<std::size_t, kMaxDim> shape{};
  for (int d = 0; d < dim_; ++d) shape[d] = static_cast<std::size_t>(n_in);

  for (int axis = 0; axis < dim_; ++axis) {
    std::size_t outer = 1, inner = 1;
    for (int d = 0; d < axis; ++d) outer *= shape[d];
    for (int d = axis + 1; d < dim_; ++d) inner *= shape[d];
    std::vector<Complex> out(outer * n_out * inner);
    for (std::size_t o = 0; o < outer; ++o) {
      const Complex* src = data.data() + o * n_in * inner;
      Complex* dst = out.data() + o * n_out * inner;
      for (int r = 0; r < n_out; ++r) {
        const Complex* row = mat.data() + static_cast<std::size_t>(r) * n_in;
        Complex* drow = dst + static_cast<std::size_t>(r) * inner;
        for (int c = 0; c < n_in; ++c) {
          const Complex a = row[c];
          const Complex* scol = src + static_cast<std::size_t>(c) * inner;
          for (std::size_t i = 0; i < inner; ++i) drow[i] += a * scol[i];
        }
      }
    }
    data = std::move(out);
    shape[axis] = static_cast<std::size_t>(n_out);
  }
  return data;
}

std::vector<Complex> GridTransform::forward(std::span<const double> samples) const {
  if (samples.size() != num_samples_) {
    throw std::invalid_argument("forward transform: expected " + std::to_string(num_samples_) + " samples, got " +
                                std::to_string(samples.size()));
  }
  std::vector<Complex> data(samples.begin(), samples.end());
  return forward(std::span<const Complex>(data));
}

std::vector<Complex> GridTransform::forward(std::span<const Complex> samples) const {
  if (samples.size() != num_samples_) {
    throw std::invalid_argument("forward transform: expected " + std::to_string(num_samples_) + " samples, got " +
                                std::to_string(samples.size()));
  }
  auto out = apply(std::vector<Complex>(samples.begin(), samples.end()), true);
  const double scale = std::sqrt(std::pow(period_, dim_)) / static_cast<double>(num_samples_);
  for (auto& c : out) c *= scale;
  return out;
}

std::vector<Complex> GridTransform::inverse(std::span<const Complex> coeffs) const {
  if (coeffs.size() != num_modes_) {
    throw std::invalid_argument("inverse transform: expected " + std::to_string(num_modes_) + " coefficients, got " +
                                std::to_string(coeffs.size()));
  }
  auto out = apply(std::vector<Complex>(coeffs.begin(), coeffs.end()), false);
  const double scale = 1.0 / std::sqrt(std::pow(period_, dim_));
  for (auto& c : out) c *= scale;
  return out;
}

// ---------------------------------------------------------------------------
// SpectralSpace

SpectralSpace::SpectralSpace(const ProblemSpec& problem, const SpectrumParams& params)
    : problem_(problem),
      params_(params),
      size_(ipow(static_cast<std::size_t>(2 * params.M + 1), problem.N)),
      grid_(problem.N, params.grid_points, params.M, problem.T) {
  wavenumber_sq_.resize(size_);
  multiplier_.resize(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    const MultiIndex k = mode(i);
    int k2 = 0;
    for (int d = 0; d < problem_.N; ++d) k2 += k[d] * k[d];
    wavenumber_sq_[i] = k2;
    multiplier_[i] = pfrac::multiplier(k, problem_);
  }
}

std::shared_ptr<const SpectralSpace> SpectralSpace::create(const ProblemSpec& problem,
                                                           const SpectrumParams& params) {
  problem.validate();
  params.validate();
  return std::shared_ptr<const SpectralSpace>(new SpectralSpace(problem, params));
}

MultiIndex SpectralSpace::mode(std::size_t index) const {
  const std::size_t nk = static_cast<std::size_t>(2 * params_.M + 1);
  MultiIndex k{};
  for (int d = problem_.N - 1; d >= 0; --d) {
    k[d] = static_cast<int>(index % nk) - params_.M;
    index /= nk;
  }
  return k;
}

std::size_t SpectralSpace::index(const MultiIndex& k) const {
  const std::size_t nk = static_cast<std::size_t>(2 * params_.M + 1);
  std::size_t idx = 0;
  for (int d = 0; d < problem_.N; ++d) {
    if (std::abs(k[d]) > params_.M) throw std::out_of_range("mode outside the retained hypercube");
    idx = idx * nk + static_cast<std::size_t>(k[d] + params_.M);
  }
  return idx;
}

bool SpectralSpace::compatible(const SpectralSpace& other) const {
  return this == &other || (problem_ == other.problem_ && params_ == other.params_);
}

// ---------------------------------------------------------------------------
// FourierField

FourierField::FourierField(SpacePtr space) : space_(std::move(space)) {
  if (!space_) throw std::invalid_argument("FourierField: null space");
  coeffs_.assign(space_->size(), Complex{});
}

FourierField::FourierField(SpacePtr space, std::vector<Complex> coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (!space_) throw std::invalid_argument("FourierField: null space");
  if (coeffs_.size() != space_->size()) {
    throw std::invalid_argument("FourierField: expected " + std::to_string(space_->size()) + " coefficients, got " +
                                std::to_string(coeffs_.size()));
  }
}

FourierField FourierField::constant(SpacePtr space, double value) {
  FourierField u(std::move(space));
  u.coeffs_[u.space_->zero_mode()] = value * std::sqrt(u.space_->problem().volume());
  return u;
}

void FourierField::set_mode(const MultiIndex& k, Complex value) {
  const std::size_t i = space_->index(k);
  const std::size_t j = space_->conjugate(i);
  if (i == j) {
    coeffs_[i] = Complex(value.real(), 0.0);
  } else {
    coeffs_[i] = value;
    coeffs_[j] = std::conj(value);
  }
}

double FourierField::hermitian_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    worst = std::max(worst, std::abs(coeffs_[i] - std::conj(coeffs_[space_->conjugate(i)])));
  }
  return worst;
}

void FourierField::enforce_hermitian() {
  const std::size_t n = coeffs_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = space_->conjugate(i);
    if (j < i) continue;
    if (i == j) {
      coeffs_[i] = Complex(coeffs_[i].real(), 0.0);
    } else {
      const Complex avg = 0.5 * (coeffs_[i] + std::conj(coeffs_[j]));
      coeffs_[i] = avg;
      coeffs_[j] = std::conj(avg);
    }
  }
}

void FourierField::require_compatible(const FourierField& other) const {
  if (!space_->compatible(*other.space_)) throw std::invalid_argument("fields live on different spectral spaces");
}

FourierField& FourierField::operator+=(const FourierField& other) {
  require_compatible(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

FourierField& FourierField::operator-=(const FourierField& other) {
  require_compatible(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

FourierField& FourierField::operator*=(double a) {
  for (auto& c : coeffs_) c *= a;
  return *this;
}

void FourierField::axpy(double a, const FourierField& x) {
  require_compatible(x);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * x.coeffs_[i];
}

// ---------------------------------------------------------------------------
// Transforms and norms

FourierField forward_transform(const SpacePtr& space, std::span<const double> samples) {
  FourierField u(space, space->grid().forward(samples));
  u.enforce_hermitian();
  return u;
}

std::vector<double> sample_on_grid(const FourierField& u, const GridTransform& grid) {
  double scale = 0.0;
  for (const auto& c : u.coeffs()) scale = std::max(scale, std::abs(c));
  if (u.hermitian_defect() > 1e-10 * std::max(1.0, scale)) {
    throw NumericalError("inverse transform: coefficients violate Hermitian symmetry (corrupted field)");
  }
  if (grid.cutoff() != u.space().cutoff() || grid.dim() != u.space().dim()) {
    throw std::invalid_argument("inverse transform: grid does not match the field's truncation");
  }
  const auto values = grid.inverse(u.coeffs());
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i].real();
  return out;
}

std::vector<double> inverse_transform(const FourierField& u) { return sample_on_grid(u, u.space().grid()); }

FourierField apply_fractional_op(const FourierField& u) {
  FourierField out = u;
  const auto& sp = u.space();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= sp.multiplier(i);
  return out;
}

double bilinear_form(const FourierField& u, const FourierField& v) {
  if (!u.space().compatible(v.space())) throw std::invalid_argument("bilinear_form: spec mismatch");
  const auto& sp = u.space();
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += sp.multiplier(i) * (u[i] * std::conj(v[i])).real();
  return acc;
}

double l2_inner(const FourierField& u, const FourierField& v) {
  if (!u.space().compatible(v.space())) throw std::invalid_argument("l2_inner: spec mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += (u[i] * std::conj(v[i])).real();
  return acc;
}

double dual_pairing(const FourierField& g, const FourierField& u) { return l2_inner(g, u); }

double hs_norm(const FourierField& u) {
  const auto& sp = u.space();
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += sp.multiplier(i) * std::norm(u[i]);
  return std::sqrt(acc);
}

double l2_norm(const FourierField& u) {
  double acc = 0.0;
  for (const auto& c : u.coeffs()) acc += std::norm(c);
  return std::sqrt(acc);
}

double dual_norm(const FourierField& g) {
  const auto& sp = g.space();
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += std::norm(g[i]) / sp.multiplier(i);
  return std::sqrt(acc);
}

double lr_norm(const FourierField& u, double r, int grid_points) {
  if (!(r >= 1.0) || !std::isfinite(r)) throw std::invalid_argument(describe("lr_norm: exponent must be >= 1", r));
  const auto& sp = u.space();
  std::vector<double> values;
  double cell;
  if (grid_points == 0 || grid_points == sp.params().grid_points) {
    values = inverse_transform(u);
    cell = sp.grid().cell_volume();
  } else {
    GridTransform grid(sp.dim(), grid_points, sp.cutoff(), sp.problem().T);
    values = sample_on_grid(u, grid);
    cell = grid.cell_volume();
  }
  double acc = 0.0;
  for (double v : values) acc += std::pow(std::abs(v), r);
  return std::pow(cell * acc, 1.0 / r);
}

double e_norm(const FourierField& u) {
  const auto& sp = u.space();
  const double gamma = sp.problem().gamma;
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += (sp.multiplier(i) - gamma) * std::norm(u[i]);
  return std::sqrt(kappa(sp.problem().s) * acc);
}

double hs_distance(const FourierField& u, const FourierField& v) { return hs_norm(u - v); }

}  // namespace pfrac
