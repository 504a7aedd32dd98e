// Copyright 2026 The pfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "pfrac/variational.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "pfrac/bessel_extension.hpp"
#include "pfrac/quadrature.hpp"

namespace pfrac {

double Nonlinearity::primitive(std::span<const double> x, double t) const {
  if (F) return F(x, t);
  if (t == 0.0) return 0.0;
  return integrate_adaptive([&](double tau) { return f(x, tau); }, 0.0, t);
}

double Nonlinearity::derivative(std::span<const double> x, double t) const {
  if (df) return df(x, t);
  const double h = 1e-3 * std::max(1.0, std::abs(t));
  return (-f(x, t + 2 * h) + 8 * f(x, t + h) - 8 * f(x, t - h) + f(x, t - 2 * h)) / (12 * h);
}

Nonlinearity cubic_plus_one() {
  Nonlinearity nl;
  nl.name = "cubic_plus_one";
  nl.f = [](std::span<const double>, double t) { return 1.0 + t * t * t; };
  nl.F = [](std::span<const double>, double t) { return t + 0.25 * t * t * t * t; };
  nl.df = [](std::span<const double>, double t) { return 3.0 * t * t; };
  nl.a1 = 1.0;
  nl.a2 = 1.0;
  nl.q = 4.0;
  nl.alpha = 3.0;
  nl.r0 = 2.0;
  nl.poly_degree = 3;
  return nl;
}

Nonlinearity pure_cubic() {
  Nonlinearity nl;
  nl.name = "pure_cubic";
  nl.f = [](std::span<const double>, double t) { return t * t * t; };
  nl.F = [](std::span<const double>, double t) { return 0.25 * t * t * t * t; };
  nl.df = [](std::span<const double>, double t) { return 3.0 * t * t; };
  nl.a1 = 1.0;
  nl.a2 = 1.0;
  nl.q = 4.0;
  nl.alpha = 4.0;
  nl.r0 = 1.0;
  nl.poly_degree = 3;
  return nl;
}

Nonlinearity odd_power(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("odd_power: exponent must be > 1");
  Nonlinearity nl;
  std::ostringstream os;
  os << "odd_power(" << p << ")";
  nl.name = os.str();
  nl.f = [p](std::span<const double>, double t) { return std::copysign(std::pow(std::abs(t), p), t); };
  nl.F = [p](std::span<const double>, double t) { return std::pow(std::abs(t), p + 1.0) / (p + 1.0); };
  nl.df = [p](std::span<const double>, double t) { return p * std::pow(std::abs(t), p - 1.0); };
  nl.a1 = 1.0;
  nl.a2 = 1.0;
  nl.q = p + 1.0;
  nl.alpha = p + 1.0;
  nl.r0 = 1.0;
  const double rounded = std::round(p);
  if (rounded == p && static_cast<long>(rounded) % 2 == 1) nl.poly_degree = static_cast<int>(rounded);
  return nl;
}

Nonlinearity make_nonlinearity(const std::string& key, double p) {
  if (key == "cubic_plus_one") return cubic_plus_one();
  if (key == "pure_cubic") return pure_cubic();
  if (key == "odd_power") return odd_power(p);
  const std::string prefix = "odd_power(";
  if (key.rfind(prefix, 0) == 0 && key.size() > prefix.size() + 1 && key.back() == ')') {
    const std::string arg = key.substr(prefix.size(), key.size() - prefix.size() - 1);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == arg.size() && used > 0) return odd_power(value);
  }
  throw std::invalid_argument("unknown nonlinearity '" + key + "' (known: cubic_plus_one, pure_cubic, odd_power(p))");
}

std::vector<std::string> registry_keys() { return {"cubic_plus_one", "pure_cubic", "odd_power"}; }

void validate_constants(const Nonlinearity& nl, const ProblemSpec& spec) {
  if (!(nl.a1 > 0.0)) throw std::invalid_argument("nonlinearity.a1 must be > 0");
  if (!(nl.a2 > 0.0)) throw std::invalid_argument("nonlinearity.a2 must be > 0");
  if (!(nl.alpha > 2.0)) throw std::invalid_argument("nonlinearity.alpha must be > 2");
  if (!(nl.r0 > 0.0)) throw std::invalid_argument("nonlinearity.r0 must be > 0");
  const double crit = spec.critical_exponent();
  if (!(nl.q > 2.0 && nl.q < crit)) {
    std::ostringstream os;
    os << "nonlinearity.q must satisfy 2 < q < 2N/(N-2s) = " << crit << " (got " << nl.q << ")";
    throw std::invalid_argument(os.str());
  }
}

// ---------------------------------------------------------------------------
// Checkers

namespace {

std::vector<double> symmetric_lattice(double t_max, int n) {
  std::vector<double> t(static_cast<std::size_t>(std::max(n, 2)));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = -t_max + 2.0 * t_max * double(i) / double(t.size() - 1);
  return t;
}

void record(CheckReport& r, double margin, const Point& x, double t, double v = 0.0) {
  ++r.samples;
  if (r.samples == 1 || margin < r.margin) {
    r.margin = margin;
    r.witness_x = x;
    r.witness_t = t;
    r.witness_v = v;
  }
}

}  // namespace

std::vector<Point> lattice_points(const ProblemSpec& spec, int per_axis) {
  per_axis = std::max(per_axis, 1);
  std::size_t total = 1;
  for (int d = 0; d < spec.N; ++d) total *= static_cast<std::size_t>(per_axis);
  std::vector<Point> pts(total);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i;
    Point p{};
    for (int d = spec.N - 1; d >= 0; --d) {
      p[d] = spec.T * double(rem % per_axis) / per_axis;
      rem /= per_axis;
    }
    pts[i] = p;
  }
  return pts;
}

CheckReport check_periodicity_f1(const Nonlinearity& nl, const ProblemSpec& spec, double t_max,
                                 std::span<const Point> x_samples, int n_t) {
  CheckReport r;
  r.name = "f1_periodicity";
  const auto ts = symmetric_lattice(t_max, n_t);
  for (const auto& x : x_samples) {
    for (double t : ts) {
      const double base = nl.value(x, t);
      for (int d = 0; d < spec.N; ++d) {
        Point y = x;
        y[d] += spec.T;
        const double shifted = nl.value(y, t);
        record(r, 1e-12 * (1.0 + std::abs(base)) - std::abs(shifted - base), x, t);
      }
    }
  }
  r.pass = r.margin >= 0.0;
  return r;
}

CheckReport check_growth_f2(const Nonlinearity& nl, double t_max, std::span<const Point> x_samples, int n_t) {
  CheckReport r;
  r.name = "f2_growth";
  const auto ts = symmetric_lattice(t_max, n_t);
  for (const auto& x : x_samples) {
    for (double t : ts) {
      const double bound = nl.a1 + nl.a2 * std::pow(std::abs(t), nl.q - 1.0);
      const double v = std::abs(nl.value(x, t));
      record(r, bound - v + 1e-12 * bound, x, t);
    }
  }
  r.pass = r.margin >= 0.0;
  return r;
}

CheckReport check_ar_f3(const Nonlinearity& nl, double t_max, std::span<const Point> x_samples, int n_t) {
  CheckReport r;
  r.name = "f3_ambrosetti_rabinowitz";
  if (!(t_max > nl.r0)) throw std::invalid_argument("check_ar_f3: t_max must exceed r0");
  const int half = std::max(n_t / 2, 2);
  bool ok = true;
  for (const auto& x : x_samples) {
    for (int sgn : {1, -1}) {
      for (int i = 0; i < half; ++i) {
        const double t = sgn * (nl.r0 + (t_max - nl.r0) * double(i) / double(half - 1));
        const double aF = nl.alpha * nl.primitive(x, t);
        const double tf = t * nl.value(x, t);
        const double upper = tf - aF + 1e-12 * (std::abs(tf) + std::abs(aF));
        // αF > 0 is strict, equality is allowed in αF <= t f.
        if (!(aF > 0.0) || upper < 0.0) ok = false;
        record(r, std::min(aF, upper), x, t);
      }
    }
  }
  r.pass = ok;
  return r;
}

CheckReport check_superhomogeneity(const Nonlinearity& nl, std::span<const double> t_grid,
                                   std::span<const double> v_grid, std::span<const Point> x_samples) {
  CheckReport r;
  r.name = "superhomogeneity";
  for (double t : t_grid) {
    if (!(t >= 1.0)) throw std::invalid_argument("check_superhomogeneity: t must be >= 1");
  }
  for (const auto& x : x_samples) {
    for (double t : t_grid) {
      for (double v : v_grid) {
        const double lhs = nl.primitive(x, t * v);
        const double rhs = std::pow(t, nl.alpha) * nl.primitive(x, v);
        record(r, lhs - rhs + 1e-12 * (std::abs(lhs) + std::abs(rhs)), x, t, v);
      }
    }
  }
  r.pass = r.margin >= 0.0;
  return r;
}

CheckReport check_primitive(const Nonlinearity& nl, double t_max, std::span<const Point> x_samples, int n_t) {
  CheckReport r;
  r.name = "primitive_consistency";
  const auto ts = symmetric_lattice(t_max, n_t);
  for (const auto& x : x_samples) {
    record(r, 1e-14 - std::abs(nl.primitive(x, 0.0)), x, 0.0);
    for (double t : ts) {
      const double h = 1e-4 * std::max(1.0, std::abs(t));
      const double fd = (nl.primitive(x, t + h) - nl.primitive(x, t - h)) / (2 * h);
      const double f = nl.value(x, t);
      record(r, 1e-6 * (1.0 + std::abs(f)) - std::abs(fd - f), x, t);
    }
  }
  r.pass = r.margin >= 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Energy functional

int nonlinear_grid_points(const SpectrumParams& params, const Nonlinearity& nl) {
  const int want = nl.poly_degree >= 1 ? (nl.poly_degree + 1) * params.M + 1 : 2 * (2 * params.M + 1);
  return std::max(params.grid_points, want);
}

EnergyFunctional::EnergyFunctional(SpacePtr space, Nonlinearity nl)
    : space_(std::move(space)),
      nl_(std::move(nl)),
      nl_grid_(space_->dim(), nonlinear_grid_points(space_->params(), nl_), space_->cutoff(), space_->problem().T) {
  if (!nl_.f) throw std::invalid_argument("EnergyFunctional: nonlinearity has no evaluator");
  const int dim = space_->dim();
  nodes_.resize(nl_grid_.num_samples() * dim);
  for (std::size_t j = 0; j < nl_grid_.num_samples(); ++j) {
    nl_grid_.node(j, std::span<double>(nodes_.data() + j * dim, dim));
  }
}

void EnergyFunctional::check_finite(std::span<const double> values, const char* what) const {
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!std::isfinite(values[j])) {
      std::ostringstream os;
      os << what << " overflowed at grid sample " << j << " (x = ";
      for (int d = 0; d < space_->dim(); ++d) os << (d ? "," : "") << nodes_[j * space_->dim() + d];
      os << ")";
      throw NumericalError(os.str());
    }
  }
}

std::vector<double> EnergyFunctional::samples(const FourierField& u) const {
  if (!space_->compatible(u.space())) throw std::invalid_argument("EnergyFunctional: field from another space");
  auto values = sample_on_grid(u, nl_grid_);
  check_finite(values, "field sample");
  return values;
}

FourierField EnergyFunctional::nonlinear_image(const FourierField& u) const {
  const auto values = samples(u);
  const int dim = space_->dim();
  std::vector<double> g(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    g[j] = nl_.value(std::span<const double>(nodes_.data() + j * dim, dim), values[j]);
  }
  check_finite(g, "f(x,u)");
  FourierField out(space_, nl_grid_.forward(std::span<const double>(g)));
  out.enforce_hermitian();
  return out;
}

double EnergyFunctional::quadratic(const FourierField& u) const {
  const double gamma = space_->problem().gamma;
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += (space_->multiplier(i) - gamma) * std::norm(u[i]);
  return acc / (2.0 * lambda());
}

double EnergyFunctional::potential(const FourierField& u) const {
  const auto values = samples(u);
  const int dim = space_->dim();
  std::vector<double> F(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    F[j] = nl_.primitive(std::span<const double>(nodes_.data() + j * dim, dim), values[j]);
  }
  check_finite(F, "F(x,u)");
  double acc = 0.0;
  for (double v : F) acc += v;
  const double out = acc * nl_grid_.cell_volume();
  if (!std::isfinite(out)) throw NumericalError("potential term overflowed");
  return out;
}

double EnergyFunctional::energy(const FourierField& u) const { return quadratic(u) - potential(u); }

EnergyReport EnergyFunctional::report(const FourierField& u) const {
  EnergyReport r;
  r.quadratic = quadratic(u);
  r.potential = potential(u);
  r.energy = r.quadratic - r.potential;
  r.gradient_dual_norm = dual_norm(gradient(u));
  r.hs_norm = hs_norm(u);
  r.e_norm = e_norm(u);
  r.kappa = kappa(space_->problem().s);
  return r;
}

FourierField EnergyFunctional::gradient(const FourierField& u) const {
  FourierField r = residual(u);
  r *= 1.0 / lambda();
  return r;
}

FourierField EnergyFunctional::riesz_gradient(const FourierField& u) const {
  FourierField r = gradient(u);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] /= space_->multiplier(i);
  return r;
}

FourierField EnergyFunctional::residual(const FourierField& u) const {
  const FourierField g = nonlinear_image(u);
  const double gamma = space_->problem().gamma;
  FourierField r(space_);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (space_->multiplier(i) - gamma) * u[i] - lambda() * g[i];
  return r;
}

double EnergyFunctional::residual_dual_norm(const FourierField& u) const { return dual_norm(residual(u)); }

std::optional<FourierField> EnergyFunctional::newton_correction(const FourierField& u, std::size_t max_dofs) const {
  const std::size_t n = space_->size();
  if (n > max_dofs) return std::nullopt;
  const int dim = space_->dim();
  const int M = space_->cutoff();

  // ŵ for w = ∂f/∂t(x,u) on modes |k_i| <= 2M, exact for polynomial f on the nl grid.
  const auto values = samples(u);
  std::vector<double> w(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    w[j] = nl_.derivative(std::span<const double>(nodes_.data() + j * dim, dim), values[j]);
  }
  check_finite(w, "df(x,u)");
  const GridTransform wide(dim, nl_grid_.grid_points(), 2 * M, space_->problem().T);
  const auto w_hat = wide.forward(std::span<const double>(w));

  const double gamma = space_->problem().gamma;
  const double scale = lambda() / std::sqrt(space_->problem().volume());
  const std::size_t nw = static_cast<std::size_t>(4 * M + 1);
  Eigen::MatrixXcd J(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    const MultiIndex k = space_->mode(a);
    for (std::size_t b = 0; b < n; ++b) {
      const MultiIndex l = space_->mode(b);
      std::size_t idx = 0;
      for (int d = 0; d < dim; ++d) idx = idx * nw + static_cast<std::size_t>(k[d] - l[d] + 2 * M);
      J(a, b) = -scale * w_hat[idx];
    }
    J(a, a) += space_->multiplier(a) - gamma;
  }
  const FourierField res = residual(u);
  Eigen::VectorXcd rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs(i) = -res[i];
  const Eigen::VectorXcd delta = J.completeOrthogonalDecomposition().solve(rhs);
  FourierField out(space_);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(delta(i).real()) || !std::isfinite(delta(i).imag())) return std::nullopt;
    out[i] = delta(i);
  }
  out.enforce_hermitian();
  return out;
}

}  // namespace pfrac
