// Copyright 2026 The pfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "pfrac/bessel_extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "pfrac/quadrature.hpp"

namespace pfrac {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxTerms = 10000;

// Taylor coefficients of 1/Γ(1+z) about z = 0.
constexpr double kRecipGamma[] = {
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
    1.4123806553180317816e-18,
    -2.2987456844353702066e-19,
};

struct TemmeGammas {
  double gam1;   // (1/Γ(1-μ) - 1/Γ(1+μ)) / (2μ)
  double gam2;   // (1/Γ(1-μ) + 1/Γ(1+μ)) / 2
  double gampl;  // 1/Γ(1+μ)
  double gammi;  // 1/Γ(1-μ)
};

TemmeGammas temme_gammas(double mu) {
  double even = 0.0, odd_over_mu = 0.0;
  double pw = 1.0;  // μ^n
  constexpr int n_terms = sizeof(kRecipGamma) / sizeof(kRecipGamma[0]);
  for (int n = 0; n < n_terms; ++n) {
    if (n % 2 == 0) {
      even += kRecipGamma[n] * pw;
    } else {
      odd_over_mu += kRecipGamma[n] * (pw / (mu == 0.0 ? 1.0 : mu));
    }
    pw *= mu;
  }
  if (mu == 0.0) odd_over_mu = kRecipGamma[1];
  // 1/Γ(1±μ) = even ± μ·odd_over_mu
  return {-odd_over_mu, even, even + mu * odd_over_mu, even - mu * odd_over_mu};
}

struct KPair {
  double k_mu;
  double k_mu1;
};

// K_μ(x) and K_{μ+1}(x) for |μ| <= 1/2, x > 0.
KPair bessel_k_pair(double mu, double x) {
  const double mu2 = mu * mu;
  if (x <= 2.0) {
    const double x2 = 0.5 * x;
    const double pimu = std::numbers::pi * mu;
    const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    const double fact2 = std::abs(e) < 1e-4 ? 1.0 + e * e / 6.0 + e * e * e * e / 120.0 : std::sinh(e) / e;
    const TemmeGammas g = temme_gammas(mu);
    double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / g.gampl;
    double q = 0.5 / (e * g.gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    int i = 1;
    for (; i <= kMaxTerms; ++i) {
      ff = (i * ff + p + q) / (i * double(i) - mu2);
      c *= d / i;
      p /= (i - mu);
      q /= (i + mu);
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - i * ff);
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (i > kMaxTerms) throw NumericalError("bessel_k: Temme series did not converge");
    return {sum, sum1 * 2.0 / x};
  }

  // Steed's continued fraction CF2 with Temme's normalisation.
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25 - mu2;
  double q = a1, c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 2;
  for (; i <= kMaxTerms; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  if (i > kMaxTerms) throw NumericalError("bessel_k: continued fraction did not converge");
  h = a1 * h;
  const double k_mu = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
  return {k_mu, k_mu * (mu + x + 0.5 - h) / x};
}

}  // namespace

double kappa(double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("kappa: order must satisfy 0 < s < 1");
  return std::pow(2.0, 1.0 - 2.0 * s) * std::tgamma(1.0 - s) / std::tgamma(s);
}

double bessel_k(double nu, double y) {
  if (!(y > 0.0)) throw std::invalid_argument("bessel_k: argument must be positive");
  if (!(nu >= 0.0 && nu < 2.0)) throw std::invalid_argument("bessel_k: order must lie in [0, 2)");
  if (nu <= 0.5) return bessel_k_pair(nu, y).k_mu;
  if (nu <= 1.5) return bessel_k_pair(nu - 1.0, y).k_mu1;
  // K_{μ+2} = K_μ + (2(μ+1)/y) K_{μ+1}
  const double mu = nu - 2.0;
  const KPair p = bessel_k_pair(mu, y);
  return p.k_mu + 2.0 * (mu + 1.0) / y * p.k_mu1;
}

// ---------------------------------------------------------------------------
// Profile

ExtensionProfile::ExtensionProfile(double s, bool corrupted) : s_(s), corrupted_(corrupted) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("ExtensionProfile: order must satisfy 0 < s < 1");
  value_scale_ = 2.0 / std::tgamma(s) * std::pow(0.5, s);
  slope_scale_ = std::pow(2.0, 1.0 - s) / std::tgamma(s);
}

double ExtensionProfile::value(double y) const {
  if (y < 0.0) throw std::invalid_argument("theta: argument must be >= 0");
  double v;
  if (y == 0.0) {
    v = 1.0;
  } else {
    const double k = bessel_k(s_, y);
    v = k == 0.0 ? 0.0 : value_scale_ * std::pow(y, s_) * k;
  }
  if (corrupted_) v *= 1.0 + 0.1 * y * std::exp(-y);
  return v;
}

double ExtensionProfile::derivative(double y) const {
  if (!(y > 0.0)) throw std::invalid_argument("theta': argument must be positive");
  const double k = bessel_k(1.0 - s_, y);
  double d = k == 0.0 ? 0.0 : -slope_scale_ * std::pow(y, s_) * k;
  if (corrupted_) {
    const double base = value_scale_ * std::pow(y, s_) * bessel_k(s_, y);
    d = d * (1.0 + 0.1 * y * std::exp(-y)) + base * 0.1 * (1.0 - y) * std::exp(-y);
  }
  return d;
}

double theta(double s, double y) { return ExtensionProfile(s).value(y); }
double theta_prime(double s, double y) { return ExtensionProfile(s).derivative(y); }

double ode_residual(const ExtensionProfile& profile, double y) {
  if (!(y > 0.0)) throw std::invalid_argument("ode_residual: y must be positive");
  static constexpr double d1[] = {1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0,
                                  4.0 / 5,   -1.0 / 5,   4.0 / 105, -1.0 / 280};
  static constexpr double d2[] = {-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72,
                                  8.0 / 5,    -1.0 / 5,  8.0 / 315, -1.0 / 560};
  const double h = std::min(0.05, y / 32.0);
  double first = 0.0, second = 0.0;
  for (int i = -4; i <= 4; ++i) {
    const double v = profile.value(y + i * h);
    first += d1[i + 4] * v;
    second += d2[i + 4] * v;
  }
  first /= h;
  second /= h * h;
  const double s = profile.s();
  return second + (1.0 - 2.0 * s) / y * first - profile.value(y);
}

double ode_residual(double s, double y) { return ode_residual(ExtensionProfile(s), y); }

// ---------------------------------------------------------------------------
// Weighted quadrature

WeightedQuadrature::WeightedQuadrature(double s, double scale) : WeightedQuadrature(s, scale, Options{}) {}

WeightedQuadrature::WeightedQuadrature(double s, double scale, Options opt) : s_(s) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("WeightedQuadrature: order must satisfy 0 < s < 1");
  if (!(scale > 0.0)) throw std::invalid_argument("WeightedQuadrature: scale must be positive");
  const double yc = opt.crossover / scale;
  cutoff_ = opt.cutoff / scale;
  const QuadratureRule gl = gauss_legendre(opt.order);
  const double power = 1.0 - 2.0 * s;

  // Near field: y = yc e^{-v}, dy = y dv. The slowest decay in v among the
  // admissible endpoint behaviours is exp(-min(2s, 2-2s) v). Nodes stay above
  // 1e-120 so that y^{4s-2} and the weights remain representable.
  const double rate = std::min(2.0 * s, 2.0 - 2.0 * s);
  const double v_max = std::min(opt.efolds / rate, std::log(yc / 1e-120));
  const int v_panels = static_cast<int>(std::ceil(v_max));
  for (int p = 0; p < v_panels; ++p) {
    const double a = p, b = p + 1.0;
    for (int i = 0; i < opt.order; ++i) {
      const double v = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[i];
      const double y = yc * std::exp(-v);
      nodes_.push_back(y);
      weights_.push_back(0.5 * (b - a) * gl.weights[i] * std::pow(y, power) * y);
    }
  }

  // Far field: composite Gauss–Legendre on [yc, cutoff].
  const double width = opt.panel_width / scale;
  const int panels = std::max(1, static_cast<int>(std::ceil((cutoff_ - yc) / width)));
  const double hw = (cutoff_ - yc) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = yc + p * hw, b = a + hw;
    for (int i = 0; i < opt.order; ++i) {
      const double y = 0.5 * (a + b) + 0.5 * hw * gl.nodes[i];
      nodes_.push_back(y);
      weights_.push_back(0.5 * hw * gl.weights[i] * std::pow(y, power));
    }
  }
}

namespace {

// ∫ y^{1-2s} g over (0,∞) with g decaying like exp(-2√μ y); checks that the
// part beyond the quadrature cutoff is negligible.
template <class G>
double weighted_energy(const WeightedQuadrature& quad, double scale, G&& g) {
  const double body = quad.integrate(g);
  const double y = quad.cutoff();
  const double tail = 1.5 * std::pow(y, 1.0 - 2.0 * quad.s()) * g(y) / (2.0 * scale);
  if (!std::isfinite(body) || std::abs(tail) > 1e-12 * std::abs(body)) {
    throw NumericalError("weighted quadrature: tail beyond cutoff is not negligible");
  }
  return body;
}

}  // namespace

double profile_energy(const ExtensionProfile& profile) {
  const WeightedQuadrature quad(profile.s());
  return weighted_energy(quad, 1.0, [&](double y) {
    const double v = profile.value(y);
    const double d = profile.derivative(y);
    return d * d + v * v;
  });
}

double profile_energy(double s) { return profile_energy(ExtensionProfile(s)); }

double mode_energy_mu(const ExtensionProfile& profile, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("mode_energy: mu must be positive");
  const double root = std::sqrt(mu);
  const WeightedQuadrature quad(profile.s(), root);
  return weighted_energy(quad, root, [&](double y) {
    const double z = root * y;
    const double v = profile.value(z);
    const double d = profile.derivative(z);
    return mu * (v * v + d * d);
  });
}

double mode_energy(std::span<const int> k, const ProblemSpec& spec) {
  const double w = spec.omega();
  double k2 = 0.0;
  for (int i = 0; i < spec.N && i < static_cast<int>(k.size()); ++i) k2 += double(k[i]) * k[i];
  return mode_energy_mu(ExtensionProfile(spec.s), w * w * k2 + spec.m * spec.m);
}

// ---------------------------------------------------------------------------
// Conormal derivative

double conormal_limit(const ExtensionProfile& profile, double mu, double rel_tol) {
  if (!(mu > 0.0)) throw std::invalid_argument("conormal_limit: mu must be positive");
  const double s = profile.s();
  const double root = std::sqrt(mu);
  constexpr int j_first = 3, j_last = 14;
  constexpr int n = j_last - j_first + 1;

  std::vector<double> table(n);
  for (int j = 0; j < n; ++j) {
    const double y = std::ldexp(1.0, -(j_first + j));
    table[j] = -std::pow(y, 1.0 - 2.0 * s) * root * profile.derivative(root * y);
  }

  // y^ν K_ν(y), ν = 1-s, expands in powers y^{2i} and y^{2ν+2i}.
  const double nu = 1.0 - s;
  std::vector<double> exps;
  for (int i = 0; i < n; ++i) {
    exps.push_back(2.0 * nu + 2.0 * i);
    exps.push_back(2.0 * (i + 1));
  }
  std::sort(exps.begin(), exps.end());
  exps.erase(std::unique(exps.begin(), exps.end(), [](double a, double b) { return std::abs(a - b) < 1e-6; }),
             exps.end());

  // Column-wise elimination; keep the level with the smallest last difference.
  std::vector<double> col = table;
  double best = col[n - 1];
  double best_err = std::abs(col[n - 1] - col[n - 2]);
  for (int level = 1; level < n - 1; ++level) {
    const double f = std::pow(2.0, exps[level - 1]);
    std::vector<double> next(n, 0.0);
    for (int j = level; j < n; ++j) next[j] = (f * col[j] - col[j - 1]) / (f - 1.0);
    col.swap(next);
    const double err = std::abs(col[n - 1] - col[n - 2]);
    if (err < best_err) {
      best_err = err;
      best = col[n - 1];
    }
  }
  if (!(best_err <= rel_tol * std::abs(best))) {
    throw NumericalError("conormal_limit: Richardson table did not settle (last difference " +
                         std::to_string(best_err) + ")");
  }
  return best;
}

double conormal_limit(double s, double mu, double rel_tol) {
  return conormal_limit(ExtensionProfile(s), mu, rel_tol);
}

// ---------------------------------------------------------------------------
// Trace identity

TraceIdentityReport verify_trace_identity(const FourierField& u, const ExtensionProfile& profile) {
  const auto& sp = u.space();
  const auto& p = sp.problem();
  const double w = p.omega();
  std::map<int, double> energy_by_k2;
  TraceIdentityReport r;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = std::norm(u[i]);
    if (a == 0.0) continue;
    const int k2 = sp.wavenumber_sq(i);
    auto it = energy_by_k2.find(k2);
    if (it == energy_by_k2.end()) {
      it = energy_by_k2.emplace(k2, mode_energy_mu(profile, w * w * k2 + p.m * p.m)).first;
    }
    r.extension_energy += it->second * a;
  }
  const double hs = hs_norm(u);
  r.trace_energy = kappa(p.s) * hs * hs;
  if (r.trace_energy > 0.0) {
    r.relative_gap = std::abs(r.extension_energy - r.trace_energy) / r.trace_energy;
  } else {
    r.relative_gap = std::abs(r.extension_energy);
  }
  return r;
}

TraceIdentityReport verify_trace_identity(const FourierField& u) {
  return verify_trace_identity(u, ExtensionProfile(u.space().problem().s));
}

}  // namespace pfrac
