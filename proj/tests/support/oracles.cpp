// Copyright 2026 The pfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>
#include <random>

namespace pfrac::oracle {

double kappa(double s) {
  using boost::multiprecision::cpp_bin_float_50;
  const cpp_bin_float_50 S(s);
  const cpp_bin_float_50 v = pow(cpp_bin_float_50(2), 1 - 2 * S) * boost::math::tgamma(1 - S) / boost::math::tgamma(S);
  return static_cast<double>(v);
}

double theta(double s, double y) {
  if (y == 0.0) return 1.0;
  return 2.0 / std::tgamma(s) * std::pow(0.5 * y, s) * boost::math::cyl_bessel_k(s, y);
}

double theta_prime(double s, double y) {
  return -std::pow(2.0, 1.0 - s) / std::tgamma(s) * std::pow(y, s) * boost::math::cyl_bessel_k(1.0 - s, y);
}

double profile_energy(double s) {
  auto g = [s](double y) {
    if (y <= 0.0) return 0.0;
    const double a = theta(s, y), b = theta_prime(s, y);
    return std::pow(y, 1.0 - 2.0 * s) * (a * a + b * b);
  };
  boost::math::quadrature::tanh_sinh<double> near;
  boost::math::quadrature::exp_sinh<double> far;
  return near.integrate(g, 0.0, 1.0) + far.integrate(g, 1.0, std::numeric_limits<double>::infinity());
}

std::complex<double> direct_coefficient(const std::function<double(const double*)>& u, const MultiIndex& k,
                                        const ProblemSpec& spec, int grid_points) {
  const double w = 2.0 * std::numbers::pi / spec.T;
  const double h = spec.T / grid_points;
  std::size_t total = 1;
  for (int d = 0; d < spec.N; ++d) total *= static_cast<std::size_t>(grid_points);
  std::complex<double> acc = 0.0;
  double x[kMaxDim] = {0, 0, 0};
  for (std::size_t j = 0; j < total; ++j) {
    std::size_t rem = j;
    double phase = 0.0;
    for (int d = spec.N - 1; d >= 0; --d) {
      x[d] = h * double(rem % grid_points);
      rem /= grid_points;
      phase += w * k[d] * x[d];
    }
    acc += u(x) * std::polar(1.0, -phase);
  }
  return acc * std::pow(h, spec.N) / std::sqrt(std::pow(spec.T, spec.N));
}

std::complex<double> direct_synthesis(const FourierField& u, const double* x) {
  const auto& sp = u.space();
  const auto& p = sp.problem();
  const double w = 2.0 * std::numbers::pi / p.T;
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const MultiIndex k = sp.mode(i);
    double phase = 0.0;
    for (int d = 0; d < p.N; ++d) phase += w * k[d] * x[d];
    acc += u[i] * std::polar(1.0, phase);
  }
  return acc / std::sqrt(std::pow(p.T, p.N));
}

double newton_root(const std::function<double(double)>& f, const std::function<double(double)>& df, double x0) {
  double x = x0;
  for (int i = 0; i < 100; ++i) {
    const double dx = f(x) / df(x);
    x -= dx;
    if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

double dense_scan_argmax(const std::function<double(double)>& g, double lo, double hi, int n) {
  double best_x = lo, best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    const double v = g(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  return best_x;
}

FourierField random_field(const SpacePtr& space, std::uint64_t seed, int max_k, double amplitude) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  FourierField u(space);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const std::size_t j = space->conjugate(i);
    if (j < i) continue;
    const MultiIndex k = space->mode(i);
    bool keep = true;
    for (int d = 0; d < space->dim(); ++d) keep = keep && std::abs(k[d]) <= max_k;
    if (!keep) continue;
    const double re = g(rng), im = g(rng);
    u[i] = amplitude * std::complex<double>(re, i == j ? 0.0 : im) / space->multiplier(i);
    u[j] = std::conj(u[i]);
  }
  return u;
}

double sigma_power_iteration(double r, const ProblemSpec& spec, int M, int grid_points, int starts,
                             int iterations) {
  const int N = spec.N;
  const double w = 2.0 * std::numbers::pi / spec.T;
  const double vol = std::pow(spec.T, N);
  const double cell = std::pow(spec.T / grid_points, N);

  std::vector<std::array<int, kMaxDim>> modes;
  const int nk = 2 * M + 1;
  int n_modes = 1;
  for (int d = 0; d < N; ++d) n_modes *= nk;
  for (int i = 0; i < n_modes; ++i) {
    std::array<int, kMaxDim> k{};
    int rem = i;
    for (int d = N - 1; d >= 0; --d) {
      k[d] = rem % nk - M;
      rem /= nk;
    }
    modes.push_back(k);
  }
  std::vector<double> mu(n_modes);
  for (int i = 0; i < n_modes; ++i) {
    double k2 = 0.0;
    for (int d = 0; d < N; ++d) k2 += double(modes[i][d]) * modes[i][d];
    mu[i] = std::pow(w * w * k2 + spec.m * spec.m, spec.s);
  }
  int n_pts = 1;
  for (int d = 0; d < N; ++d) n_pts *= grid_points;
  // basis[j * n_modes + i] = e^{iωk_i·x_j}/√T^N
  std::vector<std::complex<double>> basis(static_cast<std::size_t>(n_pts) * n_modes);
  for (int j = 0; j < n_pts; ++j) {
    int rem = j;
    double x[kMaxDim] = {0, 0, 0};
    for (int d = N - 1; d >= 0; --d) {
      x[d] = spec.T / grid_points * (rem % grid_points);
      rem /= grid_points;
    }
    for (int i = 0; i < n_modes; ++i) {
      double phase = 0.0;
      for (int d = 0; d < N; ++d) phase += w * modes[i][d] * x[d];
      basis[static_cast<std::size_t>(j) * n_modes + i] = std::polar(1.0 / std::sqrt(vol), phase);
    }
  }

  auto synth = [&](const std::vector<std::complex<double>>& c) {
    std::vector<double> u(n_pts);
    for (int j = 0; j < n_pts; ++j) {
      std::complex<double> acc = 0.0;
      const auto* row = &basis[static_cast<std::size_t>(j) * n_modes];
      for (int i = 0; i < n_modes; ++i) acc += row[i] * c[i];
      u[j] = acc.real();
    }
    return u;
  };
  auto analyse = [&](const std::vector<double>& u) {
    std::vector<std::complex<double>> c(n_modes, 0.0);
    for (int j = 0; j < n_pts; ++j) {
      const auto* row = &basis[static_cast<std::size_t>(j) * n_modes];
      for (int i = 0; i < n_modes; ++i) c[i] += u[j] * std::conj(row[i]);
    }
    for (auto& v : c) v *= cell;
    return c;
  };
  auto hs = [&](const std::vector<std::complex<double>>& c) {
    double acc = 0.0;
    for (int i = 0; i < n_modes; ++i) acc += mu[i] * std::norm(c[i]);
    return std::sqrt(acc);
  };
  auto lr = [&](const std::vector<double>& u) {
    double acc = 0.0;
    for (double v : u) acc += std::pow(std::abs(v), r);
    return std::pow(cell * acc, 1.0 / r);
  };

  double best = 0.0;
  for (int st = 0; st < starts; ++st) {
    std::mt19937_64 rng(7919 + 31 * st);
    std::normal_distribution<double> g(0.0, 1.0);
    // Real field from a real combination of cosines and sines.
    std::vector<std::complex<double>> c(n_modes, 0.0);
    for (int i = 0; i < n_modes; ++i) {
      const int j = n_modes - 1 - i;
      if (j < i) continue;
      c[i] = std::complex<double>(g(rng), i == j ? 0.0 : g(rng)) / mu[i];
      c[j] = std::conj(c[i]);
    }
    for (int it = 0; it < iterations; ++it) {
      const double n = hs(c);
      for (auto& v : c) v /= n;
      const auto u = synth(c);
      best = std::max(best, lr(u));
      std::vector<double> wv(n_pts);
      for (int j = 0; j < n_pts; ++j) wv[j] = std::pow(std::abs(u[j]), r - 2.0) * u[j];
      c = analyse(wv);
      for (int i = 0; i < n_modes; ++i) c[i] /= mu[i];
    }
  }
  return best / std::sqrt(kappa(spec.s));
}

}  // namespace pfrac::oracle
