// Copyright 2026 The pfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "pfrac/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pfrac {

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pnm1 = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Re-evaluate derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double pn = (n == 1) ? x : p1;
    const double pnm1 = (n == 1) ? 1.0 : p0;
    dp = n * (x * pn - pnm1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

namespace {

double panel(const std::function<double(double)>& g, const QuadratureRule& rule, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * g(c + h * rule.nodes[i]);
  return h * acc;
}

double adapt(const std::function<double(double)>& g, const QuadratureRule& rule, double a, double b,
             double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double left = panel(g, rule, a, m);
  const double right = panel(g, rule, m, b);
  const double refined = left + right;
  if (depth <= 0 || std::abs(refined - whole) <= tol) return refined;
  return adapt(g, rule, a, m, left, 0.5 * tol, depth - 1) + adapt(g, rule, m, b, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& g, double a, double b, double tol, int max_depth) {
  if (a == b) return 0.0;
  static const QuadratureRule rule = gauss_legendre(7);
  const double whole = panel(g, rule, a, b);
  return adapt(g, rule, a, b, whole, tol * std::max(1.0, std::abs(whole)), max_depth);
}

ScalarMaximum golden_section_maximize(const std::function<double(double)>& h, double lo, double hi, double rel_tol,
                                      int max_iter) {
  if (!(hi > lo)) throw std::invalid_argument("golden_section_maximize: empty bracket");
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = h(c), fd = h(d);
  for (int it = 0; it < max_iter && (b - a) > rel_tol * (std::abs(a) + std::abs(b)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = h(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = h(d);
    }
  }
  return fc > fd ? ScalarMaximum{c, fc} : ScalarMaximum{d, fd};
}

}  // namespace pfrac
