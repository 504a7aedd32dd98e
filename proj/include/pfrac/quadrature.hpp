// Copyright 2026 The pfrac Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

namespace pfrac {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss–Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// Adaptive Gauss–Legendre integration of g over [a, b]: a panel is accepted
/// when the 7-point rule and its two-halves refinement agree to `tol`
/// (absolute, scaled by the panel length fraction).
double integrate_adaptive(const std::function<double(double)>& g, double a, double b, double tol = 1e-13,
                          int max_depth = 40);

struct ScalarMaximum {
  double argmax = 0.0;
  double value = 0.0;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
ScalarMaximum golden_section_maximize(const std::function<double(double)>& h, double lo, double hi,
                                      double rel_tol = 1e-12, int max_iter = 500);

}  // namespace pfrac
