// Copyright 2026 The pfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pfrac/quadrature.hpp"

namespace pfrac {
namespace {

TEST(GaussLegendre, IntegratesPolynomialsUpToDegree2nMinus1) {
  for (int n : {1, 2, 5, 7, 12, 20}) {
    const QuadratureRule q = gauss_legendre(n);
    ASSERT_EQ(q.nodes.size(), static_cast<std::size_t>(n));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += q.weights[i] * std::pow(q.nodes[i], p);
      const double exact = (p % 2 == 1) ? 0.0 : 2.0 / (p + 1);
      EXPECT_NEAR(acc, exact, 1e-14) << "n=" << n << " p=" << p;
    }
  }
}

TEST(GaussLegendre, NodesAreSymmetricAndWeightsPositive) {
  const QuadratureRule q = gauss_legendre(9);
  for (int i = 0; i < 9; ++i) {
    EXPECT_GT(q.weights[i], 0.0);
    EXPECT_NEAR(q.nodes[i], -q.nodes[8 - i], 1e-15);
  }
}

TEST(IntegrateAdaptive, GammaTypeIntegral) {
  // ∫_0^40 y^{0.4} e^{-2y} dy; the tail past 40 is below 1e-33.
  const double v = integrate_adaptive([](double y) { return std::pow(y, 0.4) * std::exp(-2.0 * y); }, 0.0, 40.0);
  EXPECT_NEAR(v, std::tgamma(1.4) / std::pow(2.0, 1.4), 1e-12);
}

TEST(IntegrateAdaptive, OscillatoryIntegrand) {
  const double v = integrate_adaptive([](double x) { return std::cos(20.0 * x); }, 0.0, 1.0);
  EXPECT_NEAR(v, std::sin(20.0) / 20.0, 1e-13);
}

TEST(IntegrateAdaptive, ReversedLimitsChangeSign) {
  auto g = [](double x) { return x * x; };
  EXPECT_NEAR(integrate_adaptive(g, 1.0, 0.0), -1.0 / 3.0, 1e-14);
}

TEST(GoldenSection, FindsInteriorMaximum) {
  const ScalarMaximum r = golden_section_maximize([](double x) { return -(x - 0.3) * (x - 0.3) + 2.0; }, -1.0, 4.0);
  EXPECT_NEAR(r.argmax, 0.3, 1e-7);
  EXPECT_NEAR(r.value, 2.0, 1e-14);
}

TEST(GoldenSection, MonotoneFunctionConvergesToEndpoint) {
  const ScalarMaximum r = golden_section_maximize([](double x) { return x; }, 0.0, 1.0);
  EXPECT_NEAR(r.argmax, 1.0, 1e-9);
}

}  // namespace
}  // namespace pfrac
