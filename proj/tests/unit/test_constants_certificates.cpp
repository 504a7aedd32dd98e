// Copyright 2026 The pfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "oracles.hpp"
#include "pfrac/constants_certificates.hpp"

namespace pfrac {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGoldenSigma4 = 0.36166437989988476;  // M = 8 ascent, stored in the golden file

Sigmas example_sigmas() {
  return Sigmas{2.0 * kPi / std::sqrt(oracle::kappa(0.75)), kGoldenSigma4};
}

// Literal transcription of λ_max with oracle κ, kept separate from the library.
double lambda_max_reference(double rho, double q, double a1, double a2, double s1, double sq, double gp, double kap) {
  return q * std::sqrt(rho) * std::pow(1.0 - gp, q / 2.0) /
         (2.0 * kap * (a1 * s1 * q * std::pow(1.0 - gp, (q - 1.0) / 2.0) + a2 * std::pow(sq, q) * std::pow(rho, (q - 1.0) / 2.0)));
}

TEST(ClosedForms, SigmaOneAndTwo) {
  const ProblemSpec p;
  EXPECT_NEAR(sigma1_closed_form(p), 4.3439891064966861445, 1e-13);
  ProblemSpec q;
  q.m = 2.0;
  q.s = 0.5;
  q.gamma = 0.0;
  EXPECT_NEAR(sigma2_closed_form(q), 0.70710678118654752, 1e-15);
  EXPECT_EQ(to_string(EstimateStatus::exact_closed_form), "exact-closed-form");
  EXPECT_EQ(to_string(EstimateStatus::truncated_lower_bound), "truncated-lower-bound");
}

TEST(SigmaEstimate, AscentRecoversClosedFormsWithConstantArgmax) {
  const ProblemSpec p;
  const SpectrumParams sp{4, 16};
  for (double r : {1.0, 2.0}) {
    const EmbeddingEstimate e = sigma_estimate(r, p, sp, SigmaOptions{4, 2000, 0, 0});
    const double closed = r == 1.0 ? sigma1_closed_form(p) : sigma2_closed_form(p);
    EXPECT_EQ(e.status, EstimateStatus::exact_closed_form);
    EXPECT_NEAR(e.value, closed, 1e-15 * closed);
    EXPECT_NEAR(e.ascent_value / closed, 1.0, 1e-6) << r;
    EXPECT_GT(e.constant_fraction, 1.0 - 1e-6) << r;
    EXPECT_EQ(e.modes, 81u);
  }
}

TEST(SigmaEstimate, RejectsExponentsOutsideRange) {
  const ProblemSpec p;  // critical exponent 8
  EXPECT_THROW(sigma_estimate(8.0, p, SpectrumParams{2, 8}), std::invalid_argument);
  EXPECT_THROW(sigma_estimate(0.5, p, SpectrumParams{2, 8}), std::invalid_argument);
}

TEST(SigmaEstimate, ZeroCutoffIsTheConstantRatio) {
  const ProblemSpec p;
  const EmbeddingEstimate e = sigma_estimate(4.0, p, SpectrumParams{0, 1}, SigmaOptions{2, 50, 0, 0});
  const double expect = std::pow(p.volume(), -0.25) / std::sqrt(oracle::kappa(0.75));
  EXPECT_NEAR(e.value, expect, 1e-13);
  EXPECT_EQ(e.status, EstimateStatus::truncated_lower_bound);
}

TEST(SigmaEstimate, NondecreasingInCutoff) {
  const ProblemSpec p;
  double prev = sigma_estimate(4.0, p, SpectrumParams{0, 1}).value;
  for (int M : {2, 4}) {
    const double v = sigma_estimate(4.0, p, SpectrumParams{M, 4 * M + 1}).value;
    EXPECT_GE(v, prev * (1.0 - 1e-10)) << M;
    prev = v;
  }
  EXPECT_GE(kGoldenSigma4, prev * (1.0 - 1e-10));
}

TEST(SigmaEstimate, GoldenValueAgreesWithPowerIteration) {
  const GoldenStore store = GoldenStore::load(PFRAC_DEFAULT_GOLDEN);
  const ProblemSpec p;
  const auto v = store.lookup(GoldenStore::sigma_key(p, SpectrumParams{8, 32}, 4.0));
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(*v, kGoldenSigma4);
  const double ref = oracle::sigma_power_iteration(4.0, p, 8, 33, 4, 300);
  EXPECT_NEAR(*v / ref, 1.0, 1e-3);
}

TEST(LambdaMax, MatchesReferenceFormula) {
  const ProblemSpec p;
  const Sigmas sg = example_sigmas();
  const Nonlinearity nl = cubic_plus_one();
  for (double rho : {1e-3, 0.1, 1.0, 31.8, 1e3}) {
    const double ref = lambda_max_reference(rho, 4.0, 1.0, 1.0, sg.sigma1, sg.sigma_q, 0.5, oracle::kappa(0.75));
    EXPECT_NEAR(lambda_max(rho, p, nl, sg) / ref, 1.0, 1e-13) << rho;
  }
}

TEST(LambdaMax, Asymptotics) {
  const ProblemSpec p;
  const Sigmas sg = example_sigmas();
  const Nonlinearity nl = cubic_plus_one();
  const double kap = oracle::kappa(0.75), gp = 0.5;
  // ρ -> 0: √ρ √(1-γ') / (2κ a1 σ1).
  const double small = 1e-12;
  EXPECT_NEAR(lambda_max(small, p, nl, sg) / (std::sqrt(small) * std::sqrt(1 - gp) / (2 * kap * sg.sigma1)), 1.0, 1e-4);
  // ρ -> ∞: q (1-γ')^{q/2} ρ^{1-q/2} / (2κ a2 σ_q^q).
  const double big = 1e12;
  const double tail = 4.0 * std::pow(1 - gp, 2.0) * std::pow(big, -1.0) / (2 * kap * std::pow(sg.sigma_q, 4.0));
  EXPECT_NEAR(lambda_max(big, p, nl, sg) / tail, 1.0, 1e-4);
  EXPECT_THROW(lambda_max(0.0, p, nl, sg), std::invalid_argument);
  EXPECT_THROW(lambda_max(1.0, p, nl, Sigmas{}), std::invalid_argument);
}

TEST(LambdaMax, SafeVariantIsSmaller) {
  const ProblemSpec p;
  const Sigmas sg = example_sigmas();
  for (double rho : {0.01, 1.0, 100.0}) {
    EXPECT_LT(lambda_max_safe(rho, p, cubic_plus_one(), sg), lambda_max(rho, p, cubic_plus_one(), sg));
  }
}

TEST(BallRadius, ValueAndMonotonicity) {
  const ProblemSpec p;
  EXPECT_NEAR(ball_radius(1.0, p), 1.0 / std::sqrt(oracle::kappa(0.75) * 0.5), 1e-14);
  EXPECT_NEAR(ball_radius(1.0, p), 0.97774106744692379763, 1e-14);
  double prev = 0.0;
  for (double rho = 0.01; rho < 100.0; rho *= 1.7) {
    const double v = ball_radius(rho, p);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(ChiUpper, CoherentWithLambdaMaxOnGrid) {
  const ProblemSpec p;
  const Sigmas sg = example_sigmas();
  const Nonlinearity nl = cubic_plus_one();
  for (int i = 0; i < 16; ++i) {
    const double rho = 1e-3 * std::pow(1e6, i / 15.0);
    const double lam = 0.999 * lambda_max(rho, p, nl, sg);
    EXPECT_LT(chi_upper(rho, p, nl, sg), 1.0 / (2.0 * lam)) << rho;
    // Exactly at λ_max the two sides coincide.
    EXPECT_NEAR(chi_upper(rho, p, nl, sg) * 2.0 * lambda_max(rho, p, nl, sg), 1.0, 1e-12);
  }
}

TEST(ExampleInterval, MaximumAgreesWithDenseScan) {
  const ProblemSpec p;
  const Sigmas sg = example_sigmas();
  const LambdaInterval li = example_lambda_interval(sg, p);
  auto h = [&](double rho) { return example_h(rho, sg, p); };
  const double hi = 4.0 * li.argmax_rho;
  const double arg = oracle::dense_scan_argmax(h, 1e-6, hi, 10000);
  EXPECT_NEAR(li.max_h / h(arg), 1.0, 1e-6);
  EXPECT_GE(li.max_h, h(arg) * (1.0 - 1e-15));
  EXPECT_NEAR(li.argmax_rho, arg, hi / 9999.0);
  EXPECT_EQ(li.lower, 0.0);
  EXPECT_NEAR(li.upper, 2.0 / oracle::kappa(0.75) * 0.25 * li.max_h, 1e-15);
  EXPECT_NEAR(li.argmax_rho, 31.8249, 1e-3);
  EXPECT_NEAR(li.upper, 0.146311, 1e-6);
}

TEST(ExampleInterval, EndpointEqualsBestLambdaMax) {
  const ProblemSpec p;
  const Sigmas sg = example_sigmas();
  const Nonlinearity nl = cubic_plus_one();
  const ScalarMaximum best = maximize_over_rho([&](double rho) { return lambda_max(rho, p, nl, sg); });
  EXPECT_NEAR(example_lambda_interval(sg, p).upper / best.value, 1.0, 1e-12);
}

TEST(ExampleInterval, HVanishesAtBothEnds) {
  const ProblemSpec p;
  const Sigmas sg = example_sigmas();
  EXPECT_LT(example_h(1e-12, sg, p), 1e-6);
  EXPECT_LT(example_h(1e12, sg, p), 1e-5);
}

TEST(LambdaTableTest, LogSpacedRows) {
  const ProblemSpec p;
  const Sigmas sg = example_sigmas();
  const auto rows = lambda_table(p, cubic_plus_one(), sg, 0.1, 1000.0, 5);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_NEAR(rows.front().rho, 0.1, 1e-14);
  EXPECT_NEAR(rows.back().rho, 1000.0, 1e-10);
  EXPECT_NEAR(rows[1].rho / rows[0].rho, 10.0, 1e-12);
  for (const auto& r : rows) {
    EXPECT_DOUBLE_EQ(r.lambda_max, lambda_max(r.rho, p, cubic_plus_one(), sg));
    EXPECT_DOUBLE_EQ(r.ball_radius, ball_radius(r.rho, p));
  }
}

TEST(Golden, KeyFormatAndRoundTrip) {
  const ProblemSpec p;
  EXPECT_EQ(GoldenStore::sigma_key(p, SpectrumParams{8, 32}, 4.0),
            "sigma:N=2:s=0.75:m=1:T=6.2831853071795862:M=8:r=4");
  GoldenStore g;
  g.set("a", 0.1);
  g.set("b", 1.0 / 3.0);
  const auto path = (std::filesystem::temp_directory_path() / "pfrac_golden_roundtrip.txt").string();
  g.save(path);
  const GoldenStore h = GoldenStore::load(path);
  EXPECT_EQ(h.size(), 2u);
  EXPECT_EQ(*h.lookup("b"), 1.0 / 3.0);
  EXPECT_FALSE(h.lookup("c").has_value());
  std::remove(path.c_str());
  EXPECT_THROW(GoldenStore::load("/nonexistent/golden.txt"), std::runtime_error);
}

}  // namespace
}  // namespace pfrac
