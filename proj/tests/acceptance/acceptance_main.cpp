// Copyright 2026 The pfrac Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance battery: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "pfrac/bessel_extension.hpp"
#include "pfrac/cli_runner.hpp"
#include "pfrac/constants_certificates.hpp"
#include "pfrac/minimax_solvers.hpp"
#include "pfrac/variational.hpp"

namespace {

using namespace pfrac;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// 1. Closed-form κ_s.
void constant_exactness(Outcome& o) {
  const double e05 = std::abs(kappa(0.5) - 1.0);
  const double e025 = rel(kappa(0.25), oracle::kappa(0.25));
  const double e075 = rel(kappa(0.75), oracle::kappa(0.75));
  o.require(e05 <= 1e-12, "kappa(0.5)");
  o.require(e025 <= 1e-10, "kappa(0.25)");
  o.require(e075 <= 1e-10, "kappa(0.75)");
  o.detail << "|k(.5)-1|=" << e05 << " rel(.25)=" << e025 << " rel(.75)=" << e075;
}

// 2. Single-mode multipliers over a (s,m,T) lattice and Parseval.
void spectral_operator(Outcome& o) {
  double worst = 0.0, parseval = 0.0;
  for (double s : {0.25, 0.5, 0.75}) {
    for (double m : {1.0, 2.0}) {
      for (double T : {2.0 * std::numbers::pi, 3.0}) {
        ProblemSpec p;
        p.s = s;
        p.m = m;
        p.T = T;
        p.gamma = 0.0;
        const SpacePtr sp = SpectralSpace::create(p, SpectrumParams{8, 32});
        const long double w = 2.0L * std::numbers::pi_v<long double> / T;
        for (int a = -8; a <= 8; ++a) {
          for (int b = -8; b <= 8; ++b) {
            const MultiIndex k{a, b, 0};
            FourierField u(sp);
            u.set_mode(k, Complex(1.0, 0.0));
            const double sym = double(std::pow(w * w * (a * a + b * b) + (long double)m * m, (long double)s));
            worst = std::max(worst, rel(apply_fractional_op(u).at(k).real(), sym));
          }
        }
        const FourierField u = oracle::random_field(sp, 5, 8);
        const auto vals = inverse_transform(u);
        double grid = 0.0, coeff = 0.0;
        for (double v : vals) grid += v * v;
        grid *= sp->grid().cell_volume();
        for (std::size_t i = 0; i < u.size(); ++i) coeff += std::norm(u[i]);
        parseval = std::max(parseval, rel(grid, coeff));
      }
    }
  }
  o.require(worst <= 1e-12, "multiplier");
  o.require(parseval < 1e-10, "Parseval");
  o.detail << "max multiplier rel err=" << worst << " Parseval gap=" << parseval;
}

// 3. Extension: ODE, profile energy, conormal limit and trace identity.
void extension_certification(Outcome& o) {
  double ode = 0.0, energy = 0.0, conormal = 0.0, trace = 0.0;
  std::mt19937_64 rng(0);
  for (double s : {0.3, 0.5, 0.7, 0.9}) {
    for (int i = 0; i <= 199; ++i) ode = std::max(ode, std::abs(ode_residual(s, 0.1 * std::pow(100.0, i / 199.0))));
    energy = std::max(energy, rel(profile_energy(s), oracle::kappa(s)));
    for (double mu : {1.0, 2.0, 5.0}) {
      conormal = std::max(conormal, rel(conormal_limit(s, mu, 1e-4), oracle::kappa(s) * std::pow(mu, s)));
    }
    ProblemSpec p;
    p.s = s;
    p.gamma = 0.0;
    const SpacePtr sp = SpectralSpace::create(p, SpectrumParams{3, 7});
    std::uniform_int_distribution<std::size_t> pick(0, sp->size() - 1);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 4; ++t) {
      FourierField u(sp);
      for (int n = 0; n < 5; ++n) u.set_mode(sp->mode(pick(rng)), Complex(g(rng), g(rng)));
      trace = std::max(trace, verify_trace_identity(u).relative_gap);
    }
  }
  o.require(ode < 1e-5, "ode_residual");
  o.require(energy <= 1e-6, "profile_energy");
  o.require(conormal <= 1e-4, "conormal_limit");
  o.require(trace < 1e-5, "trace identity");
  o.detail << "ode=" << ode << " energy=" << energy << " conormal=" << conormal << " trace=" << trace;
}

// 4. Analytic gradient against central differences.
void gradient_correctness(Outcome& o) {
  ProblemSpec p;
  p.lambda = 0.07;
  const SpacePtr sp = SpectralSpace::create(p, SpectrumParams{8, 32});
  double worst = 0.0;
  for (const Nonlinearity& nl : {cubic_plus_one(), pure_cubic()}) {
    const EnergyFunctional I(sp, nl);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const FourierField u = oracle::random_field(sp, seed, 8, 0.6);
      const FourierField phi = oracle::random_field(sp, 500 + seed, 8, 1.0);
      const double an = l2_inner(I.gradient(u), phi);
      double best = INFINITY;
      for (double h : {1e-3, 1e-4, 1e-5, 1e-6}) {
        const double fd = (I.energy(u + h * phi) - I.energy(u - h * phi)) / (2.0 * h);
        best = std::min(best, rel(fd, an));
      }
      worst = std::max(worst, best);
    }
  }
  o.require(worst < 1e-5, "gradient");
  o.detail << "max rel err over 40 fields=" << worst;
}

// 5. σ_1, σ_2 by ascent against the closed forms, argmax constant.
void embedding_closed_forms(Outcome& o) {
  const ProblemSpec p;
  const SpectrumParams sp{8, 32};
  for (double r : {1.0, 2.0}) {
    const EmbeddingEstimate e = sigma_estimate(r, p, sp, SigmaOptions{4, 2000, 0, 0});
    const double closed = r == 1.0 ? sigma1_closed_form(p) : sigma2_closed_form(p);
    const double oracle_closed = (r == 1.0 ? std::pow(p.T, 0.5 * p.N) : 1.0) * std::pow(p.m, -p.s) /
                                 std::sqrt(oracle::kappa(p.s));
    o.require(rel(closed, oracle_closed) <= 1e-12, "closed form r=" + std::to_string(int(r)));
    o.require(rel(e.ascent_value, closed) <= 1e-6, "ascent r=" + std::to_string(int(r)));
    o.require(e.constant_fraction >= 1.0 - 1e-6, "constant argmax r=" + std::to_string(int(r)));
    o.detail << "r=" << r << ": rel=" << rel(e.ascent_value, closed) << " const-frac=" << e.constant_fraction << " ";
  }
}

// 6. chi_upper(ρ) < 1/(2λ) at λ = 0.999 λ_max(ρ).
void chi_coherence(Outcome& o) {
  const ProblemSpec p;
  const Nonlinearity nl = cubic_plus_one();
  const GoldenStore g = GoldenStore::load(PFRAC_DEFAULT_GOLDEN);
  const auto sq = g.lookup(GoldenStore::sigma_key(p, SpectrumParams{8, 32}, 4.0));
  o.require(sq.has_value(), "golden sigma_4");
  if (!sq) return;
  const Sigmas sg{sigma1_closed_form(p), *sq};
  double worst_slack = INFINITY;
  for (int i = 0; i < 16; ++i) {
    const double rho = 1e-3 * std::pow(1e6, i / 15.0);
    const double lam = 0.999 * lambda_max(rho, p, nl, sg);
    const double lhs = chi_upper(rho, p, nl, sg), rhs = 1.0 / (2.0 * lam);
    worst_slack = std::min(worst_slack, (rhs - lhs) / rhs);
    o.require(lhs < rhs, "rho=" + std::to_string(rho));
  }
  o.detail << "min relative slack=" << worst_slack;
}

// 7. M = 0 roots of c³ - 50c + 1 against Newton.
void scalar_truncation(Outcome& o) {
  ProblemSpec p;
  p.lambda = 0.01;
  const SpacePtr sp = SpectralSpace::create(p, SpectrumParams{0, 1});
  const EnergyFunctional I(sp, cubic_plus_one());
  auto f = [](double c) { return c * c * c - 50.0 * c + 1.0; };
  auto df = [](double c) { return 3.0 * c * c - 50.0; };
  const double lo = oracle::newton_root(f, df, 0.0), hi = oracle::newton_root(f, df, 10.0);
  SolverConfig cfg;
  const SolutionReport a = ball_minimize(FourierField(sp), cfg, I);
  const FourierField e = find_descent_endpoint(a.field, cfg, I);
  const SolutionReport b = mountain_pass(a.field, e, cfg, I);
  const double vol = std::sqrt(p.volume());
  const double ea = std::abs(a.field[0].real() / vol - lo), eb = std::abs(b.field[0].real() / vol - hi);
  o.require(a.converged && b.converged, "convergence");
  o.require(ea <= 1e-8, "ball_minimize root");
  o.require(eb <= 1e-8, "mountain_pass root");
  o.detail << "c1=" << a.field[0].real() / vol << " (err " << ea << ") c2=" << b.field[0].real() / vol << " (err " << eb
           << ")";
}

// 8. Two solutions for the example at M = 8.
void multiplicity(Outcome& o) {
  const RunResult r = cmd_reproduce_example(RunOptions{});
  const auto& rep = r.report;
  o.require(rep["status"] == "two-solutions", "status " + rep["status"].get<std::string>());
  if (rep["solutions"].size() != 2) {
    o.require(false, "two solution records");
    return;
  }
  const auto& s1 = rep["solutions"][0];
  const auto& s2 = rep["solutions"][1];
  const double r1 = s1["residual_dual_norm"].get<double>(), r2 = s2["residual_dual_norm"].get<double>();
  const double dist = rep["verification"]["hs_distance"].get<double>();
  o.require(r1 <= 1e-8 && r2 <= 1e-8, "residuals");
  o.require(dist > 1e-3, "distance");
  o.require(s1["in_S_rho"].get<bool>(), "first in S_rho");
  o.require(rep["verification"]["example"]["both_nontrivial"].get<bool>(), "non-trivial");
  o.detail << "lambda=" << rep["constants"]["lambda"].get<double>() << " res=" << r1 << "," << r2
           << " dist=" << dist << " means=" << s1["mean_value"].get<double>() << ","
           << s2["mean_value"].get<double>();
}

// 9. Hypothesis checkers on the example nonlinearity.
void hypothesis_checkers(Outcome& o) {
  const ProblemSpec p;
  const Nonlinearity nl = cubic_plus_one();
  const auto xs = lattice_points(p, 4);
  const CheckReport f2 = check_growth_f2(nl, 10.0, xs);
  const CheckReport f3 = check_ar_f3(nl, 10.0, xs);
  std::vector<double> ts, vs;
  for (int i = 0; i < 9; ++i) ts.push_back(1.0 + 0.5 * i);
  for (int i = 0; i < 9; ++i) {
    vs.push_back(2.0 + i);
    vs.push_back(-2.0 - i);
  }
  const CheckReport sh = check_superhomogeneity(nl, ts, vs, xs);
  o.require(nl.a1 == 1.0 && nl.a2 == 1.0 && nl.q == 4.0 && nl.alpha == 3.0 && nl.r0 == 2.0, "constants");
  o.require(f2.pass, "f2");
  o.require(f3.pass, "f3");
  o.require(sh.pass, "superhomogeneity");
  o.detail << "f2 margin=" << f2.margin << " f3 margin=" << f3.margin << " suphom margin=" << sh.margin;
}

// 10. Byte-identical reports across two runs.
void determinism(Outcome& o) {
  auto suite = [] {
    std::string out;
    out += cmd_constants(example_config(), RunOptions{}).report.dump();
    out += cmd_verify(example_config(), RunOptions{}).report.dump();
    out += cmd_reproduce_example(RunOptions{}).report.dump();
    return out;
  };
  const std::string a = suite(), b = suite();
  o.require(a == b, "reports differ");
  o.detail << "bytes=" << a.size();
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Outcome&)> run;
  };
  const Criterion criteria[] = {
      {1, "constant exactness", constant_exactness},
      {2, "spectral operator", spectral_operator},
      {3, "extension certification", extension_certification},
      {4, "gradient correctness", gradient_correctness},
      {5, "embedding closed forms", embedding_closed_forms},
      {6, "chi_upper coherence", chi_coherence},
      {7, "scalar truncation roots", scalar_truncation},
      {8, "multiplicity reproduction", multiplicity},
      {9, "hypothesis checkers", hypothesis_checkers},
      {10, "determinism", determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%s) [%.2fs]: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.str().c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d/10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
