// Copyright 2026 The pfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "pfrac/minimax_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "pfrac/constants_certificates.hpp"

namespace pfrac {

void SolverConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string("solver.") + name + " must be > 0");
  };
  positive(rho, "rho");
  positive(grad_tol, "grad_tol");
  positive(armijo_c1, "armijo_c1");
  positive(distinct_tol, "distinct_tol");
  positive(endpoint_margin, "endpoint_margin");
  if (!(armijo_c1 < 1.0)) throw std::invalid_argument("solver.armijo_c1 must be < 1");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw std::invalid_argument("solver.backtrack must lie in (0,1)");
  if (max_iter < 1) throw std::invalid_argument("solver.max_iter must be >= 1");
  if (max_halvings < 1) throw std::invalid_argument("solver.max_halvings must be >= 1");
  if (path_points < 8) throw std::invalid_argument("solver.path_points must be >= 8");
  if (!(path_perturbation >= 0.0)) throw std::invalid_argument("solver.path_perturbation must be >= 0");
  if (newton_max_dofs < 0) throw std::invalid_argument("solver.newton_max_dofs must be >= 0");
  if (polish_every < 1) throw std::invalid_argument("solver.polish_every must be >= 1");
}

SolutionReport describe_solution(const FourierField& u, const EnergyFunctional& I, const SolverConfig& cfg,
                                 const std::string& method) {
  SolutionReport r(u);
  r.method = method;
  r.energy = I.energy(u);
  r.residual_dual_norm = I.residual_dual_norm(u);
  r.hs_norm = hs_norm(u);
  r.e_norm = e_norm(u);
  r.in_ball = r.e_norm * r.e_norm < cfg.rho;
  r.in_S_rho = r.hs_norm < ball_radius(cfg.rho, u.space().problem());
  return r;
}

namespace {

void project_to_ball(FourierField& u, double rho) {
  const double en = e_norm(u);
  if (en * en > rho) u *= std::sqrt(rho) / en;
}

struct PolishResult {
  FourierField field;
  double residual;
  int steps;
};

// Newton iteration on the residual; each step (possibly halved up to five
// times) is kept only if it lowers the residual dual norm.
PolishResult newton_polish(const FourierField& start, double start_res, const SolverConfig& cfg,
                           const EnergyFunctional& I, int max_steps = 30) {
  PolishResult p{start, start_res, 0};
  for (int it = 0; it < max_steps && p.residual > cfg.grad_tol; ++it) {
    const auto delta = I.newton_correction(p.field, static_cast<std::size_t>(cfg.newton_max_dofs));
    if (!delta) break;
    bool improved = false;
    double tau = 1.0;
    for (int h = 0; h < 6; ++h, tau *= 0.5) {
      FourierField trial = p.field;
      trial.axpy(tau, *delta);
      double res;
      try {
        res = I.residual_dual_norm(trial);
      } catch (const NumericalError&) {
        continue;
      }
      if (res < p.residual) {
        p.field = std::move(trial);
        p.residual = res;
        ++p.steps;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return p;
}

double pairing(const FourierField& a, const FourierField& b) { return l2_inner(a, b); }

}  // namespace

SolutionReport ball_minimize(const FourierField& start, const SolverConfig& cfg, const EnergyFunctional& I) {
  cfg.validate();
  const double lambda = I.lambda();
  FourierField u = start;
  project_to_ball(u, cfg.rho);
  double E = I.energy(u);
  double step = 1.0;
  int newton_steps = 0;
  int last_newton_fail = -1000;
  std::vector<double> history;
  std::vector<double> energies;
  std::string status = "max_iter";
  int iter = 0;
  double res0 = -1.0;

  for (; iter < cfg.max_iter; ++iter) {
    const FourierField r = I.gradient(u);
    const double res = lambda * dual_norm(r);
    history.push_back(res);
    energies.push_back(E);
    if (res0 < 0.0) res0 = res;
    if (res <= cfg.grad_tol) {
      status = "converged";
      break;
    }

    if (cfg.newton_polish && res <= 1e-3 * std::max(1.0, res0) && iter - last_newton_fail >= 10) {
      const PolishResult p = newton_polish(u, res, cfg, I, 1);
      const double Ep = p.steps > 0 ? I.energy(p.field) : E;
      const double en = e_norm(p.field);
      // Near the minimum energy differences drop below rounding, so the
      // energy test allows a few ulps.
      if (p.steps > 0 && Ep <= E + 1e-13 * std::max(1.0, std::abs(E)) && en * en <= cfg.rho) {
        u = p.field;
        E = Ep;
        newton_steps += p.steps;
        continue;
      }
      last_newton_fail = iter;
    }

    FourierField dir = r;
    for (std::size_t i = 0; i < dir.size(); ++i) dir[i] /= u.space().multiplier(i);

    double t = std::min(1.0, 2.0 * step);
    bool accepted = false;
    for (int h = 0; h <= cfg.max_halvings; ++h, t *= cfg.backtrack) {
      FourierField trial = u;
      trial.axpy(-t, dir);
      project_to_ball(trial, cfg.rho);
      double Et;
      try {
        Et = I.energy(trial);
      } catch (const NumericalError&) {
        continue;
      }
      const FourierField moved = u - trial;
      if (Et <= E - cfg.armijo_c1 * pairing(r, moved) && Et <= E) {
        u = std::move(trial);
        E = Et;
        step = t;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      status = "stalled";
      break;
    }
  }

  SolutionReport rep = describe_solution(u, I, cfg, "ball_min");
  const double en2 = rep.e_norm * rep.e_norm;
  if (status != "converged" && en2 >= cfg.rho * (1.0 - 1e-10)) status = "boundary_active";
  rep.status = status;
  rep.converged = status == "converged";
  rep.iterations = iter;
  rep.newton_steps = newton_steps;
  rep.residual_history = std::move(history);
  rep.energy_history = std::move(energies);
  return rep;
}

FourierField find_descent_endpoint(const FourierField& u_loc, const SolverConfig& cfg, const EnergyFunctional& I) {
  const double target = I.energy(u_loc) - cfg.endpoint_margin;
  const FourierField v0 = FourierField::constant(u_loc.space_ptr(), I.nonlinearity().r0);
  double t = 1.0;
  for (int k = 0; k <= 40; ++k, t *= 2.0) {
    const FourierField e = t * v0;
    double E;
    try {
      E = I.energy(e);
    } catch (const NumericalError&) {
      break;
    }
    if (E < target) return e;
  }
  throw SolverError(
      "find_descent_endpoint: no constant multiple of r0 lowers the energy below the local minimum within 40 "
      "doublings; check the Ambrosetti-Rabinowitz constants of the nonlinearity");
}

namespace {

FourierField random_field(const SpacePtr& space, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  FourierField u(space);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const std::size_t j = space->conjugate(i);
    if (j < i) continue;
    const double w = 1.0 / space->multiplier(i);
    u[i] = Complex(g(rng), i == j ? 0.0 : g(rng)) * w;
    u[j] = std::conj(u[i]);
  }
  const double n = hs_norm(u);
  if (n > 0.0) u *= 1.0 / n;
  return u;
}

// Re-spaces nodes uniformly in H^s arc length with fixed endpoints.
std::vector<FourierField> respace(const std::vector<FourierField>& path) {
  const std::size_t n = path.size();
  std::vector<double> arc(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) arc[i] = arc[i - 1] + hs_distance(path[i], path[i - 1]);
  const double total = arc.back();
  std::vector<FourierField> out;
  out.reserve(n);
  out.push_back(path.front());
  std::size_t seg = 1;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double target = total * double(i) / double(n - 1);
    while (seg + 1 < n && arc[seg] < target) ++seg;
    const double len = arc[seg] - arc[seg - 1];
    const double w = len > 0.0 ? (target - arc[seg - 1]) / len : 0.0;
    FourierField z = path[seg - 1];
    z *= 1.0 - w;
    z.axpy(w, path[seg]);
    out.push_back(std::move(z));
  }
  out.push_back(path.back());
  return out;
}

std::size_t argmax_first(const std::vector<double>& e) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (e[i] > e[best]) best = i;
  }
  return best;
}

}  // namespace

SolutionReport mountain_pass(const FourierField& u_a, const FourierField& u_b, const SolverConfig& cfg,
                             const EnergyFunctional& I) {
  cfg.validate();
  const double span = hs_distance(u_a, u_b);
  if (!(span > 0.0)) throw std::invalid_argument("mountain_pass: degenerate path (u_a == u_b)");
  const double Ea = I.energy(u_a);
  const double Eb = I.energy(u_b);
  if (!(Eb < Ea)) throw std::invalid_argument("mountain_pass: endpoint energy must lie below the start energy");

  const double lambda = I.lambda();
  const int P = cfg.path_points;
  std::vector<FourierField> path;
  path.reserve(P + 1);
  std::mt19937_64 rng(cfg.seed);
  for (int i = 0; i <= P; ++i) {
    const double w = double(i) / P;
    FourierField z = u_a;
    z *= 1.0 - w;
    z.axpy(w, u_b);
    if (cfg.path_perturbation > 0.0 && i > 0 && i < P) {
      z.axpy(cfg.path_perturbation * span * std::sin(3.141592653589793 * w), random_field(u_a.space_ptr(), rng));
    }
    path.push_back(std::move(z));
  }
  std::vector<double> E(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) E[i] = I.energy(path[i]);

  std::vector<double> history;
  std::vector<double> path_max;
  std::string status = "max_iter";
  double step = 1.0;
  int newton_steps = 0;
  int iter = 0;
  std::size_t top = 0;
  std::optional<FourierField> polished;
  // Best Newton point that passed the energy and distinctness tests but not
  // the residual tolerance.
  std::optional<FourierField> candidate;
  double candidate_res = std::numeric_limits<double>::infinity();

  auto try_polish = [&](std::size_t idx, double res) -> bool {
    if (!cfg.newton_polish) return false;
    const PolishResult p = newton_polish(path[idx], res, cfg, I);
    newton_steps += p.steps;
    double resolution = 0.0;
    if (idx > 0) resolution = std::max(resolution, std::abs(E[idx] - E[idx - 1]));
    if (idx + 1 < E.size()) resolution = std::max(resolution, std::abs(E[idx] - E[idx + 1]));
    const double Ep = I.energy(p.field);
    if (!(Ep > Ea) || Ep > E[idx] + resolution + 1e-12 * std::abs(E[idx])) return false;
    if (!(hs_distance(p.field, u_a) > cfg.distinct_tol)) return false;
    if (p.residual > cfg.grad_tol) {
      if (p.residual < candidate_res) {
        candidate = p.field;
        candidate_res = p.residual;
      }
      return false;
    }
    polished = p.field;
    return true;
  };

  for (; iter < cfg.max_iter; ++iter) {
    top = argmax_first(E);
    if (top == 0 || top == path.size() - 1) {
      status = "path_collapse";
      break;
    }
    const FourierField r = I.gradient(path[top]);
    const double res = lambda * dual_norm(r);
    history.push_back(res);
    path_max.push_back(E[top]);
    if (res <= cfg.grad_tol) {
      status = "converged";
      break;
    }
    if (iter % cfg.polish_every == 0 && try_polish(top, res)) {
      status = "converged";
      break;
    }

    FourierField dir = r;
    for (std::size_t i = 0; i < dir.size(); ++i) dir[i] /= dir.space().multiplier(i);
    const double slope = pairing(r, dir);
    double t = std::min(1.0, 2.0 * step);
    bool accepted = false;
    for (int h = 0; h <= cfg.max_halvings; ++h, t *= cfg.backtrack) {
      FourierField trial = path[top];
      trial.axpy(-t, dir);
      double Et;
      try {
        Et = I.energy(trial);
      } catch (const NumericalError&) {
        continue;
      }
      if (Et <= E[top] - cfg.armijo_c1 * t * slope) {
        path[top] = std::move(trial);
        E[top] = Et;
        step = t;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      status = try_polish(top, res) ? "converged" : "stalled";
      break;
    }

    const double old_max = *std::max_element(E.begin(), E.end());
    auto candidate = respace(path);
    std::vector<double> cE(candidate.size());
    bool finite = true;
    for (std::size_t i = 0; i < candidate.size() && finite; ++i) {
      try {
        cE[i] = I.energy(candidate[i]);
      } catch (const NumericalError&) {
        finite = false;
      }
    }
    if (finite && *std::max_element(cE.begin(), cE.end()) <= old_max) {
      path = std::move(candidate);
      E = std::move(cE);
    }
  }

  if (status != "converged" && candidate) {
    polished = candidate;
    status = "tolerance_not_reached";
  }
  const FourierField& result = polished ? *polished : path[top];
  SolutionReport rep = describe_solution(result, I, cfg, "mountain_pass");
  rep.status = status;
  rep.converged = status == "converged" && rep.residual_dual_norm <= cfg.grad_tol;
  if (status == "converged" && !rep.converged) rep.status = "stalled";
  rep.iterations = iter;
  rep.newton_steps = newton_steps;
  history.push_back(rep.residual_dual_norm);
  rep.residual_history = std::move(history);
  rep.energy_history = std::move(path_max);
  return rep;
}

MultiplicityReport solve_multiplicity(const SolverConfig& cfg, const EnergyFunctional& I, double lambda_max) {
  cfg.validate();
  MultiplicityReport rep;
  rep.lambda = I.lambda();
  rep.lambda_max = lambda_max;
  if (!(rep.lambda < lambda_max)) {
    std::ostringstream os;
    os.precision(10);
    os << "lambda = " << rep.lambda << " is not below lambda_max(rho = " << cfg.rho << ") = " << lambda_max;
    rep.status = "refused-inadmissible-lambda";
    rep.diagnostics.push_back(os.str());
    return rep;
  }

  rep.first = ball_minimize(FourierField(I.space_ptr()), cfg, I);
  if (!rep.first->converged) {
    rep.status = "non-convergence";
    rep.diagnostics.push_back("ball minimization ended with status " + rep.first->status);
    return rep;
  }
  if (!rep.first->in_S_rho) rep.diagnostics.push_back("ball minimizer lies outside S_rho");

  try {
    rep.endpoint = find_descent_endpoint(rep.first->field, cfg, I);
  } catch (const SolverError& e) {
    rep.status = "one-solution-only";
    rep.diagnostics.push_back(e.what());
    return rep;
  }

  rep.second = mountain_pass(rep.first->field, *rep.endpoint, cfg, I);
  rep.distance = hs_distance(rep.first->field, rep.second->field);
  rep.energy_ordering = rep.first->energy < rep.second->energy;
  if (!rep.energy_ordering) rep.diagnostics.push_back("energy ordering violated: ball minimum above pass level");
  if (!rep.second->converged) {
    rep.status = rep.second->status == "path_collapse" ? "one-solution-only" : "non-convergence";
    rep.diagnostics.push_back("mountain pass ended with status " + rep.second->status);
    return rep;
  }
  if (rep.distance > cfg.distinct_tol) {
    rep.status = "two-solutions";
  } else {
    rep.status = "one-solution-only";
    rep.diagnostics.push_back("mountain-pass point coincides with the ball minimizer");
  }
  return rep;
}

}  // namespace pfrac
