// Copyright 2026 The pfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "pfrac/constants_certificates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pfrac {

std::string to_string(EstimateStatus status) {
  return status == EstimateStatus::exact_closed_form ? "exact-closed-form" : "truncated-lower-bound";
}

double sigma2_closed_form(const ProblemSpec& spec) {
  return std::pow(spec.m, -spec.s) / std::sqrt(kappa(spec.s));
}

double sigma1_closed_form(const ProblemSpec& spec) {
  return std::pow(spec.T, 0.5 * spec.N) * std::pow(spec.m, -spec.s) / std::sqrt(kappa(spec.s));
}

namespace {

class RatioAscent {
 public:
  RatioAscent(const SpacePtr& space, double r, int grid_points)
      : space_(space), r_(r), grid_(space->dim(), grid_points, space->cutoff(), space->problem().T) {}

  double lr(const FourierField& u) const {
    const auto v = sample_on_grid(u, grid_);
    double acc = 0.0;
    for (double x : v) acc += std::pow(std::abs(x), r_);
    return std::pow(grid_.cell_volume() * acc, 1.0 / r_);
  }

  // Coefficients of the derivative of |u|_{L^r} as a dual element.
  FourierField lr_gradient(const FourierField& u, double norm) const {
    const auto v = sample_on_grid(u, grid_);
    std::vector<double> w(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double a = std::abs(v[j]);
      w[j] = a == 0.0 ? 0.0 : std::pow(a, r_ - 2.0) * v[j];
    }
    FourierField g(space_, grid_.forward(std::span<const double>(w)));
    g.enforce_hermitian();
    g *= std::pow(norm, 1.0 - r_);
    return g;
  }

  // Maximises |u|_{L^r} on the H^s unit sphere from `u`; returns the ratio.
  double run(FourierField& u, int max_iter) const {
    u *= 1.0 / hs_norm(u);
    double L = lr(u);
    double t = 1.0;
    for (int it = 0; it < max_iter; ++it) {
      FourierField g = lr_gradient(u, L);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] /= space_->multiplier(i);
      g.axpy(-bilinear_form(g, u), u);
      const double gn = hs_norm(g);
      if (gn <= 1e-12 * L) break;
      bool moved = false;
      while (t > 1e-14) {
        FourierField trial = u;
        trial.axpy(t, g);
        trial *= 1.0 / hs_norm(trial);
        const double Lt = lr(trial);
        if (Lt > L) {
          u = std::move(trial);
          L = Lt;
          t *= 1.5;
          moved = true;
          break;
        }
        t *= 0.5;
      }
      if (!moved) break;
    }
    return L;
  }

 private:
  SpacePtr space_;
  double r_;
  GridTransform grid_;
};

FourierField random_start(const SpacePtr& space, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  FourierField u(space);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const std::size_t j = space->conjugate(i);
    if (j < i) continue;
    const double w = 1.0 / space->multiplier(i);
    u[i] = Complex(g(rng), i == j ? 0.0 : g(rng)) * w;
    u[j] = std::conj(u[i]);
  }
  return u;
}

}  // namespace

EmbeddingEstimate sigma_estimate(double r, const ProblemSpec& spec, const SpectrumParams& params,
                                 const SigmaOptions& options) {
  spec.validate();
  params.validate();
  if (!(r >= 1.0) || !(r < spec.critical_exponent())) {
    std::ostringstream os;
    os << "sigma_estimate: r must satisfy 1 <= r < 2N/(N-2s) = " << spec.critical_exponent() << " (got " << r << ")";
    throw std::invalid_argument(os.str());
  }
  if (options.starts < 1 || options.max_iter < 1) throw std::invalid_argument("sigma_estimate: bad ascent options");
  const SpacePtr space = SpectralSpace::create(spec, params);
  const int grid = options.grid_points > 0
                       ? options.grid_points
                       : std::max(params.grid_points, static_cast<int>(std::ceil(r)) * params.M + 1);
  const RatioAscent ascent(space, r, grid);

  double best = -1.0;
  double best_fraction = 0.0;
  for (int k = 0; k < options.starts; ++k) {
    std::mt19937_64 rng(options.seed * 1000003ULL + static_cast<std::uint64_t>(k));
    FourierField u = random_start(space, rng);
    const double ratio = ascent.run(u, options.max_iter);
    if (ratio > best) {
      best = ratio;
      const std::size_t z = space->zero_mode();
      best_fraction = space->multiplier(z) * std::norm(u[z]) / std::pow(hs_norm(u), 2);
    }
  }

  EmbeddingEstimate est;
  est.r = r;
  est.modes = space->size();
  est.ascent_value = best / std::sqrt(kappa(spec.s));
  est.constant_fraction = best_fraction;
  if (r == 1.0) {
    est.value = sigma1_closed_form(spec);
    est.status = EstimateStatus::exact_closed_form;
  } else if (r == 2.0) {
    est.value = sigma2_closed_form(spec);
    est.status = EstimateStatus::exact_closed_form;
  } else {
    est.value = est.ascent_value;
    est.status = EstimateStatus::truncated_lower_bound;
  }
  return est;
}

namespace {

void require_inputs(double rho, const Sigmas& sigmas) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("rho must be > 0");
  if (!(sigmas.sigma1 > 0.0) || !(sigmas.sigma_q > 0.0)) {
    throw std::invalid_argument("embedding constants sigma_1 and sigma_q must be provided (> 0)");
  }
}

}  // namespace

double lambda_max(double rho, const ProblemSpec& spec, const Nonlinearity& nl, const Sigmas& sigmas) {
  require_inputs(rho, sigmas);
  const double g = 1.0 - spec.shift_ratio();
  const double q = nl.q;
  const double num = q * std::sqrt(rho) * std::pow(g, q / 2.0);
  const double den = 2.0 * kappa(spec.s) *
                     (nl.a1 * sigmas.sigma1 * q * std::pow(g, (q - 1.0) / 2.0) +
                      nl.a2 * std::pow(sigmas.sigma_q, q) * std::pow(rho, (q - 1.0) / 2.0));
  return num / den;
}

double lambda_max_safe(double rho, const ProblemSpec& spec, const Nonlinearity& nl, const Sigmas& sigmas,
                       double inflation) {
  return lambda_max(rho, spec, nl, {sigmas.sigma1 * inflation, sigmas.sigma_q * inflation});
}

double ball_radius(double rho, const ProblemSpec& spec) {
  if (!(rho > 0.0)) throw std::invalid_argument("ball_radius: rho must be > 0");
  return std::sqrt(rho / (kappa(spec.s) * (1.0 - spec.shift_ratio())));
}

double chi_upper(double rho, const ProblemSpec& spec, const Nonlinearity& nl, const Sigmas& sigmas) {
  require_inputs(rho, sigmas);
  const double g = 1.0 - spec.shift_ratio();
  const double q = nl.q;
  return kappa(spec.s) * (sigmas.sigma1 / std::sqrt(rho) * nl.a1 / std::sqrt(g) +
                          std::pow(sigmas.sigma_q, q) * nl.a2 * std::pow(rho, q / 2.0 - 1.0) /
                              (q * std::pow(g, q / 2.0)));
}

double example_h(double rho, const Sigmas& sigmas, const ProblemSpec& spec) {
  require_inputs(rho, sigmas);
  const double g = 1.0 - spec.shift_ratio();
  return std::sqrt(rho) / (4.0 * sigmas.sigma1 * std::pow(g, 1.5) + std::pow(sigmas.sigma_q, 4) * std::pow(rho, 1.5));
}

LambdaInterval example_lambda_interval(const Sigmas& sigmas, const ProblemSpec& spec) {
  const ScalarMaximum best = maximize_over_rho([&](double rho) { return example_h(rho, sigmas, spec); });
  const double g = 1.0 - spec.shift_ratio();
  LambdaInterval out;
  out.argmax_rho = best.argmax;
  out.max_h = best.value;
  out.upper = 2.0 / kappa(spec.s) * g * g * best.value;
  return out;
}

std::vector<LambdaRange> lambda_table(const ProblemSpec& spec, const Nonlinearity& nl, const Sigmas& sigmas,
                                      double rho_lo, double rho_hi, int n) {
  if (!(rho_lo > 0.0 && rho_hi > rho_lo) || n < 2) throw std::invalid_argument("lambda_table: bad rho grid");
  std::vector<LambdaRange> out;
  const double a = std::log(rho_lo), b = std::log(rho_hi);
  for (int i = 0; i < n; ++i) {
    const double rho = std::exp(a + (b - a) * i / (n - 1));
    out.push_back({rho, lambda_max(rho, spec, nl, sigmas), lambda_max_safe(rho, spec, nl, sigmas),
                   ball_radius(rho, spec)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Golden store

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

GoldenStore GoldenStore::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read golden file '" + path + "'");
  GoldenStore store;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    // Keys contain '=' themselves; the value follows the last one.
    const auto eq = line.rfind('=');
    std::size_t used = 0;
    double value = 0.0;
    bool ok = eq != std::string::npos;
    if (ok) {
      try {
        value = std::stod(trim(line.substr(eq + 1)), &used);
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok || used == 0) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    store.entries_[trim(line.substr(0, eq))] = value;
  }
  return store;
}

void GoldenStore::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write golden file '" + path + "'");
  out << "# Embedding-constant ascent results (pfrac constants --update-golden).\n";
  for (const auto& [k, v] : entries_) out << k << " = " << g17(v) << "\n";
}

std::optional<double> GoldenStore::lookup(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string GoldenStore::sigma_key(const ProblemSpec& spec, const SpectrumParams& params, double r) {
  return "sigma:N=" + std::to_string(spec.N) + ":s=" + g17(spec.s) + ":m=" + g17(spec.m) + ":T=" + g17(spec.T) +
         ":M=" + std::to_string(params.M) + ":r=" + g17(r);
}

}  // namespace pfrac
