// Copyright 2026 The pfrac Authors
// SPDX-License-Identifier: Apache-2.0

#include "pfrac/cli_runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "pfrac/bessel_extension.hpp"
#include "pfrac/constants_certificates.hpp"

#ifndef PFRAC_DEFAULT_GOLDEN
#define PFRAC_DEFAULT_GOLDEN "data/golden_sigma.txt"
#endif

namespace pfrac {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

Nonlinearity RunConfig::build_nonlinearity() const {
  Nonlinearity nl = make_nonlinearity(nonlinearity.key, nonlinearity.p);
  if (nonlinearity.a1) nl.a1 = *nonlinearity.a1;
  if (nonlinearity.a2) nl.a2 = *nonlinearity.a2;
  if (nonlinearity.q) nl.q = *nonlinearity.q;
  if (nonlinearity.alpha) nl.alpha = *nonlinearity.alpha;
  if (nonlinearity.r0) nl.r0 = *nonlinearity.r0;
  return nl;
}

void RunConfig::validate() const {
  try {
    problem.validate();
    discretization.validate();
    solver.validate();
    validate_constants(build_nonlinearity(), problem);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RunConfig example_config() {
  RunConfig c;
  c.problem = ProblemSpec{};
  c.problem.s = 0.75;
  c.problem.m = 1.0;
  c.problem.gamma = 0.5;
  c.problem.T = 2.0 * std::numbers::pi;
  c.problem.N = 2;
  c.lambda_auto = true;
  c.discretization = SpectrumParams{8, 32};
  c.nonlinearity = NonlinearityConfig{};
  c.rho_auto = true;
  return c;
}

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

double parse_number(const std::string& text) {
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("trailing characters");
  return v;
}

// Product of numbers and `pi`, e.g. "2*pi", "pi", "6.28".
double parse_expression(const std::string& text) {
  double value = 1.0;
  std::stringstream ss(text);
  std::string factor;
  bool any = false;
  while (std::getline(ss, factor, '*')) {
    factor = trim(factor);
    if (factor.empty()) throw std::invalid_argument("empty factor");
    value *= factor == "pi" ? std::numbers::pi : parse_number(factor);
    any = true;
  }
  if (!any) throw std::invalid_argument("empty value");
  return value;
}

int parse_int(const std::string& text) {
  std::size_t used = 0;
  const long v = std::stol(text, &used);
  if (used != text.size()) throw std::invalid_argument("not an integer");
  return static_cast<int>(v);
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw std::invalid_argument("expected true or false");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c = example_config();
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"command", [&](const std::string& v) { c.command = v; }},
      {"problem.s", [&](const std::string& v) { c.problem.s = parse_expression(v); }},
      {"problem.m", [&](const std::string& v) { c.problem.m = parse_expression(v); }},
      {"problem.gamma", [&](const std::string& v) { c.problem.gamma = parse_expression(v); }},
      {"problem.lambda",
       [&](const std::string& v) {
         c.lambda_auto = v == "auto";
         if (!c.lambda_auto) c.problem.lambda = parse_expression(v);
       }},
      {"problem.T", [&](const std::string& v) { c.problem.T = parse_expression(v); }},
      {"problem.N", [&](const std::string& v) { c.problem.N = parse_int(v); }},
      {"discretization.M", [&](const std::string& v) { c.discretization.M = parse_int(v); }},
      {"discretization.grid_points", [&](const std::string& v) { c.discretization.grid_points = parse_int(v); }},
      {"nonlinearity.key", [&](const std::string& v) { c.nonlinearity.key = v; }},
      {"nonlinearity.p", [&](const std::string& v) { c.nonlinearity.p = parse_expression(v); }},
      {"nonlinearity.a1", [&](const std::string& v) { c.nonlinearity.a1 = parse_expression(v); }},
      {"nonlinearity.a2", [&](const std::string& v) { c.nonlinearity.a2 = parse_expression(v); }},
      {"nonlinearity.q", [&](const std::string& v) { c.nonlinearity.q = parse_expression(v); }},
      {"nonlinearity.alpha", [&](const std::string& v) { c.nonlinearity.alpha = parse_expression(v); }},
      {"nonlinearity.r0", [&](const std::string& v) { c.nonlinearity.r0 = parse_expression(v); }},
      {"solver.rho",
       [&](const std::string& v) {
         c.rho_auto = v == "auto";
         if (!c.rho_auto) c.solver.rho = parse_expression(v);
       }},
      {"solver.grad_tol", [&](const std::string& v) { c.solver.grad_tol = parse_expression(v); }},
      {"solver.max_iter", [&](const std::string& v) { c.solver.max_iter = parse_int(v); }},
      {"solver.path_points", [&](const std::string& v) { c.solver.path_points = parse_int(v); }},
      {"solver.armijo_c1", [&](const std::string& v) { c.solver.armijo_c1 = parse_expression(v); }},
      {"solver.backtrack", [&](const std::string& v) { c.solver.backtrack = parse_expression(v); }},
      {"solver.max_halvings", [&](const std::string& v) { c.solver.max_halvings = parse_int(v); }},
      {"solver.distinct_tol", [&](const std::string& v) { c.solver.distinct_tol = parse_expression(v); }},
      {"solver.seed",
       [&](const std::string& v) {
         std::size_t used = 0;
         c.solver.seed = std::stoull(v, &used);
         if (used != v.size()) throw std::invalid_argument("not an unsigned integer");
       }},
      {"solver.endpoint_margin", [&](const std::string& v) { c.solver.endpoint_margin = parse_expression(v); }},
      {"solver.path_perturbation", [&](const std::string& v) { c.solver.path_perturbation = parse_expression(v); }},
      {"solver.newton_polish", [&](const std::string& v) { c.solver.newton_polish = parse_bool(v); }},
      {"solver.newton_max_dofs", [&](const std::string& v) { c.solver.newton_max_dofs = parse_int(v); }},
      {"solver.polish_every", [&](const std::string& v) { c.solver.polish_every = parse_int(v); }},
  };

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    try {
      it->second(value);
    } catch (const std::exception& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": bad value for " + key + " ('" + value + "'): " + e.what());
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  const Nonlinearity nl = c.build_nonlinearity();
  std::ostringstream os;
  if (!c.command.empty()) os << "command = " << c.command << "\n";
  os << "problem.s = " << g17(c.problem.s) << "\n";
  os << "problem.m = " << g17(c.problem.m) << "\n";
  os << "problem.gamma = " << g17(c.problem.gamma) << "\n";
  os << "problem.lambda = " << (c.lambda_auto ? std::string("auto") : g17(c.problem.lambda)) << "\n";
  os << "problem.T = " << g17(c.problem.T) << "\n";
  os << "problem.N = " << c.problem.N << "\n";
  os << "discretization.M = " << c.discretization.M << "\n";
  os << "discretization.grid_points = " << c.discretization.grid_points << "\n";
  os << "nonlinearity.key = " << c.nonlinearity.key << "\n";
  os << "nonlinearity.p = " << g17(c.nonlinearity.p) << "\n";
  os << "nonlinearity.a1 = " << g17(nl.a1) << "\n";
  os << "nonlinearity.a2 = " << g17(nl.a2) << "\n";
  os << "nonlinearity.q = " << g17(nl.q) << "\n";
  os << "nonlinearity.alpha = " << g17(nl.alpha) << "\n";
  os << "nonlinearity.r0 = " << g17(nl.r0) << "\n";
  const SolverConfig& s = c.solver;
  os << "solver.rho = " << (c.rho_auto ? std::string("auto") : g17(s.rho)) << "\n";
  os << "solver.grad_tol = " << g17(s.grad_tol) << "\n";
  os << "solver.max_iter = " << s.max_iter << "\n";
  os << "solver.path_points = " << s.path_points << "\n";
  os << "solver.armijo_c1 = " << g17(s.armijo_c1) << "\n";
  os << "solver.backtrack = " << g17(s.backtrack) << "\n";
  os << "solver.max_halvings = " << s.max_halvings << "\n";
  os << "solver.distinct_tol = " << g17(s.distinct_tol) << "\n";
  os << "solver.seed = " << s.seed << "\n";
  os << "solver.endpoint_margin = " << g17(s.endpoint_margin) << "\n";
  os << "solver.path_perturbation = " << g17(s.path_perturbation) << "\n";
  os << "solver.newton_polish = " << (s.newton_polish ? "true" : "false") << "\n";
  os << "solver.newton_max_dofs = " << s.newton_max_dofs << "\n";
  os << "solver.polish_every = " << s.polish_every << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Report helpers

namespace {

using Clock = std::chrono::steady_clock;

class Timer {
 public:
  explicit Timer(bool enabled) : enabled_(enabled) {}
  void mark(const std::string& phase) {
    if (!enabled_) return;
    const auto now = Clock::now();
    times_[phase] = std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }
  json to_json() const {
    json j = json::object();
    for (const auto& [k, v] : times_) j[k] = v;
    return j;
  }

 private:
  bool enabled_;
  Clock::time_point last_ = Clock::now();
  std::map<std::string, double> times_;
};

json config_json(const RunConfig& c) {
  const Nonlinearity nl = c.build_nonlinearity();
  json j;
  j["problem"] = {{"s", c.problem.s},
                  {"m", c.problem.m},
                  {"gamma", c.problem.gamma},
                  {"lambda", c.lambda_auto ? json("auto") : json(c.problem.lambda)},
                  {"T", c.problem.T},
                  {"N", c.problem.N}};
  j["discretization"] = {{"M", c.discretization.M}, {"grid_points", c.discretization.grid_points}};
  j["nonlinearity"] = {{"key", c.nonlinearity.key}, {"name", nl.name}, {"a1", nl.a1}, {"a2", nl.a2},
                       {"q", nl.q},                 {"alpha", nl.alpha}, {"r0", nl.r0}};
  const SolverConfig& s = c.solver;
  j["solver"] = {{"rho", c.rho_auto ? json("auto") : json(s.rho)},
                 {"grad_tol", s.grad_tol},
                 {"max_iter", s.max_iter},
                 {"path_points", s.path_points},
                 {"armijo_c1", s.armijo_c1},
                 {"backtrack", s.backtrack},
                 {"max_halvings", s.max_halvings},
                 {"distinct_tol", s.distinct_tol},
                 {"endpoint_margin", s.endpoint_margin},
                 {"path_perturbation", s.path_perturbation},
                 {"newton_polish", s.newton_polish}};
  return j;
}

json base_report(const std::string& command, const RunOptions& options) {
  json r;
  r["command"] = command;
  r["status"] = "";
  r["exit_code"] = 0;
  r["seed"] = options.seed;
  r["config"] = json::object();
  r["constants"] = json::object();
  r["solutions"] = json::array();
  r["verification"] = json::object();
  r["diagnostics"] = json::array();
  r["timings"] = json::object();
  return r;
}

RunResult finish(json report, int code, const std::string& status) {
  report["status"] = status;
  report["exit_code"] = code;
  return {code, std::move(report)};
}

json check_json(const CheckReport& c, int dim) {
  json x = json::array();
  for (int d = 0; d < dim; ++d) x.push_back(c.witness_x[d]);
  return {{"name", c.name},           {"pass", c.pass},         {"margin", c.margin}, {"witness_x", x},
          {"witness_t", c.witness_t}, {"witness_v", c.witness_v}, {"samples", c.samples}};
}

json solution_json(const SolutionReport& s, double distinct_tol) {
  const auto& sp = s.field.space();
  const double mean = s.field[sp.zero_mode()].real() / std::sqrt(sp.problem().volume());
  return {{"method", s.method},
          {"status", s.status},
          {"converged", s.converged},
          {"energy", s.energy},
          {"residual_dual_norm", s.residual_dual_norm},
          {"hs_norm", s.hs_norm},
          {"e_norm", s.e_norm},
          {"in_ball", s.in_ball},
          {"in_S_rho", s.in_S_rho},
          {"nontrivial", s.hs_norm > distinct_tol},
          {"mean_value", mean},
          {"iterations", s.iterations},
          {"newton_steps", s.newton_steps},
          {"residual_history", s.residual_history}};
}

void dump_field(const FourierField& u, const std::string& path) {
  const auto& sp = u.space();
  const auto values = inverse_transform(u);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (int d = 0; d < sp.dim(); ++d) out << "x" << (d + 1) << ",";
  out << "u\n";
  std::array<double, kMaxDim> x{};
  for (std::size_t j = 0; j < values.size(); ++j) {
    sp.grid().node(j, x);
    for (int d = 0; d < sp.dim(); ++d) out << g17(x[d]) << ",";
    out << g17(values[j]) << "\n";
  }
}

// Constants shared by `constants`, `solve` and `reproduce-example`.
struct Certification {
  Sigmas sigmas;
  double rho = 0.0;
  double rho_star = 0.0;
  double lambda_best = 0.0;
  json constants;
  std::string error;
};

Certification certify(const RunConfig& cfg, const RunOptions& options) {
  Certification out;
  const ProblemSpec& spec = cfg.problem;
  const Nonlinearity nl = cfg.build_nonlinearity();
  const std::string golden_path = options.golden_path.empty() ? PFRAC_DEFAULT_GOLDEN : options.golden_path;

  const EmbeddingEstimate s1{1.0, sigma1_closed_form(spec), EstimateStatus::exact_closed_form, 0.0, 0, 1.0};
  const std::string key = GoldenStore::sigma_key(spec, cfg.discretization, nl.q);
  GoldenStore store;
  bool have_file = true;
  try {
    store = GoldenStore::load(golden_path);
  } catch (const std::runtime_error&) {
    have_file = false;
  }
  std::optional<double> sq = store.lookup(key);
  std::string source = "golden";
  if (options.update_golden) {
    SigmaOptions so;
    so.seed = options.seed;
    const EmbeddingEstimate e = sigma_estimate(nl.q, spec, cfg.discretization, so);
    sq = e.value;
    source = "ascent";
    store.set(key, e.value);
    store.save(golden_path);
  }
  if (!sq) {
    out.error = have_file ? "golden entry '" + key + "' is missing from " + golden_path +
                                "; regenerate it with `pfrac constants --update-golden`"
                          : "golden file " + golden_path + " not found; regenerate it with `pfrac constants --update-golden`";
    return out;
  }
  out.sigmas = {s1.value, *sq};

  const ScalarMaximum best = maximize_over_rho([&](double rho) { return lambda_max(rho, spec, nl, out.sigmas); });
  out.rho_star = best.argmax;
  out.lambda_best = best.value;
  out.rho = cfg.rho_auto ? out.rho_star : cfg.solver.rho;

  json table = json::array();
  for (const auto& row : lambda_table(spec, nl, out.sigmas, out.rho_star * 1e-3, out.rho_star * 1e3, 16)) {
    table.push_back({{"rho", row.rho},
                     {"lambda_max", row.lambda_max},
                     {"lambda_max_safe", row.lambda_max_safe},
                     {"ball_radius", row.ball_radius}});
  }

  json c;
  c["kappa"] = kappa(spec.s);
  c["sigma_1"] = {{"r", 1.0}, {"value", s1.value}, {"status", to_string(s1.status)}};
  c["sigma_2"] = {{"r", 2.0}, {"value", sigma2_closed_form(spec)}, {"status", "exact-closed-form"}};
  c["sigma_q"] = {{"r", nl.q},
                  {"value", *sq},
                  {"status", to_string(EstimateStatus::truncated_lower_bound)},
                  {"source", source},
                  {"key", key}};
  c["lambda_table"] = table;
  c["rho_star"] = out.rho_star;
  c["lambda_max_best"] = out.lambda_best;
  c["rho"] = out.rho;
  c["rho_auto"] = cfg.rho_auto;
  c["lambda_max"] = lambda_max(out.rho, spec, nl, out.sigmas);
  c["lambda_max_safe"] = lambda_max_safe(out.rho, spec, nl, out.sigmas);
  c["s_rho_radius"] = ball_radius(out.rho, spec);
  c["chi_upper"] = chi_upper(out.rho, spec, nl, out.sigmas);
  c["shift_ratio"] = spec.shift_ratio();
  if (nl.q == 4.0 && nl.a1 == 1.0 && nl.a2 == 1.0) {
    const LambdaInterval li = example_lambda_interval(out.sigmas, spec);
    c["example"] = {{"h_argmax_rho", li.argmax_rho}, {"h_max", li.max_h}, {"Lambda", {li.lower, li.upper}}};
  } else {
    c["example"] = nullptr;
  }
  out.constants = std::move(c);
  return out;
}

FourierField random_smooth_field(const SpacePtr& space, std::mt19937_64& rng, int max_k, double amplitude) {
  std::normal_distribution<double> g(0.0, 1.0);
  FourierField u(space);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const std::size_t j = space->conjugate(i);
    if (j < i) continue;
    const MultiIndex k = space->mode(i);
    bool keep = true;
    for (int d = 0; d < space->dim(); ++d) keep = keep && std::abs(k[d]) <= max_k;
    if (!keep) continue;
    u[i] = amplitude * Complex(g(rng), i == j ? 0.0 : g(rng)) / space->multiplier(i);
    u[j] = std::conj(u[i]);
  }
  return u;
}

}  // namespace

// ---------------------------------------------------------------------------
// Commands

RunResult cmd_constants(const RunConfig& config, const RunOptions& options) {
  json report = base_report("constants", options);
  Timer timer(options.timings);
  try {
    config.validate();
  } catch (const ConfigError& e) {
    report["diagnostics"].push_back(e.what());
    return finish(std::move(report), kExitConfigError, "config-error");
  }
  report["config"] = config_json(config);
  Certification cert = certify(config, options);
  timer.mark("constants");
  report["timings"] = timer.to_json();
  if (!cert.error.empty()) {
    // The closed forms do not depend on the golden file.
    const ProblemSpec& spec = config.problem;
    report["constants"] = {{"kappa", kappa(spec.s)},
                           {"sigma_1", {{"r", 1.0}, {"value", sigma1_closed_form(spec)}, {"status", "exact-closed-form"}}},
                           {"sigma_2", {{"r", 2.0}, {"value", sigma2_closed_form(spec)}, {"status", "exact-closed-form"}}}};
    report["diagnostics"].push_back(cert.error);
    return finish(std::move(report), kExitConfigError, "missing-golden");
  }
  report["constants"] = std::move(cert.constants);
  return finish(std::move(report), kExitSuccess, "ok");
}

namespace {

RunResult run_solve(const RunConfig& config, const RunOptions& options, const std::string& command,
                    const std::function<void(json&, const MultiplicityReport&)>& extra = {}) {
  json report = base_report(command, options);
  Timer timer(options.timings);
  try {
    config.validate();
  } catch (const ConfigError& e) {
    report["diagnostics"].push_back(e.what());
    return finish(std::move(report), kExitConfigError, "config-error");
  }
  report["config"] = config_json(config);
  Certification cert = certify(config, options);
  timer.mark("constants");
  if (!cert.error.empty()) {
    report["diagnostics"].push_back(cert.error);
    report["timings"] = timer.to_json();
    return finish(std::move(report), kExitConfigError, "missing-golden");
  }

  ProblemSpec spec = config.problem;
  const Nonlinearity nl = config.build_nonlinearity();
  if (config.lambda_auto) spec.lambda = 0.5 * cert.lambda_best;
  SolverConfig scfg = config.solver;
  scfg.rho = cert.rho;
  scfg.seed = options.seed;
  const double lmax = lambda_max(scfg.rho, spec, nl, cert.sigmas);
  cert.constants["lambda"] = spec.lambda;
  cert.constants["lambda_auto"] = config.lambda_auto;
  report["constants"] = cert.constants;

  MultiplicityReport mr;
  try {
    const SpacePtr space = SpectralSpace::create(spec, config.discretization);
    const EnergyFunctional I(space, nl);
    mr = solve_multiplicity(scfg, I, lmax);
  } catch (const NumericalError& e) {
    report["diagnostics"].push_back(e.what());
    report["timings"] = timer.to_json();
    return finish(std::move(report), kExitNonConvergence, "non-convergence");
  }
  timer.mark("solve");

  for (const auto& d : mr.diagnostics) report["diagnostics"].push_back(d);
  if (mr.first) report["solutions"].push_back(solution_json(*mr.first, scfg.distinct_tol));
  if (mr.second) report["solutions"].push_back(solution_json(*mr.second, scfg.distinct_tol));

  json v = json::object();
  if (mr.first && mr.second) {
    const double radius = ball_radius(scfg.rho, spec);
    v["hs_distance"] = mr.distance;
    v["distinct"] = mr.distance > scfg.distinct_tol;
    v["energy_ordering"] = mr.energy_ordering;
    v["first_in_S_rho"] = mr.first->in_S_rho;
    v["first_in_ball"] = mr.first->in_ball;
    v["S_rho_radius"] = radius;
    v["residuals_below_tol"] =
        mr.first->residual_dual_norm <= scfg.grad_tol && mr.second->residual_dual_norm <= scfg.grad_tol;
  }
  v["lambda"] = mr.lambda;
  v["lambda_max"] = mr.lambda_max;
  report["verification"] = v;

  if (!options.dump_dir.empty() && mr.first) {
    std::filesystem::create_directories(options.dump_dir);
    dump_field(mr.first->field, options.dump_dir + "/solution_1.csv");
    if (mr.second) dump_field(mr.second->field, options.dump_dir + "/solution_2.csv");
  }
  if (extra) extra(report, mr);
  report["timings"] = timer.to_json();

  if (mr.status == "refused-inadmissible-lambda") return finish(std::move(report), kExitRefused, mr.status);
  if (mr.status == "non-convergence") return finish(std::move(report), kExitNonConvergence, mr.status);
  if (mr.status == "one-solution-only") return finish(std::move(report), kExitVerificationFailure, mr.status);
  return finish(std::move(report), kExitSuccess, mr.status);
}

}  // namespace

RunResult cmd_solve(const RunConfig& config, const RunOptions& options) {
  return run_solve(config, options, "solve");
}

RunResult cmd_verify(const RunConfig& config, const RunOptions& options) {
  json report = base_report("verify", options);
  Timer timer(options.timings);
  try {
    config.validate();
  } catch (const ConfigError& e) {
    report["diagnostics"].push_back(e.what());
    return finish(std::move(report), kExitConfigError, "config-error");
  }
  report["config"] = config_json(config);
  ProblemSpec spec = config.problem;
  const Nonlinearity nl = config.build_nonlinearity();
  const ExtensionProfile profile(spec.s, options.corrupt_theta);
  const double kap = kappa(spec.s);
  bool all_pass = true;
  json checks = json::array();

  auto add = [&](const std::string& name, double gap, double tol, const std::string& note = "") {
    const bool pass = std::isfinite(gap) && gap <= tol;
    all_pass = all_pass && pass;
    json c = {{"name", name}, {"gap", std::isfinite(gap) ? json(gap) : json(nullptr)}, {"tolerance", tol},
              {"pass", pass}};
    if (!note.empty()) c["note"] = note;
    checks.push_back(std::move(c));
  };
  auto guarded = [&](const std::string& name, double tol, const std::function<double()>& f) {
    try {
      add(name, f(), tol);
    } catch (const std::exception& e) {
      add(name, std::numeric_limits<double>::infinity(), tol, e.what());
    }
  };

  guarded("ode_residual", 1e-5, [&] {
    double worst = 0.0;
    for (int i = 0; i <= 99; ++i) {
      const double y = 0.1 * std::pow(100.0, i / 99.0);
      worst = std::max(worst, std::abs(ode_residual(profile, y)));
    }
    return worst;
  });
  guarded("profile_energy", 1e-6, [&] { return std::abs(profile_energy(profile) - kap) / kap; });
  report["verification"]["profile_energy"] = nullptr;
  try {
    report["verification"]["profile_energy"] = profile_energy(profile);
  } catch (const std::exception&) {
  }
  for (double mu : {1.0, 2.0, 5.0}) {
    guarded("conormal_limit(mu=" + g17(mu) + ")", 1e-4, [&] {
      const double target = kap * std::pow(mu, spec.s);
      return std::abs(conormal_limit(profile, mu) - target) / target;
    });
  }

  std::mt19937_64 rng(options.seed);
  SpectrumParams small{std::min(config.discretization.M, 2), 0};
  small.grid_points = std::max(config.discretization.grid_points, 2 * small.M + 1);
  const SpacePtr trace_space = SpectralSpace::create(spec, small);
  guarded("trace_identity", 1e-5, [&] {
    std::uniform_int_distribution<std::size_t> pick(0, trace_space->size() - 1);
    std::normal_distribution<double> g(0.0, 1.0);
    FourierField u(trace_space);
    for (int n = 0; n < 5; ++n) {
      const std::size_t i = pick(rng);
      u.set_mode(trace_space->mode(i), Complex(g(rng), g(rng)));
    }
    return verify_trace_identity(u, profile).relative_gap;
  });
  timer.mark("extension");

  // Analytic gradient against central differences of the energy.
  const SpacePtr space = SpectralSpace::create(spec, config.discretization);
  const EnergyFunctional I(space, nl);
  guarded("gradient_fd", 1e-5, [&] {
    double worst = 0.0;
    for (int n = 0; n < 3; ++n) {
      const FourierField u = random_smooth_field(space, rng, 4, 0.5);
      const FourierField phi = random_smooth_field(space, rng, 4, 1.0);
      const double an = l2_inner(I.gradient(u), phi);
      double best = std::numeric_limits<double>::infinity();
      for (double h : {1e-4, 1e-5, 1e-6}) {
        const double fd = (I.energy(u + h * phi) - I.energy(u - h * phi)) / (2 * h);
        best = std::min(best, std::abs(fd - an) / std::max(std::abs(an), 1e-300));
      }
      worst = std::max(worst, best);
    }
    return worst;
  });
  timer.mark("gradient");

  json hyp = json::array();
  const auto xs = lattice_points(spec, 4);
  const double t_max = std::max(10.0, 4.0 * nl.r0);
  std::vector<CheckReport> reports = {check_periodicity_f1(nl, spec, t_max, xs),
                                      check_growth_f2(nl, t_max, xs),
                                      check_ar_f3(nl, t_max, xs),
                                      check_primitive(nl, t_max, xs)};
  std::vector<double> ts, vs;
  for (int i = 0; i < 9; ++i) ts.push_back(1.0 + 0.5 * i);
  for (int i = 0; i < 9; ++i) {
    const double v = nl.r0 * (1.0 + 0.5 * i);
    vs.push_back(v);
    vs.push_back(-v);
  }
  reports.push_back(check_superhomogeneity(nl, ts, vs, xs));
  for (const auto& r : reports) {
    hyp.push_back(check_json(r, spec.N));
    all_pass = all_pass && r.pass;
  }
  const double f0 = nl.value(xs.front(), 0.0);
  report["verification"]["f_at_zero"] = f0;
  report["verification"]["checks"] = checks;
  report["verification"]["hypotheses"] = hyp;
  report["verification"]["kappa"] = kap;
  report["verification"]["theta_corrupted"] = options.corrupt_theta;
  timer.mark("hypotheses");
  report["timings"] = timer.to_json();
  if (!all_pass) report["diagnostics"].push_back("one or more verification checks failed");
  return finish(std::move(report), all_pass ? kExitSuccess : kExitVerificationFailure,
                all_pass ? "all-checks-pass" : "verification-failure");
}

RunResult cmd_reproduce_example(const RunOptions& options) {
  RunConfig cfg = example_config();
  cfg.command = "reproduce-example";
  if (options.modes) {
    cfg.discretization.M = *options.modes;
    cfg.discretization.grid_points = std::max(cfg.discretization.grid_points, 2 * *options.modes + 1);
  }
  if (options.lambda) {
    cfg.lambda_auto = false;
    cfg.problem.lambda = *options.lambda;
  }
  // λ = midpoint of Λ; for this example Λ's endpoint equals max_ρ λ_max(ρ),
  // so the midpoint coincides with the `auto` policy.
  return run_solve(cfg, options, "reproduce-example", [&](json& report, const MultiplicityReport& mr) {
    const Nonlinearity nl = cfg.build_nonlinearity();
    const std::array<double, kMaxDim> origin{};
    json ex;
    ex["f_at_zero"] = nl.value(origin, 0.0);
    ex["cond0_violated"] = nl.value(origin, 0.0) != 0.0;
    ex["lambda_policy"] = options.lambda ? "fixed" : "midpoint-of-Lambda";
    bool nontrivial = mr.first.has_value() && mr.second.has_value();
    if (mr.first) nontrivial = nontrivial && mr.first->hs_norm > cfg.solver.distinct_tol;
    if (mr.second) nontrivial = nontrivial && mr.second->hs_norm > cfg.solver.distinct_tol;
    ex["both_nontrivial"] = nontrivial;
    report["verification"]["example"] = ex;
  });
}

// ---------------------------------------------------------------------------
// Command line

int run_cli(int argc, char** argv) {
  CLI::App app{"pfrac: two periodic solutions of a fractional relativistic Schrodinger equation"};
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  RunOptions options;
  std::optional<double> lambda;
  std::optional<int> modes;
  app.add_option("command", command, "constants | solve | verify | reproduce-example")
      ->required()
      ->check(CLI::IsMember({"constants", "solve", "verify", "reproduce-example"}));
  app.add_option("--config", config_path, "configuration file (default: the cubic example)");
  app.add_option("--seed", seed, "master RNG seed (default: solver.seed, 0)");
  app.add_option("--dump-fields", options.dump_dir, "write one CSV per solution into DIR");
  app.add_option("--golden", options.golden_path, "golden embedding-constant file");
  app.add_flag("--update-golden", options.update_golden, "recompute sigma_q by ascent and store it");
  app.add_flag("--timings", options.timings, "include wall-clock timings in the report");
  app.add_option("--lambda", lambda, "reproduce-example: fixed lambda instead of the midpoint of Lambda");
  app.add_option("--modes", modes, "reproduce-example: mode cutoff M");
  app.add_flag("--corrupt-theta", options.corrupt_theta)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }
  options.lambda = lambda;
  options.modes = modes;

  RunResult result;
  RunConfig cfg = example_config();
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    cfg.command = command;
    options.seed = seed ? *seed : cfg.solver.seed;
    if (command == "constants") {
      result = cmd_constants(cfg, options);
    } else if (command == "solve") {
      result = cmd_solve(cfg, options);
    } else if (command == "verify") {
      result = cmd_verify(cfg, options);
    } else {
      result = cmd_reproduce_example(options);
    }
  } catch (const ConfigError& e) {
    json report = base_report(command, options);
    report["diagnostics"].push_back(e.what());
    result = finish(std::move(report), kExitConfigError, "config-error");
  } catch (const std::exception& e) {
    json report = base_report(command, options);
    report["diagnostics"].push_back(e.what());
    result = finish(std::move(report), kExitNonConvergence, "error");
  }
  std::cout << result.report.dump(2) << "\n";
  return result.exit_code;
}

}  // namespace pfrac
