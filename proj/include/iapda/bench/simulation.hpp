#ifndef IAPDA_BENCH_SIMULATION_HPP
#define IAPDA_BENCH_SIMULATION_HPP

#include <fstream>
#include <optional>
#include <string>

#include "json.hpp"

#include "iapda/bench/generators.hpp"
#include "iapda/bench/problem_io.hpp"
#include "iapda/dynamics.hpp"
#include "iapda/saddle.hpp"

namespace iapda::bench {

/// Simulation file: ODE parameters, the problem ("scalar" or a problem sidecar path) and the initial state.
struct SimulationSpec {
  OdeConfig config;
  std::string problem = "scalar";
  std::optional<Vector> x0, xdot0, lam0, lamdot0;
};

inline SimulationSpec simulation_from_json(const nlohmann::json& j) {
  SimulationSpec s;
  try {
    OdeConfig& c = s.config;
    c.alpha = j.value("alpha", c.alpha);
    c.rho = j.value("rho", c.rho);
    c.beta_c = j.value("beta_c", c.beta_c);
    c.beta_p = j.value("beta_p", c.beta_p);
    c.gamma = MoreauParams{j.value("gamma", c.gamma.gamma)};
    c.t0 = j.value("t0", c.t0);
    c.t_end = j.value("t_end", c.t_end);
    c.step_h = j.value("h", c.step_h);
    c.output_stride = j.value("output_stride", c.output_stride);
    s.problem = j.value("problem", s.problem);
    if (j.contains("x0")) s.x0 = vector_from_json(j["x0"], "x0");
    if (j.contains("xdot0")) s.xdot0 = vector_from_json(j["xdot0"], "xdot0");
    if (j.contains("lambda0")) s.lam0 = vector_from_json(j["lambda0"], "lambda0");
    if (j.contains("lambdadot0")) s.lamdot0 = vector_from_json(j["lambdadot0"], "lambdadot0");
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("simulation: ") + e.what());
  }
  s.config.validate();
  return s;
}

inline SimulationSpec read_simulation(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return simulation_from_json(j);
}

struct SimulationRun {
  CompositeProblem problem;
  std::optional<SaddlePointCertificate> saddle;
  Trajectory trajectory;
};

/// Resolves the problem, fills in default initial data (x0 = 1 for the scalar case, zeros otherwise) and integrates.
inline SimulationRun run_simulation(const SimulationSpec& spec) {
  CompositeProblem problem = scalar_instance();
  std::optional<SaddlePointCertificate> saddle;
  if (spec.problem == "scalar") {
    saddle = SaddlePointCertificate{Vector::Zero(1), Vector::Zero(1), 0.0};
  } else {
    ProblemFile pf = read_problem(spec.problem);
    problem = std::move(pf.problem);
    saddle = std::move(pf.saddle);
    if (!saddle && problem.g().is_zero() && problem.f().kind() != SmoothKind::Custom)
      saddle = solve_quadratic_saddle(problem);
  }
  const Index n = problem.dim_primal();
  const Index m = problem.dim_dual();
  OdeState init;
  init.x = spec.x0.value_or(spec.problem == "scalar" ? Vector(Vector::Ones(n)) : Vector(Vector::Zero(n)));
  init.xdot = spec.xdot0.value_or(Vector::Zero(n));
  init.lam = spec.lam0.value_or(Vector::Zero(m));
  init.lamdot = spec.lamdot0.value_or(Vector::Zero(m));
  Trajectory traj = integrate(spec.config, problem, init, saddle);
  return {std::move(problem), std::move(saddle), std::move(traj)};
}

}  // namespace iapda::bench

#endif  // IAPDA_BENCH_SIMULATION_HPP
