// iapda: generate problems, run solvers and experiments, integrate the continuous system, fit rates.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "iapda/bench/experiment.hpp"
#include "iapda/bench/generators.hpp"
#include "iapda/bench/problem_io.hpp"
#include "iapda/bench/rate_fit.hpp"
#include "iapda/bench/simulation.hpp"
#include "iapda/certificates.hpp"

namespace {

using namespace iapda;
using namespace iapda::bench;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;

struct GenOptions {
  std::string kind = "l1l2";
  long m = 150, n = 200;
  double mu = 1.5, sparsity = 0.05, noise = 1e-6, density = 0.5;
  std::uint64_t seed = 1;
  bool plain = false;
  bool saddle = false;
  std::string out = "problem";
};

int cmd_gen(const GenOptions& o) {
  ProblemFile pf{scalar_instance(), {}, std::nullopt, std::nullopt};
  if (o.kind == "l1l2") {
    L1L2Instance inst = gen_l1l2(o.m, o.n, o.mu, o.sparsity, o.noise, o.seed);
    for (const std::string& w : inst.warnings) std::cerr << "warning: " << w << '\n';
    pf.problem = std::move(inst.problem);
    pf.x_true = std::move(inst.x_true);
    pf.defaults = {1e-4, 10.0, 2.0};
    if (o.saddle) {
      pf.saddle = solve_l1l2_saddle(pf.problem);
      if (!pf.saddle) std::cerr << "warning: reference saddle did not converge; none written\n";
    }
  } else if (o.kind == "nnls") {
    pf.problem = gen_nnls(o.m, o.n, o.density, o.seed, !o.plain);
    pf.defaults = {0.1, 1.0, std::min(1.0, 1.0 / pf.problem.lipschitz_f())};
  } else if (o.kind == "scalar") {
    pf.saddle = SaddlePointCertificate{Vector::Zero(1), Vector::Zero(1), 0.0};
  } else {
    throw ConfigError("gen: unknown kind '" + o.kind + "'");
  }
  write_problem(o.out, pf);
  std::cout << "wrote " << o.out << ".json\n";
  return kExitOk;
}

struct SolveOptions {
  std::string problem;
  SolverSpec solver;
  long iterations = 100;
  std::string out;
  bool timing = false;
  bool certificates = false;
};

int cmd_solve(SolveOptions o) {
  ProblemFile pf = read_problem(o.problem);
  if (!o.solver.beta0 && pf.defaults.beta0) o.solver.beta0 = pf.defaults.beta0;
  ExperimentSpec spec;
  spec.iterations = o.iterations;
  spec.certificates = o.certificates;
  spec.solvers = {o.solver};
  spec.kind = "custom";
  spec.problem_path = o.problem;
  spec.validate();
  const Index n = pf.problem.dim_primal();
  ExperimentProblem ep{std::move(pf.problem), Vector::Zero(n), std::move(pf.saddle), {}};
  const SolverOutcome out = run_solver(o.solver, ep, spec);
  if (!o.out.empty()) {
    write_trace_csv(o.out, out.trace, o.timing);
  } else {
    write_trace_csv(std::cout, out.trace, o.timing);
  }
  const std::size_t shown = std::min<std::size_t>(out.trace.warnings.size(), 3);
  for (std::size_t i = 0; i < shown; ++i) std::cerr << "warning: " << out.trace.warnings[i] << '\n';
  if (out.trace.warnings.size() > shown)
    std::cerr << "warning: " << out.trace.warnings.size() - shown << " more warnings\n";
  std::cerr << out.label << ": " << out.status << " (" << to_string(out.trace.stop) << ")";
  if (!out.message.empty()) std::cerr << ": " << out.message;
  std::cerr << '\n';
  return out.status == "ok" ? kExitOk : kExitCheckFailed;
}

struct BenchOptions {
  std::string spec;
  std::string preset;
  bool full = false;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<long> iterations;
  bool svg = false;
};

int cmd_bench(const BenchOptions& o) {
  ExperimentSpec spec;
  if (!o.spec.empty()) {
    spec = read_experiment(o.spec);
  } else if (!o.preset.empty()) {
    spec = preset(o.preset, o.full);
  } else {
    throw ConfigError("bench: give a spec file or --preset");
  }
  if (!o.out_dir.empty()) spec.output_dir = o.out_dir;
  if (o.seed) spec.seed = *o.seed;
  if (o.iterations) spec.iterations = *o.iterations;
  if (o.svg) spec.svg = true;
  const ExperimentResult res = run_experiment(spec);
  for (const std::string& w : res.warnings) std::cerr << "warning: " << w << '\n';
  for (const SolverOutcome& out : res.outcomes) {
    std::cout << out.label << ": " << out.status << " feas_slope=" << format_double(out.feas_slope)
              << " gap_slope=" << format_double(out.gap_slope) << " certificates=" << out.certificate;
    if (!out.message.empty()) std::cout << " (" << out.message << ")";
    std::cout << '\n';
  }
  for (const std::string& f : res.files) std::cout << "wrote " << f << '\n';
  return res.exit_code;
}

struct SimulateOptions {
  std::string config;
  std::string out;
  std::string state_dump;
};

int cmd_simulate(const SimulateOptions& o) {
  const SimulationSpec spec = read_simulation(o.config);
  const SimulationRun run = run_simulation(spec);
  if (o.out.empty()) {
    write_trajectory_csv(std::cout, run.trajectory);
  } else {
    std::ofstream out(o.out);
    if (!out) throw ConfigError("cannot open " + o.out);
    write_trajectory_csv(out, run.trajectory);
  }
  if (!o.state_dump.empty()) {
    std::ofstream dump(o.state_dump);
    if (!dump) throw ConfigError("cannot open " + o.state_dump);
    write_state_csv(dump, run.trajectory);
  }
  if (run.trajectory.aborted) {
    std::cerr << "aborted: " << run.trajectory.message << '\n';
    return kExitCheckFailed;
  }
  return kExitOk;
}

struct RatesOptions {
  std::string trace;
  std::vector<std::string> columns{"feas_violation", "pd_gap"};
  std::string abscissa;
  double lo = 0.0, hi = 0.0;
};

int cmd_rates(const RatesOptions& o) {
  const CsvTable table = read_csv(o.trace);
  const std::string xname = !o.abscissa.empty() ? o.abscissa : (table.has("k") ? "k" : "t");
  const std::vector<double>& ks = table.column(xname);
  if (ks.empty()) throw ConfigError("rates: trace has no rows");
  const double lo = o.lo > 0.0 ? o.lo : std::max(ks.front(), ks.back() / 10.0);
  const double hi = o.hi > 0.0 ? o.hi : ks.back();
  std::cout << "column,k_lo,k_hi,slope,intercept,r_squared,points\n";
  for (const std::string& c : o.columns) {
    if (!table.has(c)) {
      std::cerr << "warning: no column '" << c << "'\n";
      continue;
    }
    const RateFit fit = fit_rate_slope(ks, table.column(c), lo, hi);
    for (const std::string& w : fit.warnings) std::cerr << "warning: " << c << ": " << w << '\n';
    std::cout << c << ',' << format_double(fit.k_lo) << ',' << format_double(fit.k_hi) << ','
              << format_double(fit.slope) << ',' << format_double(fit.intercept) << ','
              << format_double(fit.r_squared) << ',' << fit.points << '\n';
  }
  return kExitOk;
}

void add_solver_flags(CLI::App* app, SolverSpec& s) {
  app->add_option("--solver", s.name, "iapda, fista or afbm")->check(CLI::IsMember({"iapda", "fista", "afbm"}));
  app->add_option("--rule", s.rule, "extrapolation rule")->check(CLI::IsMember({"nesterov", "cd", "ac"}));
  app->add_option("--alpha", s.alpha, "rule / AFBM parameter alpha");
  app->add_option("--beta0", s.beta0, "initial scaling beta_0");
  app->add_option("--beta-power", s.beta_power, "beta_k grows like k^p (0 keeps beta constant)");
  app->add_option("--rho", s.rho, "augmentation rho");
  app->add_option("--sigma", s.sigma, "dual step sigma");
  app->add_option("--subtol", s.subtol, "inner FISTA relative-change tolerance");
  app->add_option("--max-inner", s.max_inner, "inner FISTA iteration cap");
  app->add_option("--inner", s.inner, "inner solver")->check(CLI::IsMember({"auto", "closed", "fista"}));
  app->add_option("--step", s.step, "baseline step size");
  app->add_option("--penalty", s.penalty, "baseline penalty weight on ||Ax-b||^2");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inertial accelerated primal-dual solver toolkit"};
  app.require_subcommand(1);

  GenOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "write a generated problem (Matrix Market + JSON sidecar)");
  gen_cmd->add_option("--kind", gen.kind, "l1l2, nnls or scalar")->check(CLI::IsMember({"l1l2", "nnls", "scalar"}));
  gen_cmd->add_option("--m", gen.m, "rows");
  gen_cmd->add_option("--n", gen.n, "columns");
  gen_cmd->add_option("--mu", gen.mu, "l1l2: weight of (mu/2)||x||^2");
  gen_cmd->add_option("--sparsity", gen.sparsity, "l1l2: nonzero fraction of the planted signal");
  gen_cmd->add_option("--noise", gen.noise, "l1l2: noise norm");
  gen_cmd->add_option("--density", gen.density, "nnls: nonzero fraction of the matrix");
  gen_cmd->add_option("--seed", gen.seed, "generator seed");
  gen_cmd->add_flag("--plain", gen.plain, "nnls: drop the nonnegativity constraint");
  gen_cmd->add_flag("--saddle", gen.saddle, "l1l2: store a reference saddle point");
  gen_cmd->add_option("-o,--out", gen.out, "output stem");

  SolveOptions solve;
  CLI::App* solve_cmd = app.add_subcommand("solve", "run one solver on a problem file");
  solve_cmd->add_option("problem", solve.problem, "problem sidecar (.json)")->required();
  add_solver_flags(solve_cmd, solve.solver);
  solve_cmd->add_option("--iters", solve.iterations, "iteration budget");
  solve_cmd->add_option("-o,--out", solve.out, "trace CSV (default stdout)");
  solve_cmd->add_flag("--timing", solve.timing, "record wall-clock times in the trace");
  solve_cmd->add_flag("--certificates", solve.certificates, "check the convergence bounds (needs a saddle)");

  BenchOptions bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "run an experiment spec");
  bench_cmd->add_option("spec", bench.spec, "experiment JSON");
  bench_cmd->add_option("--preset", bench.preset, "example5.2, example5.3, desk or scalar");
  bench_cmd->add_flag("--full", bench.full, "paper dimensions instead of desk scale");
  bench_cmd->add_option("-o,--out", bench.out_dir, "output directory");
  bench_cmd->add_option("--seed", bench.seed, "override the seed");
  bench_cmd->add_option("--iters", bench.iterations, "override the iteration budget");
  bench_cmd->add_flag("--svg", bench.svg, "also write log-log SVG plots");

  SimulateOptions sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "integrate the smoothed continuous-time system");
  sim_cmd->add_option("config", sim.config, "simulation JSON")->required();
  sim_cmd->add_option("-o,--out", sim.out, "trajectory CSV (default stdout)");
  sim_cmd->add_option("--state-dump", sim.state_dump, "write the full state per record");

  RatesOptions rates;
  CLI::App* rates_cmd = app.add_subcommand("rates", "fit log-log slopes on a trace CSV");
  rates_cmd->add_option("trace", rates.trace, "trace CSV")->required();
  rates_cmd->add_option("--column", rates.columns, "columns to fit");
  rates_cmd->add_option("--x", rates.abscissa, "abscissa column (default k, else t)");
  rates_cmd->add_option("--lo", rates.lo, "window start");
  rates_cmd->add_option("--hi", rates.hi, "window end");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen);
    if (*solve_cmd) return cmd_solve(solve);
    if (*bench_cmd) return cmd_bench(bench);
    if (*sim_cmd) return cmd_simulate(sim);
    if (*rates_cmd) return cmd_rates(rates);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitConfig;
}
