#ifndef IAPDA_BENCH_EXPERIMENT_HPP
#define IAPDA_BENCH_EXPERIMENT_HPP

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "iapda/bench/generators.hpp"
#include "iapda/bench/problem_io.hpp"
#include "iapda/bench/rate_fit.hpp"
#include "iapda/bench/reference_saddle.hpp"
#include "iapda/bench/svg.hpp"
#include "iapda/certificates.hpp"
#include "iapda/composite_solvers.hpp"
#include "iapda/saddle.hpp"
#include "iapda/solver.hpp"

namespace iapda::bench {

using nlohmann::json;

/// One solver entry of an experiment. Fields not used by a solver are ignored.
struct SolverSpec {
  std::string name = "iapda";  // iapda | fista | afbm
  std::string label;           // defaults to name
  // iapda
  double rho = 1.0;
  double sigma = 1.0;
  std::optional<double> beta0;  // default: min(1, 1/L_f)
  double beta_power = 0.0;
  std::string rule = "nesterov";  // nesterov | cd | ac
  double alpha = 3.0;
  double subtol = 1e-8;
  long max_inner = 150;
  std::string inner = "auto";  // auto | closed | fista
  // baselines
  std::optional<double> step;  // default: 1/L of the (penalized) objective
  double penalty = 1.0;        // weight of (1/2)||Ax-b||^2 when the problem has equality constraints
  std::string display() const { return label.empty() ? name : label; }
};

struct ExperimentSpec {
  std::string name = "experiment";
  std::string kind = "l1l2";  // l1l2 | nnls | scalar | custom
  Index m = 150;
  Index n = 200;
  double mu = 1.5;
  double sparsity = 0.05;
  double noise_norm = 1e-6;
  double density = 0.5;
  bool nonneg = true;
  std::uint64_t seed = 1;
  std::string problem_path;  // custom only
  long iterations = 100;
  std::vector<SolverSpec> solvers;
  std::string output_dir = ".";
  bool svg = false;
  bool timing = false;
  double fit_lo = 0.0;  // 0: automatic window
  double fit_hi = 0.0;
  bool certificates = true;
  bool reference = true;
  std::string reference_csv;  // rows to diff the first iapda trace against
  double reference_tol = 1e-12;

  void validate() const {
    if (kind != "l1l2" && kind != "nnls" && kind != "scalar" && kind != "custom")
      throw ConfigError("experiment: unknown kind '" + kind + "'");
    if (kind == "custom" && problem_path.empty()) throw ConfigError("experiment: custom kind needs \"problem\"");
    if ((kind == "l1l2" || kind == "nnls") && (m <= 0 || n <= 0)) throw ConfigError("experiment: dims must be positive");
    if (iterations < 0) throw ConfigError("experiment: iterations must be non-negative");
    if (solvers.empty()) throw ConfigError("experiment: no solvers listed");
    for (const SolverSpec& s : solvers) {
      if (s.name != "iapda" && s.name != "fista" && s.name != "afbm")
        throw ConfigError("experiment: unknown solver '" + s.name + "'");
      if (s.rule != "nesterov" && s.rule != "cd" && s.rule != "ac")
        throw ConfigError("experiment: unknown rule '" + s.rule + "'");
      if (s.inner != "auto" && s.inner != "closed" && s.inner != "fista")
        throw ConfigError("experiment: unknown inner mode '" + s.inner + "'");
    }
    if (fit_lo != 0.0 || fit_hi != 0.0) {
      if (!(fit_lo >= 1.0) || !(fit_hi > fit_lo)) throw ConfigError("experiment: need 1 <= fit_lo < fit_hi");
    }
  }
};

inline ExtrapolationRule make_rule(const std::string& rule, double alpha) {
  if (rule == "nesterov") return ExtrapolationRule::nesterov();
  if (rule == "cd") return ExtrapolationRule::chambolle_dossal(alpha);
  if (rule == "ac") return ExtrapolationRule::attouch_cabot(alpha);
  throw ConfigError("unknown extrapolation rule '" + rule + "'");
}

inline InnerMode make_inner_mode(const std::string& mode) {
  if (mode == "auto") return InnerMode::Auto;
  if (mode == "closed") return InnerMode::ClosedForm;
  if (mode == "fista") return InnerMode::Fista;
  throw ConfigError("unknown inner mode '" + mode + "'");
}

inline SolverSpec solver_from_json(const json& j) {
  SolverSpec s;
  s.name = j.value("name", s.name);
  s.label = j.value("label", s.label);
  s.rho = j.value("rho", s.rho);
  s.sigma = j.value("sigma", s.sigma);
  if (j.contains("beta0")) s.beta0 = j["beta0"].get<double>();
  s.beta_power = j.value("beta_power", s.beta_power);
  s.rule = j.value("rule", s.rule);
  s.alpha = j.value("alpha", s.alpha);
  s.subtol = j.value("subtol", s.subtol);
  s.max_inner = j.value("max_inner", s.max_inner);
  s.inner = j.value("inner", s.inner);
  if (j.contains("step")) s.step = j["step"].get<double>();
  s.penalty = j.value("penalty", s.penalty);
  return s;
}

/// Named parameter sets. `full` switches the paper examples from desk scale to the printed dimensions.
inline ExperimentSpec preset(const std::string& name, bool full = false) {
  ExperimentSpec e;
  e.name = name;
  if (name == "example5.2") {
    e.kind = "l1l2";
    e.m = full ? 1500 : 150;
    e.n = full ? 2000 : 200;
    e.iterations = 100;
    SolverSpec ia;
    ia.rho = 1e-4;
    ia.sigma = 10.0;
    ia.beta0 = 2.0;
    ia.rule = "cd";
    ia.alpha = 15.0;
    ia.subtol = 1e-8;
    SolverSpec fi;
    fi.name = "fista";
    e.solvers = {ia, fi};
    e.certificates = false;
  } else if (name == "example5.3") {
    e.kind = "nnls";
    e.m = full ? 500 : 150;
    e.n = full ? 1000 : 300;
    e.density = 0.5;
    e.iterations = 2000;
    SolverSpec ia;
    ia.rho = 0.1;
    ia.sigma = 1.0;
    SolverSpec fi;
    fi.name = "fista";
    SolverSpec af;
    af.name = "afbm";
    af.alpha = 5.0;
    e.solvers = {ia, fi, af};
    e.reference = false;
  } else if (name == "desk") {
    e.kind = "l1l2";
    e.iterations = 500;
    SolverSpec ia;
    ia.beta0 = 1.0 / 1.5;
    ia.max_inner = 150;
    ia.subtol = 1e-12;
    e.solvers = {ia};
    e.fit_lo = 50;
    e.fit_hi = 500;
  } else if (name == "scalar") {
    e.kind = "scalar";
    e.iterations = 50;
    SolverSpec ia;
    ia.rule = "cd";
    ia.alpha = 3.0;
    ia.beta0 = 1.0;
    ia.inner = "closed";
    e.solvers = {ia};
  } else {
    throw ConfigError("unknown preset '" + name + "' (example5.2, example5.3, desk, scalar)");
  }
  return e;
}

/// Parses an experiment file. A "preset" key seeds the defaults; other keys override them.
inline ExperimentSpec experiment_from_json(const json& j) {
  try {
    ExperimentSpec e = j.contains("preset") ? preset(j["preset"].get<std::string>(), j.value("full", false))
                                            : ExperimentSpec{};
    e.name = j.value("name", e.name);
    e.kind = j.value("kind", e.kind);
    e.m = j.value("m", e.m);
    e.n = j.value("n", e.n);
    e.mu = j.value("mu", e.mu);
    e.sparsity = j.value("sparsity", e.sparsity);
    e.noise_norm = j.value("noise_norm", e.noise_norm);
    e.density = j.value("density", e.density);
    e.nonneg = j.value("nonneg", e.nonneg);
    e.seed = j.value("seed", e.seed);
    e.problem_path = j.value("problem", e.problem_path);
    e.iterations = j.value("iterations", e.iterations);
    e.output_dir = j.value("output_dir", e.output_dir);
    e.svg = j.value("svg", e.svg);
    e.timing = j.value("timing", e.timing);
    e.certificates = j.value("certificates", e.certificates);
    e.reference = j.value("reference", e.reference);
    e.reference_csv = j.value("reference_csv", e.reference_csv);
    e.reference_tol = j.value("reference_tol", e.reference_tol);
    if (j.contains("fit_window")) {
      const json& w = j["fit_window"];
      if (!w.is_array() || w.size() != 2) throw ConfigError("experiment: fit_window must be [lo, hi]");
      e.fit_lo = w[0].get<double>();
      e.fit_hi = w[1].get<double>();
    }
    if (j.contains("solvers")) {
      e.solvers.clear();
      for (const json& s : j["solvers"]) e.solvers.push_back(solver_from_json(s));
    }
    e.validate();
    return e;
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("experiment: ") + ex.what());
  }
}

inline ExperimentSpec read_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw ConfigError(path + ": " + ex.what());
  }
  return experiment_from_json(j);
}

/// Problem, start point and optional reference saddle for one experiment.
struct ExperimentProblem {
  CompositeProblem problem;
  Vector x1;
  std::optional<SaddlePointCertificate> saddle;
  std::vector<std::string> warnings;
};

inline ExperimentProblem build_problem(const ExperimentSpec& spec) {
  if (spec.kind == "l1l2") {
    L1L2Instance inst = gen_l1l2(spec.m, spec.n, spec.mu, spec.sparsity, spec.noise_norm, spec.seed);
    ExperimentProblem ep{std::move(inst.problem), Vector::Zero(spec.n), std::nullopt, std::move(inst.warnings)};
    if (spec.reference) {
      ep.saddle = solve_l1l2_saddle(ep.problem);
      if (!ep.saddle) ep.warnings.push_back("reference saddle did not reach the KKT tolerance; gap columns are NaN");
    }
    return ep;
  }
  if (spec.kind == "nnls") {
    return {gen_nnls(spec.m, spec.n, spec.density, spec.seed, spec.nonneg), Vector::Zero(spec.n), std::nullopt, {}};
  }
  if (spec.kind == "scalar") {
    ExperimentProblem ep{scalar_instance(), Vector::Ones(1), std::nullopt, {}};
    if (spec.reference) ep.saddle = SaddlePointCertificate{Vector::Zero(1), Vector::Zero(1), 0.0};
    return ep;
  }
  ProblemFile pf = read_problem(spec.problem_path);
  const Index n = pf.problem.dim_primal();
  ExperimentProblem ep{std::move(pf.problem), Vector::Zero(n), std::move(pf.saddle), {}};
  if (!ep.saddle && spec.reference && ep.problem.g().is_zero() && ep.problem.f().kind() != SmoothKind::Custom)
    ep.saddle = solve_quadratic_saddle(ep.problem);
  if (!ep.saddle && spec.reference && ep.problem.g().kind() == ProxKind::L1 &&
      ep.problem.f().kind() == SmoothKind::ScaledSqNorm)
    ep.saddle = solve_l1l2_saddle(ep.problem);
  return ep;
}

/// f + (kappa/2)||Ax - b||^2 with the same g and no equality constraint.
inline CompositeProblem penalized(const CompositeProblem& p, double kappa, double opnorm) {
  if (p.dim_dual() == 0) return p;
  auto value = [p, kappa](const Vector& x) { return p.f_value(x) + 0.5 * kappa * p.residual(x).squaredNorm(); };
  auto grad = [p, kappa](const Vector& x) {
    return Vector(p.f_grad(x) + kappa * p.op().apply_adjoint(p.residual(x)));
  };
  const double lf = p.lipschitz_f() + kappa * opnorm * opnorm;
  return CompositeProblem::unconstrained(SmoothFunction::custom(value, grad, lf), p.g(), p.dim_primal());
}

struct SolverOutcome {
  std::string label;
  std::string solver;
  std::string status = "ok";  // ok | certificate_failure | aborted | reference_mismatch
  MetricsTrace trace;
  double feas_slope = kNaN;
  double gap_slope = kNaN;
  std::string certificate = "skipped";
  std::string message;
};

struct ExperimentResult {
  std::vector<SolverOutcome> outcomes;
  std::vector<std::string> warnings;
  std::vector<std::string> files;
  int exit_code = 0;
};

namespace detail {

inline std::string sanitize(std::string s) {
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  return s;
}

inline std::string csv_cell(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '"') c = ';';
  return s;
}

inline std::pair<double, double> fit_window(const ExperimentSpec& spec, const MetricsTrace& trace) {
  if (spec.fit_lo > 0.0) return {spec.fit_lo, spec.fit_hi};
  const double last = trace.rows.empty() ? 1.0 : static_cast<double>(trace.rows.back().k);
  return {std::max(2.0, std::floor(last / 10.0)), last};
}

inline double try_slope(const MetricsTrace& trace, double TraceRow::*column, std::pair<double, double> window,
                        std::string& message) {
  std::vector<double> ks, vs;
  for (const TraceRow& r : trace.rows) {
    ks.push_back(static_cast<double>(r.k));
    vs.push_back(r.*column);
  }
  if (!(window.second > window.first)) return kNaN;
  try {
    const RateFit fit = fit_rate_slope(ks, vs, window.first, window.second);
    for (const std::string& w : fit.warnings) message += (message.empty() ? "" : "; ") + w;
    return fit.slope;
  } catch (const std::invalid_argument&) {
    return kNaN;
  }
}

/// Compares the trace columns that the reference file shares with the trace.
inline std::string diff_against_reference(const MetricsTrace& trace, const std::string& path, double tol) {
  const CsvTable ref = read_csv(path);
  const std::vector<double>& ks = ref.column("k");
  std::ostringstream buf;
  write_trace_csv(buf, trace);
  std::istringstream in(buf.str());
  const CsvTable got = read_csv(in);
  if (got.rows() < ks.size()) return "trace has " + std::to_string(got.rows()) + " rows, reference " +
                                     std::to_string(ks.size());
  for (const std::string& name : ref.names) {
    if (name == "wall_ms" || !got.has(name)) continue;
    const std::vector<double>& want = ref.column(name);
    const std::vector<double>& have = got.column(name);
    for (std::size_t i = 0; i < want.size(); ++i) {
      if (std::isnan(want[i]) && std::isnan(have[i])) continue;
      if (!(std::abs(have[i] - want[i]) <= tol * std::max(1.0, std::abs(want[i]))))
        return name + " differs at row " + std::to_string(i + 1) + ": " + format_double(have[i]) + " vs " +
               format_double(want[i]);
    }
  }
  return {};
}

}  // namespace detail

inline SolverOutcome run_solver(const SolverSpec& s, const ExperimentProblem& ep, const ExperimentSpec& spec) {
  SolverOutcome out;
  out.label = s.display();
  out.solver = s.name;
  const CompositeProblem& p = ep.problem;
  try {
    if (s.name == "iapda") {
      IapdaParams prm;
      prm.rho = s.rho;
      prm.sigma = s.sigma;
      prm.rule = make_rule(s.rule, s.alpha);
      const double beta0 = s.beta0.value_or(std::min(1.0, 1.0 / std::max(p.lipschitz_f(), 1e-300)));
      prm.scaling = s.beta_power > 0.0 ? ScalingPolicy::power_growth(beta0, s.beta_power)
                                       : ScalingPolicy::constant(beta0);
      prm.inner.subtol = s.subtol;
      prm.inner.max_inner = s.max_inner;
      prm.inner_mode = make_inner_mode(s.inner);
      prm.max_iter = spec.iterations;
      IapdaSolver solver(p, prm);
      out.trace = solver.run(ep.x1, Vector::Zero(p.dim_dual()), ep.saddle);
    } else {
      const double opnorm = p.dim_dual() > 0 ? estimate_opnorm(p.op(), 5000, 1e-12, spec.seed) : 0.0;
      const CompositeProblem base = penalized(p, s.penalty, opnorm);
      const double step = s.step.value_or(1.0 / std::max(base.lipschitz_f(), 1e-300));
      BaselineMonitor monitor;
      if (p.dim_dual() > 0) {
        monitor.op = &p.op();
        monitor.rhs = &p.rhs();
      } else if (ep.saddle) {
        monitor.opt_value = ep.saddle->opt_value;
      }
      out.trace = s.name == "fista" ? fista_baseline(base, step, spec.iterations, ep.x1, monitor)
                                    : afbm_baseline(base, step, s.alpha, spec.iterations, ep.x1, monitor);
    }
  } catch (const ScheduleError& e) {
    out.status = "aborted";
    out.message = e.what();
    return out;
  }
  if (out.trace.stop == StopReason::NonFinite) {
    out.status = "aborted";
    out.message = "non-finite iterate";
  }

  const auto window = detail::fit_window(spec, out.trace);
  if (p.dim_dual() > 0) out.feas_slope = detail::try_slope(out.trace, &TraceRow::feas_violation, window, out.message);
  if (ep.saddle && s.name == "iapda")
    out.gap_slope = detail::try_slope(out.trace, &TraceRow::pd_gap, window, out.message);

  if (spec.certificates && ep.saddle && s.name == "iapda" && out.status == "ok") {
    const CertificateReport rep = bound_certificates(out.trace);
    out.certificate = rep.pass ? "pass" : "fail";
    if (!rep.pass) {
      out.status = "certificate_failure";
      out.message += (out.message.empty() ? "" : "; ") + rep.summary();
    }
  }
  return out;
}

inline void write_summary_csv(const std::string& path, const std::vector<SolverOutcome>& outcomes) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "solver,label,status,stop,iterations,final_feas_violation,final_pd_gap,final_obj_residual,feas_slope,"
         "gap_slope,certificates,message\n";
  for (const SolverOutcome& o : outcomes) {
    const bool rows = !o.trace.rows.empty();
    const TraceRow last = rows ? o.trace.rows.back() : TraceRow{};
    out << o.solver << ',' << detail::csv_cell(o.label) << ',' << o.status << ',' << to_string(o.trace.stop) << ','
        << (rows ? last.k : 0) << ',' << format_double(rows ? last.feas_violation : kNaN) << ','
        << format_double(rows ? last.pd_gap : kNaN) << ',' << format_double(rows ? last.obj_residual : kNaN) << ','
        << format_double(o.feas_slope) << ',' << format_double(o.gap_slope) << ',' << o.certificate << ','
        << detail::csv_cell(o.message) << '\n';
  }
}

/// Runs every solver on the generated problem and writes the artifact bundle.
/// Exit code 0 iff no solver aborted and every enabled check passed.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult res;
  ExperimentProblem ep = build_problem(spec);
  res.warnings = ep.warnings;
  const std::filesystem::path dir(spec.output_dir);
  std::filesystem::create_directories(dir);
  const std::string stem = detail::sanitize(spec.name);

  bool reference_checked = false;
  for (const SolverSpec& s : spec.solvers) {
    SolverOutcome o = run_solver(s, ep, spec);
    if (!spec.reference_csv.empty() && !reference_checked && s.name == "iapda") {
      reference_checked = true;
      const std::string diff = detail::diff_against_reference(o.trace, spec.reference_csv, spec.reference_tol);
      if (!diff.empty()) {
        o.status = "reference_mismatch";
        o.message += (o.message.empty() ? "" : "; ") + diff;
      }
    }
    const std::string trace_path = (dir / (stem + "." + detail::sanitize(o.label) + ".trace.csv")).string();
    write_trace_csv(trace_path, o.trace, spec.timing);
    res.files.push_back(trace_path);
    if (o.status != "ok") res.exit_code = 1;
    res.outcomes.push_back(std::move(o));
  }
  const std::string summary_path = (dir / (stem + ".summary.csv")).string();
  write_summary_csv(summary_path, res.outcomes);
  res.files.push_back(summary_path);

  if (spec.svg) {
    auto plot = [&](const char* metric, double TraceRow::*column) {
      std::vector<SvgSeries> series;
      for (const SolverOutcome& o : res.outcomes) {
        SvgSeries s{o.label, {}, {}};
        for (const TraceRow& r : o.trace.rows) {
          s.x.push_back(static_cast<double>(r.k));
          s.y.push_back(r.*column);
        }
        series.push_back(std::move(s));
      }
      const std::string path = (dir / (stem + "." + metric + ".svg")).string();
      write_loglog_svg(path, spec.name + ": " + metric, series);
      res.files.push_back(path);
    };
    if (ep.problem.dim_dual() > 0) plot("feas_violation", &TraceRow::feas_violation);
    if (ep.saddle) plot("pd_gap", &TraceRow::pd_gap);
    plot("obj_residual", &TraceRow::obj_residual);
  }
  return res;
}

}  // namespace iapda::bench

#endif  // IAPDA_BENCH_EXPERIMENT_HPP
