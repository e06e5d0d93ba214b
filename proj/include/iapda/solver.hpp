#ifndef IAPDA_SOLVER_HPP
#define IAPDA_SOLVER_HPP

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "iapda/composite_solvers.hpp"
#include "iapda/problem.hpp"
#include "iapda/schedules.hpp"
#include "iapda/trace.hpp"

namespace iapda {

/// Raised when (t_k, beta_k) stop satisfying the admissibility conditions mid-run.
class ScheduleError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

enum class InnerMode {
  Auto,        // closed form when g = 0, FISTA otherwise
  ClosedForm,  // requires g = 0
  Fista,
};

struct IapdaParams {
  double rho = 1.0;
  double sigma = 1.0;
  ExtrapolationRule rule = ExtrapolationRule::nesterov();
  ScalingPolicy scaling = ScalingPolicy::constant(1.0);
  InnerSolverConfig inner;
  InnerMode inner_mode = InnerMode::Auto;
  long max_iter = 100;
  double stop_tol = 0.0;  // 0 disables the KKT stopping test
  bool require_step_hypothesis = false;  // enforce L_f * beta_k <= 1 at every k
  bool retain_lambda_history = false;

  void validate() const {
    if (!(rho > 0.0)) throw ConfigError("IAPDA: rho must be positive");
    if (!(sigma > 0.0)) throw ConfigError("IAPDA: sigma must be positive");
    if (max_iter < 0) throw ConfigError("IAPDA: max_iter must be non-negative");
    if (stop_tol < 0.0) throw ConfigError("IAPDA: stop_tol must be non-negative");
    scaling.validate();
    inner.validate();
  }
};

/// Two-step history at iteration k plus the schedule values in force.
struct IapdaState {
  long k = 1;
  Vector x_prev, x_cur;      // x_{k-1}, x_k
  Vector lam_prev, lam_cur;  // lambda_{k-1}, lambda_k
  double t_cur = 1.0;        // t_k
  double t_next = 1.0;       // t_{k+1}
  double beta_prev = 1.0;    // beta_{k-1}
  double beta_cur = 1.0;     // beta_k
  Vector ax_cur;             // A x_k
  Vector u_cur;              // u_k
  Vector v_cur;              // v_k
};

/// Step-1 quantities of one iteration.
struct IterationScratch {
  Vector x_bar;     // extrapolated primal point
  double s_next = 0.0;
  double zeta_next = 0.0;
  Vector phi_next;
  Vector mu;        // extrapolated multiplier
  Vector xi_next;
  Vector target_c;  // (s phi + rho b - xi) / zeta
};

struct DualUpdate {
  Vector u_next;
  Vector lam_next;
  Vector v_next;
  Vector ax_next;
};

struct EnergyBreakdown {
  double e0 = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double total = 0.0;
};

/// State at k = 1 with x_0 = x_1, lambda_0 = lambda_1 and the boundary
/// conventions u_1 = x_1 + (t_1 - 1)(x_1 - x_0), v_1 = t_1 lambda_1 - (t_1 - 1) lambda_0.
inline IapdaState initial_state(const CompositeProblem& problem, const ScheduleState& schedule, const Vector& x1,
                                const Vector& lam1) {
  problem.check_dims(x1, lam1);
  IapdaState s;
  s.k = 1;
  s.x_prev = x1;
  s.x_cur = x1;
  s.lam_prev = lam1;
  s.lam_cur = lam1;
  s.t_cur = schedule.t_cur();
  s.t_next = schedule.t_next();
  s.beta_prev = schedule.beta_prev();
  s.beta_cur = schedule.beta_cur();
  s.ax_cur = problem.op().apply(x1);
  s.u_cur = x1 + (s.t_cur - 1.0) * (s.x_cur - s.x_prev);
  s.v_cur = s.t_cur * s.lam_cur - (s.t_cur - 1.0) * s.lam_prev;
  return s;
}

inline IterationScratch assemble_iteration(const IapdaState& state, const IapdaParams& params,
                                           const CompositeProblem& problem) {
  const double t = state.t_cur;
  const double tn = state.t_next;
  const double inertia = (t - 1.0) / tn;
  IterationScratch sc;
  sc.x_bar = state.x_cur + inertia * (state.x_cur - state.x_prev);
  sc.s_next = params.sigma * state.beta_cur * tn * tn;
  sc.zeta_next = sc.s_next + params.rho;
  sc.phi_next = ((tn - 1.0) * state.ax_cur + problem.rhs()) / tn;
  sc.mu = state.lam_cur + inertia * (state.lam_cur - state.lam_prev);
  sc.xi_next = tn * sc.mu - (tn - 1.0) * state.lam_cur;
  sc.target_c = (sc.s_next * sc.phi_next + params.rho * problem.rhs() - sc.xi_next) / sc.zeta_next;
  return sc;
}

inline QuadraticCompositeSubproblem primal_subproblem(const IterationScratch& scratch, const IapdaState& state,
                                                      const CompositeProblem& problem) {
  QuadraticCompositeSubproblem sub;
  sub.anchor = scratch.x_bar;
  sub.grad_at_anchor = problem.f_grad(scratch.x_bar);
  sub.beta = state.beta_cur;
  sub.zeta = scratch.zeta_next;
  sub.target = scratch.target_c;
  sub.op = &problem.op();
  sub.g = &problem.g();
  return sub;
}

/// x_{k+1}: exact for g = 0, warm-started FISTA otherwise.
inline InnerResult solve_primal_subproblem(const IterationScratch& scratch, const IapdaState& state,
                                           const IapdaParams& params, const CompositeProblem& problem,
                                           double opnorm) {
  const QuadraticCompositeSubproblem sub = primal_subproblem(scratch, state, problem);
  const bool closed = params.inner_mode == InnerMode::ClosedForm ||
                      (params.inner_mode == InnerMode::Auto && problem.g().is_zero());
  if (closed) {
    if (!problem.g().is_zero()) throw ConfigError("closed-form inner solve requires g = 0");
    return {solve_quadratic_subproblem(sub), 0, true};
  }
  return fista_solve(sub, state.x_cur, params.inner, opnorm);
}

inline DualUpdate dual_update(const IterationScratch& scratch, const Vector& x_next, const IapdaState& state,
                              const IapdaParams& params, const CompositeProblem& problem) {
  const double tn = state.t_next;
  DualUpdate d;
  const Vector dx = x_next - state.x_cur;
  d.u_next = x_next + (tn - 1.0) * dx;
  d.ax_next = problem.op().apply(x_next);
  // Difference form: A u - b = t A dx + r_k and A x_{k+1} - phi = A dx + r_k / t.
  const Vector a_dx = problem.op().apply(dx);
  const Vector r_k = state.ax_cur - problem.rhs();
  d.lam_next = scratch.mu + params.sigma * state.beta_cur * (tn * a_dx + r_k);
  d.v_next = scratch.xi_next + scratch.s_next * (a_dx + r_k / tn);
  return d;
}

/// E(k) = E_0 + E_1 + E_2 evaluated from x_k, u_k, v_k, t_{k+1} and beta_k.
inline EnergyBreakdown energy(const CompositeProblem& problem, double rho, double sigma,
                              const SaddlePointCertificate& saddle, const Vector& x, const Vector& u, const Vector& v,
                              double t_next, double beta) {
  const double gap = eval_aug_lagrangian(problem, rho, x, saddle.lambda_star) -
                     eval_aug_lagrangian(problem, rho, saddle.x_star, saddle.lambda_star);
  EnergyBreakdown e;
  e.e0 = t_next * (t_next - 1.0) * beta * gap;
  e.e1 = 0.5 * (u - saddle.x_star).squaredNorm();
  e.e2 = (v - saddle.lambda_star).squaredNorm() / (2.0 * sigma);
  e.total = e.e0 + e.e1 + e.e2;
  return e;
}

inline EnergyBreakdown energy(const IapdaState& state, const SaddlePointCertificate& saddle, const IapdaParams& params,
                              const CompositeProblem& problem) {
  return energy(problem, params.rho, params.sigma, saddle, state.x_cur, state.u_cur, state.v_cur, state.t_next,
                state.beta_cur);
}

/// Algorithm driver. One instance owns its state; the problem is shared read-only.
class IapdaSolver {
 public:
  using Callback = std::function<void(const IapdaState&, const TraceRow&)>;

  IapdaSolver(CompositeProblem problem, IapdaParams params)
      : problem_(std::move(problem)), params_(std::move(params)) {
    params_.validate();
  }

  const CompositeProblem& problem() const { return problem_; }
  const IapdaParams& params() const { return params_; }

  /// Reuse a previously computed ||A|| instead of running power iteration.
  void set_opnorm(double opnorm) { opnorm_ = opnorm; }

  double opnorm() {
    if (!opnorm_) opnorm_ = estimate_opnorm(problem_.op(), params_.inner);
    return *opnorm_;
  }

  MetricsTrace run(const Vector& x1, const Vector& lam1,
                   const std::optional<SaddlePointCertificate>& saddle = std::nullopt,
                   const Callback& callback = {}) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    auto elapsed = [&] { return std::chrono::duration<double, std::milli>(Clock::now() - start).count(); };

    ScheduleState schedule(params_.rule, params_.scaling);
    IapdaState state = initial_state(problem_, schedule, x1, lam1);
    const bool need_opnorm = !(params_.inner_mode == InnerMode::ClosedForm ||
                               (params_.inner_mode == InnerMode::Auto && problem_.g().is_zero()));
    const double norm_a = need_opnorm ? opnorm() : 0.0;

    MetricsTrace trace;
    TraceHeader& h = trace.header;
    h.solver = "iapda";
    h.rho = params_.rho;
    h.sigma = params_.sigma;
    h.beta0 = params_.scaling.beta0;
    h.t1 = state.t_cur;
    h.lambda0_norm = state.lam_prev.norm();
    h.lambda1_minus_lambda0_norm = (state.lam_cur - state.lam_prev).norm();
    h.feas_x1 = problem_.feasibility(x1);
    h.lipschitz_f = problem_.lipschitz_f();
    h.has_saddle = saddle.has_value();
    if (saddle) h.lambda_star_norm = saddle->lambda_star.norm();

    double opt_lagrangian = kNaN;
    if (saddle) opt_lagrangian = eval_aug_lagrangian(problem_, params_.rho, saddle->x_star, saddle->lambda_star);

    TraceRow row = make_row(state, saddle, opt_lagrangian);
    row.wall_ms = elapsed();
    trace.rows.push_back(row);
    if (params_.retain_lambda_history) {
      trace.lambda_history.push_back(state.lam_prev);
      trace.lambda_history.push_back(state.lam_cur);
    }
    if (callback) callback(state, row);

    trace.stop = converged(row) ? StopReason::Converged : StopReason::MaxIter;
    for (long iter = 0; iter < params_.max_iter && trace.stop != StopReason::Converged; ++iter) {
      check_admissible(schedule);

      const IterationScratch scratch = assemble_iteration(state, params_, problem_);
      InnerResult inner = solve_primal_subproblem(scratch, state, params_, problem_, norm_a);
      if (!inner.x.allFinite()) {
        trace.stop = StopReason::NonFinite;
        trace.warnings.push_back("non-finite primal iterate at k=" + std::to_string(state.k + 1));
        break;
      }
      if (!inner.converged) {
        trace.warnings.push_back("inner solver hit max_inner at k=" + std::to_string(state.k));
      }
      DualUpdate dual = dual_update(scratch, inner.x, state, params_, problem_);

      const Vector v_from_identity = state.t_next * dual.lam_next - (state.t_next - 1.0) * state.lam_cur;
      const double v_err = (dual.v_next - v_from_identity).norm() / std::max(1.0, dual.v_next.norm());
      const double u_step = (dual.u_next - state.u_cur).norm();
      const double v_step = (dual.v_next - state.v_cur).norm();

      state.x_prev = std::move(state.x_cur);
      state.x_cur = std::move(inner.x);
      state.lam_prev = std::move(state.lam_cur);
      state.lam_cur = std::move(dual.lam_next);
      state.ax_cur = std::move(dual.ax_next);
      state.u_cur = std::move(dual.u_next);
      state.v_cur = std::move(dual.v_next);
      schedule.advance();
      state.k = schedule.k();
      state.t_cur = schedule.t_cur();
      state.t_next = schedule.t_next();
      state.beta_prev = schedule.beta_prev();
      state.beta_cur = schedule.beta_cur();

      row = make_row(state, saddle, opt_lagrangian);
      row.inner_iters = inner.iters;
      row.inner_converged = inner.converged;
      row.v_identity_error = v_err;
      row.u_step = u_step;
      row.v_step = v_step;
      row.wall_ms = elapsed();
      trace.rows.push_back(row);
      if (params_.retain_lambda_history) trace.lambda_history.push_back(state.lam_cur);
      if (callback) callback(state, row);
      if (converged(row)) trace.stop = StopReason::Converged;
    }
    trace.x_final = state.x_cur;
    trace.lambda_final = state.lam_cur;
    return trace;
  }

 private:
  bool converged(const TraceRow& row) const {
    return params_.stop_tol > 0.0 && std::max(row.stationarity, row.feas_violation) <= params_.stop_tol;
  }

  void check_admissible(const ScheduleState& schedule) const {
    if (!schedule.admissible()) {
      throw ScheduleError("schedule inadmissible at k=" + std::to_string(schedule.k()) +
                          ": t_k=" + format_double(schedule.t_cur()) + " t_{k+1}=" + format_double(schedule.t_next()) +
                          " beta_{k-1}=" + format_double(schedule.beta_prev()) +
                          " beta_k=" + format_double(schedule.beta_cur()));
    }
    if (params_.require_step_hypothesis && problem_.lipschitz_f() * schedule.beta_cur() > 1.0 + 1e-12) {
      throw ScheduleError("L_f * beta_k > 1 at k=" + std::to_string(schedule.k()));
    }
  }

  TraceRow make_row(const IapdaState& state, const std::optional<SaddlePointCertificate>& saddle,
                    double opt_lagrangian) const {
    TraceRow row;
    row.k = state.k;
    row.t_k = state.t_cur;
    row.t_next = state.t_next;
    row.beta_prev = state.beta_prev;
    row.beta_k = state.beta_cur;
    row.objective = problem_.objective(state.x_cur);
    row.feas_violation = problem_.dim_dual() == 0 ? 0.0 : (state.ax_cur - problem_.rhs()).norm();
    row.stationarity = kkt_residual(problem_, state.x_cur, state.lam_cur).stationarity;
    row.x_step = (state.x_cur - state.x_prev).norm();
    row.lambda_step = (state.lam_cur - state.lam_prev).norm();
    row.lambda_norm = state.lam_cur.norm();
    if (saddle) {
      row.obj_residual = std::abs(row.objective - saddle->opt_value);
      row.pd_gap = eval_aug_lagrangian(problem_, params_.rho, state.x_cur, saddle->lambda_star) - opt_lagrangian;
      const EnergyBreakdown e = energy(state, *saddle, params_, problem_);
      row.energy_e0 = e.e0;
      row.energy_e1 = e.e1;
      row.energy_e2 = e.e2;
      row.energy_total = e.total;
    }
    return row;
  }

  CompositeProblem problem_;
  IapdaParams params_;
  std::optional<double> opnorm_;
};

}  // namespace iapda

#endif  // IAPDA_SOLVER_HPP
