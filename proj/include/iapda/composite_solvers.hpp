#ifndef IAPDA_COMPOSITE_SOLVERS_HPP
#define IAPDA_COMPOSITE_SOLVERS_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>

#include "iapda/linear_operator.hpp"
#include "iapda/problem.hpp"
#include "iapda/prox.hpp"
#include "iapda/rng.hpp"
#include "iapda/trace.hpp"

namespace iapda {

struct InnerSolverConfig {
  double subtol = 1e-8;
  long max_inner = 150;
  long opnorm_iters = 1000;
  double opnorm_tol = 1e-10;

  void validate() const {
    if (!(subtol > 0.0)) throw ConfigError("inner solver: subtol must be positive");
    if (max_inner < 1) throw ConfigError("inner solver: max_inner must be >= 1");
    if (opnorm_iters < 1) throw ConfigError("inner solver: opnorm_iters must be >= 1");
    if (!(opnorm_tol > 0.0)) throw ConfigError("inner solver: opnorm_tol must be positive");
  }
};

/// ||A||_2 by power iteration on A^T A from a seeded Gaussian start.
/// Stops once the relative change of the eigenvalue estimate is <= tol.
inline double estimate_opnorm(const LinearOperator& a, long max_iters, double tol, std::uint64_t seed = 0) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  SplitMix64 rng = SplitMix64::stream(seed, 0x6f706e6f726dULL);
  Vector v = rng.normal_vector(a.cols());
  v.normalize();
  double eig = 0.0;
  for (long it = 0; it < max_iters; ++it) {
    Vector w = a.apply_adjoint(a.apply(v));
    const double next = v.dot(w);
    const double norm_w = w.norm();
    if (norm_w == 0.0) return 0.0;
    v = w / norm_w;
    const double change = std::abs(next - eig);
    eig = next;
    if (it > 0 && change <= tol * std::abs(eig)) break;
  }
  return std::sqrt(std::max(eig, 0.0));
}

inline double estimate_opnorm(const LinearOperator& a, const InnerSolverConfig& config, std::uint64_t seed = 0) {
  return estimate_opnorm(a, config.opnorm_iters, config.opnorm_tol, seed);
}

/// Primal subproblem
///   min_x <grad_at_anchor, x> + g(x) + ||x - anchor||^2 / (2 beta) + (zeta/2) ||A x - target||^2.
struct QuadraticCompositeSubproblem {
  Vector anchor;
  Vector grad_at_anchor;
  double beta = 1.0;
  double zeta = 0.0;
  Vector target;
  const LinearOperator* op = nullptr;
  const ProxFunction* g = nullptr;

  bool has_constraint() const { return op != nullptr && op->rows() > 0 && zeta != 0.0; }

  double smooth_value(const Vector& x) const {
    double v = grad_at_anchor.dot(x) + (x - anchor).squaredNorm() / (2.0 * beta);
    if (has_constraint()) v += 0.5 * zeta * (op->apply(x) - target).squaredNorm();
    return v;
  }

  Vector smooth_grad(const Vector& x) const {
    Vector grad = grad_at_anchor + (x - anchor) / beta;
    if (has_constraint()) grad += zeta * op->apply_adjoint(op->apply(x) - target);
    return grad;
  }

  double value(const Vector& x) const { return smooth_value(x) + g->value(x); }

  /// 1/beta + zeta ||A||^2 (1 + opnorm_tol), the latter factor covering power-iteration underestimate.
  double lipschitz(double opnorm, double opnorm_tol) const {
    return 1.0 / beta + (has_constraint() ? zeta * opnorm * opnorm * (1.0 + opnorm_tol) : 0.0);
  }
};

struct InnerResult {
  Vector x;
  long iters = 0;
  bool converged = false;
};

/// FISTA on the subproblem with step 1/L_q and Nesterov momentum, no restarts.
/// Stops when ||z_k - z_{k-1}|| / max(||z_{k-1}||, 1) <= subtol or after max_inner steps.
inline InnerResult fista_solve(const QuadraticCompositeSubproblem& sub, const Vector& warm_start,
                               const InnerSolverConfig& config, double opnorm) {
  const double lq = sub.lipschitz(opnorm, config.opnorm_tol);
  const double step = 1.0 / lq;
  Vector z_prev = warm_start;
  Vector y = warm_start;
  double t = 1.0;
  InnerResult result;
  for (long it = 1; it <= config.max_inner; ++it) {
    Vector z = sub.g->prox(y - step * sub.smooth_grad(y), step);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double change = (z - z_prev).norm() / std::max(z_prev.norm(), 1.0);
    y = z + ((t - 1.0) / t_next) * (z - z_prev);
    z_prev = std::move(z);
    t = t_next;
    result.iters = it;
    if (change <= config.subtol) {
      result.converged = true;
      break;
    }
  }
  result.x = std::move(z_prev);
  if (!result.converged && sub.value(warm_start) < sub.value(result.x)) result.x = warm_start;
  return result;
}

/// Exact minimizer when g = 0: (I/beta + zeta A^T A) x = anchor/beta - grad + zeta A^T target.
inline Vector solve_quadratic_subproblem(const QuadraticCompositeSubproblem& sub) {
  Vector rhs = sub.anchor / sub.beta - sub.grad_at_anchor;
  if (!sub.has_constraint()) return sub.beta * rhs;
  rhs += sub.zeta * sub.op->apply_adjoint(sub.target);
  Matrix system = sub.zeta * sub.op->gram();
  system.diagonal().array() += 1.0 / sub.beta;
  Eigen::LLT<Matrix> llt(system);
  Vector x = llt.solve(rhs);
  // Iterative refinement keeps the relative residual near machine precision for large zeta.
  for (int pass = 0; pass < 2; ++pass) x += llt.solve(rhs - system * x);
  return x;
}

/// What a baseline run is measured against.
struct BaselineMonitor {
  std::optional<double> opt_value;
  const LinearOperator* op = nullptr;  // equality residual of an underlying constrained model
  const Vector* rhs = nullptr;
};

namespace detail {

inline TraceRow baseline_row(const CompositeProblem& problem, const BaselineMonitor& monitor, long k,
                             const Vector& x, const Vector& x_prev, double elapsed_ms) {
  TraceRow row;
  row.k = k;
  row.objective = problem.objective(x);
  if (monitor.opt_value) row.obj_residual = std::abs(row.objective - *monitor.opt_value);
  row.feas_violation = (monitor.op != nullptr) ? (monitor.op->apply(x) - *monitor.rhs).norm() : 0.0;
  row.x_step = (x - x_prev).norm();
  row.wall_ms = elapsed_ms;
  return row;
}

inline void require_unconstrained(const CompositeProblem& problem, double step) {
  if (problem.dim_dual() != 0) throw ConfigError("baseline solvers require a problem without equality constraints");
  if (!(step > 0.0)) throw ConfigError("baseline solvers: step must be positive");
}

}  // namespace detail

/// Standard FISTA on f + g with constant step. Row k holds x_k, row 1 the start point.
inline MetricsTrace fista_baseline(const CompositeProblem& problem, double step, long max_iter, const Vector& x0,
                                   const BaselineMonitor& monitor = {}) {
  detail::require_unconstrained(problem, step);
  require_size(x0, problem.dim_primal(), "fista_baseline start");
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double, std::milli>(Clock::now() - start).count(); };

  MetricsTrace trace;
  trace.header.solver = "fista";
  trace.header.lipschitz_f = problem.lipschitz_f();
  Vector x_prev = x0;
  Vector y = x0;
  double t = 1.0;
  trace.rows.push_back(detail::baseline_row(problem, monitor, 1, x0, x0, elapsed()));
  for (long k = 1; k <= max_iter; ++k) {
    Vector x = problem.g().prox(y - step * problem.f_grad(y), step);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = x + ((t - 1.0) / t_next) * (x - x_prev);
    t = t_next;
    TraceRow row = detail::baseline_row(problem, monitor, k + 1, x, x_prev, elapsed());
    row.t_k = t;
    x_prev = std::move(x);
    trace.rows.push_back(row);
    if (!std::isfinite(row.objective)) {
      trace.stop = StopReason::NonFinite;
      break;
    }
  }
  trace.x_final = x_prev;
  return trace;
}

/// Momentum coefficient (k-1)/(k+alpha-1) of the inertial forward-backward baseline.
inline double afbm_momentum(long k, double alpha) {
  return static_cast<double>(k - 1) / (static_cast<double>(k) + alpha - 1.0);
}

/// Inertial forward-backward: y_k = x_k + (k-1)/(k+alpha-1) (x_k - x_{k-1}), x_{k+1} = prox(y_k - s grad f(y_k)).
inline MetricsTrace afbm_baseline(const CompositeProblem& problem, double step, double alpha, long max_iter,
                                  const Vector& x0, const BaselineMonitor& monitor = {}) {
  detail::require_unconstrained(problem, step);
  if (!(alpha >= 3.0)) throw ConfigError("afbm_baseline: alpha must be >= 3");
  require_size(x0, problem.dim_primal(), "afbm_baseline start");
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double, std::milli>(Clock::now() - start).count(); };

  MetricsTrace trace;
  trace.header.solver = "afbm";
  trace.header.lipschitz_f = problem.lipschitz_f();
  Vector x_prev = x0;
  Vector x = x0;
  trace.rows.push_back(detail::baseline_row(problem, monitor, 1, x0, x0, elapsed()));
  for (long k = 1; k <= max_iter; ++k) {
    const double momentum = afbm_momentum(k, alpha);
    const Vector y = x + momentum * (x - x_prev);
    Vector x_next = problem.g().prox(y - step * problem.f_grad(y), step);
    TraceRow row = detail::baseline_row(problem, monitor, k + 1, x_next, x, elapsed());
    x_prev = std::move(x);
    x = std::move(x_next);
    trace.rows.push_back(row);
    if (!std::isfinite(row.objective)) {
      trace.stop = StopReason::NonFinite;
      break;
    }
  }
  trace.x_final = x;
  return trace;
}

}  // namespace iapda

#endif  // IAPDA_COMPOSITE_SOLVERS_HPP
