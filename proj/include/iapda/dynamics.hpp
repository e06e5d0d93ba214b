#ifndef IAPDA_DYNAMICS_HPP
#define IAPDA_DYNAMICS_HPP

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "iapda/problem.hpp"
#include "iapda/prox.hpp"
#include "iapda/trace.hpp"

namespace iapda {

/// Parameters of the damped, time-scaled primal-dual system with beta(t) = c t^p.
struct OdeConfig {
  double alpha = 3.0;
  double rho = 1.0;
  double beta_c = 1.0;
  double beta_p = 0.0;
  MoreauParams gamma{1e-3};
  double t0 = 1.0;
  double t_end = 50.0;
  double step_h = 1e-3;
  long output_stride = 1;

  double beta(double t) const { return beta_c * std::pow(t, beta_p); }
  double beta_dot(double t) const { return beta_p == 0.0 ? 0.0 : beta_c * beta_p * std::pow(t, beta_p - 1.0); }

  void validate() const {
    if (!(alpha >= 3.0)) throw ConfigError("ode: alpha must be >= 3");
    if (rho < 0.0) throw ConfigError("ode: rho must be non-negative");
    if (!(beta_c > 0.0)) throw ConfigError("ode: beta coefficient must be positive");
    if (!(beta_p >= 0.0)) throw ConfigError("ode: beta exponent must be non-negative");
    // t beta'(t) / beta(t) = p must not exceed alpha - 3.
    if (beta_p > alpha - 3.0 + 1e-12) throw ConfigError("ode: beta exponent must satisfy p <= alpha - 3");
    if (!(t0 > 0.0)) throw ConfigError("ode: t0 must be positive");
    if (!(t_end > t0)) throw ConfigError("ode: t_end must exceed t0");
    if (!(step_h > 0.0) || step_h > t_end - t0) throw ConfigError("ode: step must lie in (0, t_end - t0]");
    if (output_stride < 1) throw ConfigError("ode: output stride must be >= 1");
  }
};

struct OdeState {
  Vector x, xdot, lam, lamdot;
};

struct OdeAccel {
  Vector xddot, lamddot;
};

/// Gradient of the smoothed g; zero when g = 0.
inline Vector smoothed_g_grad(const ProxFunction& g, const MoreauParams& gamma, const Vector& x) {
  if (g.is_zero()) return Vector::Zero(x.size());
  return moreau_grad(g, gamma, x);
}

inline double smoothed_g_value(const ProxFunction& g, const MoreauParams& gamma, const Vector& x) {
  if (g.is_zero()) return 0.0;
  return moreau_value(g, gamma, x);
}

/// Right-hand side of the smoothed second-order system:
///   x''   = -(alpha/t) x'   - beta(t) [grad f(x) + grad g_gamma(x) + A^*(lam + t/(alpha-1) lam') + rho A^*(Ax - b)]
///   lam'' = -(alpha/t) lam' + beta(t) [A(x + t/(alpha-1) x') - b]
inline OdeAccel ode_rhs(double t, const OdeState& s, const OdeConfig& config, const CompositeProblem& problem) {
  const double damping = config.alpha / t;
  const double beta = config.beta(t);
  const double ext = t / (config.alpha - 1.0);
  Vector force = problem.f_grad(s.x) + smoothed_g_grad(problem.g(), config.gamma, s.x);
  Vector lam_force = -damping * s.lamdot;
  if (problem.dim_dual() > 0) {
    const LinearOperator& a = problem.op();
    force += a.apply_adjoint(s.lam + ext * s.lamdot);
    if (config.rho != 0.0) force += config.rho * a.apply_adjoint(problem.residual(s.x));
    lam_force += beta * (a.apply(s.x + ext * s.xdot) - problem.rhs());
  }
  return {-damping * s.xdot - beta * force, std::move(lam_force)};
}

/// Smoothed augmented Lagrangian f + g_gamma + <lambda, Ax-b> + (rho/2)||Ax-b||^2.
inline double smoothed_aug_lagrangian(const CompositeProblem& problem, const OdeConfig& config, const Vector& x,
                                      const Vector& lambda) {
  double v = problem.f_value(x) + smoothed_g_value(problem.g(), config.gamma, x);
  if (problem.dim_dual() > 0) {
    const Vector r = problem.residual(x);
    v += lambda.dot(r) + 0.5 * config.rho * r.squaredNorm();
  }
  return v;
}

struct TrajectoryRecord {
  double t = 0.0;
  OdeState state;
  double energy = kNaN;
  double gap = kNaN;             // smoothed L_rho(x, lambda*) - L_rho(x*, lambda*)
  double gap_unsmoothed = kNaN;  // same with the original g
  double obj_residual = kNaN;    // |(f+g)(x) - (f+g)(x*)|
  double feas = 0.0;
};

/// Continuous energy with the smoothed g inside L_rho.
inline double continuous_energy(double t, const OdeState& s, const OdeConfig& config, const CompositeProblem& problem,
                                const SaddlePointCertificate& saddle) {
  const double ext = t / (config.alpha - 1.0);
  const double scale = t * t * config.beta(t) / ((config.alpha - 1.0) * (config.alpha - 1.0));
  const double gap = smoothed_aug_lagrangian(problem, config, s.x, saddle.lambda_star) -
                     smoothed_aug_lagrangian(problem, config, saddle.x_star, saddle.lambda_star);
  double e = scale * gap + 0.5 * (s.x - saddle.x_star + ext * s.xdot).squaredNorm();
  if (problem.dim_dual() > 0) e += 0.5 * (s.lam - saddle.lambda_star + ext * s.lamdot).squaredNorm();
  return e;
}

inline double continuous_energy(const TrajectoryRecord& rec, const OdeConfig& config, const CompositeProblem& problem,
                                const SaddlePointCertificate& saddle) {
  return continuous_energy(rec.t, rec.state, config, problem, saddle);
}

/// One classical fourth-order Runge-Kutta step for y' = rhs(t, y).
template <class Rhs>
Vector rk4_step(Rhs&& rhs, double t, const Vector& y, double h) {
  const Vector k1 = rhs(t, y);
  const Vector k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
  const Vector k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
  const Vector k4 = rhs(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  bool aborted = false;
  std::string message;
};

/// Fixed-step RK4 on the first-order form (x, x', lam, lam').
inline Trajectory integrate(const OdeConfig& config, const CompositeProblem& problem, const OdeState& initial,
                            const std::optional<SaddlePointCertificate>& saddle = std::nullopt) {
  config.validate();
  const Index n = problem.dim_primal();
  const Index m = problem.dim_dual();
  require_size(initial.x, n, "ode initial x");
  require_size(initial.xdot, n, "ode initial x'");
  require_size(initial.lam, m, "ode initial lambda");
  require_size(initial.lamdot, m, "ode initial lambda'");

  auto pack = [&](const OdeState& s) {
    Vector y(2 * n + 2 * m);
    y << s.x, s.xdot, s.lam, s.lamdot;
    return y;
  };
  auto unpack = [&](const Vector& y) {
    return OdeState{y.segment(0, n), y.segment(n, n), y.segment(2 * n, m), y.segment(2 * n + m, m)};
  };
  auto rhs = [&](double t, const Vector& y) {
    const OdeState s = unpack(y);
    const OdeAccel acc = ode_rhs(t, s, config, problem);
    Vector dy(y.size());
    dy << s.xdot, acc.xddot, s.lamdot, acc.lamddot;
    return dy;
  };

  double opt_smoothed = kNaN;
  if (saddle) opt_smoothed = smoothed_aug_lagrangian(problem, config, saddle->x_star, saddle->lambda_star);
  const double opt_plain =
      saddle ? eval_aug_lagrangian(problem, config.rho, saddle->x_star, saddle->lambda_star) : kNaN;

  auto record = [&](double t, const Vector& y) {
    TrajectoryRecord rec;
    rec.t = t;
    rec.state = unpack(y);
    rec.feas = problem.feasibility(rec.state.x);
    if (saddle) {
      rec.energy = continuous_energy(t, rec.state, config, problem, *saddle);
      rec.gap = smoothed_aug_lagrangian(problem, config, rec.state.x, saddle->lambda_star) - opt_smoothed;
      rec.gap_unsmoothed = eval_aug_lagrangian(problem, config.rho, rec.state.x, saddle->lambda_star) - opt_plain;
      rec.obj_residual = std::abs(problem.objective(rec.state.x) - saddle->opt_value);
    }
    return rec;
  };

  Trajectory traj;
  const long steps = std::lround((config.t_end - config.t0) / config.step_h);
  Vector y = pack(initial);
  traj.records.push_back(record(config.t0, y));
  for (long i = 1; i <= steps; ++i) {
    const double t = config.t0 + static_cast<double>(i - 1) * config.step_h;
    Vector next = rk4_step(rhs, t, y, config.step_h);
    if (!next.allFinite()) {
      traj.aborted = true;
      traj.message = "non-finite state at t=" + format_double(t + config.step_h);
      if (traj.records.back().t != t) traj.records.push_back(record(t, y));
      return traj;
    }
    y = std::move(next);
    if (i % config.output_stride == 0 || i == steps) {
      traj.records.push_back(record(config.t0 + static_cast<double>(i) * config.step_h, y));
    }
  }
  return traj;
}

/// Trajectory CSV: t, gap, feas, energy, then the unsmoothed gap and objective residual.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,gap,feas,energy,gap_unsmoothed,obj_residual\n";
  for (const TrajectoryRecord& r : traj.records) {
    out << format_double(r.t) << ',' << format_double(r.gap) << ',' << format_double(r.feas) << ','
        << format_double(r.energy) << ',' << format_double(r.gap_unsmoothed) << ',' << format_double(r.obj_residual)
        << '\n';
  }
}

/// State dump: t followed by x, x', lambda, lambda' componentwise.
inline void write_state_csv(std::ostream& out, const Trajectory& traj) {
  if (traj.records.empty()) return;
  const OdeState& s0 = traj.records.front().state;
  out << 't';
  for (Index i = 0; i < s0.x.size(); ++i) out << ",x" << i;
  for (Index i = 0; i < s0.xdot.size(); ++i) out << ",xdot" << i;
  for (Index i = 0; i < s0.lam.size(); ++i) out << ",lam" << i;
  for (Index i = 0; i < s0.lamdot.size(); ++i) out << ",lamdot" << i;
  out << '\n';
  for (const TrajectoryRecord& r : traj.records) {
    out << format_double(r.t);
    for (const Vector* v : {&r.state.x, &r.state.xdot, &r.state.lam, &r.state.lamdot})
      for (Index i = 0; i < v->size(); ++i) out << ',' << format_double((*v)[i]);
    out << '\n';
  }
}

}  // namespace iapda

#endif  // IAPDA_DYNAMICS_HPP
