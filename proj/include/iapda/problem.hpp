#ifndef IAPDA_PROBLEM_HPP
#define IAPDA_PROBLEM_HPP

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "iapda/linear_operator.hpp"
#include "iapda/prox.hpp"

namespace iapda {

enum class SmoothKind { Zero, ScaledSqNorm, LeastSquares, Quadratic, Custom };

/// Differentiable term f with an L_f-Lipschitz gradient.
///
/// The concrete kinds keep their data so problems can be written back to disk;
/// `custom` wraps arbitrary oracles and is not serializable.
class SmoothFunction {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;

  SmoothFunction() = default;

  static SmoothFunction zero() {
    SmoothFunction s;
    s.kind_ = SmoothKind::Zero;
    return s;
  }

  /// (mu/2) ||x||^2
  static SmoothFunction scaled_sq_norm(double mu) {
    if (mu < 0.0) throw ConfigError("scaled_sq_norm: mu must be non-negative");
    SmoothFunction s;
    s.kind_ = SmoothKind::ScaledSqNorm;
    s.mu_ = mu;
    s.lipschitz_ = mu;
    return s;
  }

  /// (1/2) ||M x - d||^2 with L_f supplied by the caller (usually ||M||^2).
  static SmoothFunction least_squares(LinearOperator m, Vector d, double lipschitz) {
    if (m.rows() != d.size()) throw DimensionError("least_squares: rhs length mismatch");
    SmoothFunction s;
    s.kind_ = SmoothKind::LeastSquares;
    s.data_ = std::make_shared<LeastSquaresData>(LeastSquaresData{std::move(m), std::move(d)});
    s.lipschitz_ = lipschitz;
    return s;
  }

  /// (1/2) x^T Q x + q^T x with Q symmetric positive semidefinite.
  static SmoothFunction quadratic(Matrix q_mat, Vector q_vec, double lipschitz) {
    if (q_mat.rows() != q_mat.cols() || q_mat.rows() != q_vec.size())
      throw DimensionError("quadratic: shape mismatch");
    SmoothFunction s;
    s.kind_ = SmoothKind::Quadratic;
    s.quad_ = std::make_shared<QuadraticData>(QuadraticData{std::move(q_mat), std::move(q_vec)});
    s.lipschitz_ = lipschitz;
    return s;
  }

  static SmoothFunction custom(ValueFn value, GradFn grad, double lipschitz) {
    SmoothFunction s;
    s.kind_ = SmoothKind::Custom;
    s.value_fn_ = std::move(value);
    s.grad_fn_ = std::move(grad);
    s.lipschitz_ = lipschitz;
    return s;
  }

  SmoothKind kind() const { return kind_; }
  double lipschitz() const { return lipschitz_; }
  double mu() const { return mu_; }
  const LinearOperator* ls_operator() const { return data_ ? &data_->m : nullptr; }
  const Vector* ls_rhs() const { return data_ ? &data_->d : nullptr; }
  const Matrix* quad_matrix() const { return quad_ ? &quad_->q : nullptr; }
  const Vector* quad_linear() const { return quad_ ? &quad_->l : nullptr; }

  double value(const Vector& x) const {
    switch (kind_) {
      case SmoothKind::Zero: return 0.0;
      case SmoothKind::ScaledSqNorm: return 0.5 * mu_ * x.squaredNorm();
      case SmoothKind::LeastSquares: return 0.5 * (data_->m.apply(x) - data_->d).squaredNorm();
      case SmoothKind::Quadratic: return 0.5 * x.dot(quad_->q * x) + quad_->l.dot(x);
      case SmoothKind::Custom: return value_fn_(x);
    }
    return 0.0;
  }

  Vector grad(const Vector& x) const {
    switch (kind_) {
      case SmoothKind::Zero: return Vector::Zero(x.size());
      case SmoothKind::ScaledSqNorm: return mu_ * x;
      case SmoothKind::LeastSquares: return data_->m.apply_adjoint(data_->m.apply(x) - data_->d);
      case SmoothKind::Quadratic: return quad_->q * x + quad_->l;
      case SmoothKind::Custom: return grad_fn_(x);
    }
    return Vector::Zero(x.size());
  }

 private:
  struct LeastSquaresData {
    LinearOperator m;
    Vector d;
  };
  struct QuadraticData {
    Matrix q;
    Vector l;
  };

  SmoothKind kind_ = SmoothKind::Zero;
  double mu_ = 0.0;
  double lipschitz_ = 0.0;
  std::shared_ptr<const LeastSquaresData> data_;
  std::shared_ptr<const QuadraticData> quad_;
  ValueFn value_fn_;
  GradFn grad_fn_;
};

/// min f(x) + g(x)  s.t.  A x = b.
///
/// Immutable once built; copies share the underlying oracle data. A problem
/// with zero constraint rows is an unconstrained composite problem.
class CompositeProblem {
 public:
  CompositeProblem(SmoothFunction f, ProxFunction g, LinearOperator a, Vector b)
      : f_(std::move(f)), g_(std::move(g)), a_(std::move(a)), b_(std::move(b)) {
    if (a_.cols() <= 0) throw DimensionError("CompositeProblem: primal dimension must be positive");
    if (a_.rows() != b_.size()) throw DimensionError("CompositeProblem: b length must equal rows(A)");
    if (f_.lipschitz() < 0.0) throw ConfigError("CompositeProblem: L_f must be non-negative");
  }

  /// Unconstrained problem (m = 0).
  static CompositeProblem unconstrained(SmoothFunction f, ProxFunction g, Index n) {
    return CompositeProblem(std::move(f), std::move(g), LinearOperator::empty(n), Vector(0));
  }

  Index dim_primal() const { return a_.cols(); }
  Index dim_dual() const { return a_.rows(); }
  const SmoothFunction& f() const { return f_; }
  const ProxFunction& g() const { return g_; }
  const LinearOperator& op() const { return a_; }
  const Vector& rhs() const { return b_; }
  double lipschitz_f() const { return f_.lipschitz(); }

  double f_value(const Vector& x) const { return f_.value(x); }
  Vector f_grad(const Vector& x) const { return f_.grad(x); }
  double objective(const Vector& x) const { return f_.value(x) + g_.value(x); }

  Vector residual(const Vector& x) const { return a_.apply(x) - b_; }
  double feasibility(const Vector& x) const { return dim_dual() == 0 ? 0.0 : residual(x).norm(); }

  void check_dims(const Vector& x, const Vector& lambda) const {
    require_size(x, dim_primal(), "primal vector");
    require_size(lambda, dim_dual(), "dual vector");
  }

 private:
  SmoothFunction f_;
  ProxFunction g_;
  LinearOperator a_;
  Vector b_;
};

/// A known saddle point (x*, lambda*) and its optimal value (f+g)(x*).
struct SaddlePointCertificate {
  Vector x_star;
  Vector lambda_star;
  double opt_value = 0.0;
};

/// L_rho(x, lambda) = f(x) + g(x) + <lambda, Ax - b> + (rho/2) ||Ax - b||^2.
/// Returns +infinity when g is an indicator violated at x.
inline double eval_aug_lagrangian(const CompositeProblem& problem, double rho, const Vector& x,
                                  const Vector& lambda) {
  problem.check_dims(x, lambda);
  if (rho < 0.0) throw ConfigError("eval_aug_lagrangian: rho must be non-negative");
  const double gx = problem.g().value(x);
  if (gx == kInfinity) return kInfinity;
  double value = problem.f_value(x) + gx;
  if (problem.dim_dual() > 0) {
    const Vector r = problem.residual(x);
    value += lambda.dot(r) + 0.5 * rho * r.squaredNorm();
  }
  return value;
}

/// Plain Lagrangian (rho = 0).
inline double eval_lagrangian(const CompositeProblem& problem, const Vector& x, const Vector& lambda) {
  return eval_aug_lagrangian(problem, 0.0, x, lambda);
}

struct KktResidual {
  double stationarity = 0.0;
  double feasibility = 0.0;
};

inline double default_probe_step(const CompositeProblem& problem) {
  return 1.0 / std::max(problem.lipschitz_f(), 1.0);
}

/// Prox-gradient fixed-point residual and constraint violation.
inline KktResidual kkt_residual(const CompositeProblem& problem, const Vector& x, const Vector& lambda,
                                double probe_step) {
  problem.check_dims(x, lambda);
  if (!(probe_step > 0.0)) throw ConfigError("kkt_residual: probe_step must be positive");
  Vector direction = problem.f_grad(x);
  if (problem.dim_dual() > 0) direction += problem.op().apply_adjoint(lambda);
  const Vector moved = problem.g().prox(x - probe_step * direction, probe_step);
  return {(x - moved).norm() / probe_step, problem.feasibility(x)};
}

inline KktResidual kkt_residual(const CompositeProblem& problem, const Vector& x, const Vector& lambda) {
  return kkt_residual(problem, x, lambda, default_probe_step(problem));
}

}  // namespace iapda

#endif  // IAPDA_PROBLEM_HPP
