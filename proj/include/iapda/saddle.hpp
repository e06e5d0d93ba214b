#ifndef IAPDA_SADDLE_HPP
#define IAPDA_SADDLE_HPP

#include "iapda/problem.hpp"

namespace iapda {

/// Saddle point of a problem with quadratic (or zero / scaled-norm) f and g = 0,
/// from the KKT system [Q A^T; A 0][x; lambda] = [-q; b].
///
/// Throws ConfigError for other problem kinds or when the system is singular.
inline SaddlePointCertificate solve_quadratic_saddle(const CompositeProblem& problem) {
  if (!problem.g().is_zero()) throw ConfigError("solve_quadratic_saddle: requires g = 0");
  const Index n = problem.dim_primal();
  const Index m = problem.dim_dual();
  Matrix q = Matrix::Zero(n, n);
  Vector lin = Vector::Zero(n);
  const SmoothFunction& f = problem.f();
  switch (f.kind()) {
    case SmoothKind::Zero: break;
    case SmoothKind::ScaledSqNorm: q.diagonal().setConstant(f.mu()); break;
    case SmoothKind::Quadratic:
      q = *f.quad_matrix();
      lin = *f.quad_linear();
      break;
    case SmoothKind::LeastSquares: {
      const LinearOperator& mop = *f.ls_operator();
      q = mop.gram();
      lin = -mop.apply_adjoint(*f.ls_rhs());
      break;
    }
    case SmoothKind::Custom: throw ConfigError("solve_quadratic_saddle: custom f unsupported");
  }

  Matrix kkt = Matrix::Zero(n + m, n + m);
  kkt.topLeftCorner(n, n) = q;
  Vector rhs(n + m);
  rhs.head(n) = -lin;
  if (m > 0) {
    const Matrix a = problem.op().to_dense();
    kkt.topRightCorner(n, m) = a.transpose();
    kkt.bottomLeftCorner(m, n) = a;
    rhs.tail(m) = problem.rhs();
  }
  Eigen::FullPivLU<Matrix> lu(kkt);
  if (!lu.isInvertible()) throw ConfigError("solve_quadratic_saddle: KKT matrix is singular");
  Vector sol = lu.solve(rhs);
  // One step of iterative refinement.
  sol += lu.solve(rhs - kkt * sol);

  SaddlePointCertificate cert;
  cert.x_star = sol.head(n);
  cert.lambda_star = sol.tail(m);
  cert.opt_value = problem.objective(cert.x_star);
  return cert;
}

}  // namespace iapda

#endif  // IAPDA_SADDLE_HPP
