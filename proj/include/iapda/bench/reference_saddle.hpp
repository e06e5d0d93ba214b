#ifndef IAPDA_BENCH_REFERENCE_SADDLE_HPP
#define IAPDA_BENCH_REFERENCE_SADDLE_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "iapda/problem.hpp"

namespace iapda::bench {

struct ReferenceSaddleOptions {
  long max_iter = 200;
  double kkt_tol = 1e-9;
};

/// Saddle point of  min w||x||_1 + (mu/2)||x||^2  s.t.  A x = b  (mu > 0).
///
/// Splits x = p - q with p, q >= 0 and runs a Mehrotra predictor-corrector interior-point
/// method on the resulting QP. The per-coordinate 2x2 blocks are inverted in closed form,
/// so each step solves one m x m system A diag(h) A^T. The equality multiplier is lambda*.
/// Returns nullopt if the KKT residual does not reach `kkt_tol`.
inline std::optional<SaddlePointCertificate> solve_l1l2_saddle(const CompositeProblem& problem,
                                                               const ReferenceSaddleOptions& opts = {}) {
  const SmoothFunction& f = problem.f();
  const ProxFunction& g = problem.g();
  if (f.kind() != SmoothKind::ScaledSqNorm || !(f.mu() > 0.0) || g.kind() != ProxKind::L1) return std::nullopt;
  const double mu = f.mu();
  const double w = g.l1_weight();
  const Matrix a = problem.op().to_dense();
  const Vector& b = problem.rhs();
  const Index m = a.rows();
  const Index n = a.cols();

  Vector p = Vector::Ones(n), q = Vector::Ones(n), zp = Vector::Ones(n), zq = Vector::Ones(n);
  Vector y = Vector::Zero(m);
  const double scale_b = std::max(1.0, b.norm());
  const double scale_c = std::max(1.0, w * std::sqrt(static_cast<double>(n)));

  struct Direction {
    Vector dp, dq, dzp, dzq, dy;
  };
  // Solves the Newton system for right-hand sides (rd_p, rd_q, rp, comp_p, comp_q).
  auto solve_newton = [&](const Vector& rdp, const Vector& rdq, const Vector& rp, const Vector& cp, const Vector& cq,
                          const Matrix& schur_llt_src, const Vector& dpv, const Vector& dqv,
                          const Eigen::LLT<Matrix>& llt) {
    (void)schur_llt_src;
    const Vector r1p = -rdp + cp.cwiseQuotient(p);
    const Vector r1q = -rdq + cq.cwiseQuotient(q);
    // K^{-1} per coordinate: [[mu+dq, mu], [mu, mu+dp]] / det.
    const Vector det = ((mu + dpv.array()) * (mu + dqv.array()) - mu * mu).matrix();
    auto kinv = [&](const Vector& up, const Vector& uq, Vector& op, Vector& oq) {
      op = (((mu + dqv.array()) * up.array() + mu * uq.array()) / det.array()).matrix();
      oq = ((mu * up.array() + (mu + dpv.array()) * uq.array()) / det.array()).matrix();
    };
    Vector kp, kq;
    kinv(r1p, r1q, kp, kq);
    const Vector rhs = a * (kp - kq) + rp;
    Direction d;
    d.dy = llt.solve(rhs);
    const Vector aty = a.transpose() * d.dy;
    kinv(Vector(r1p - aty), Vector(r1q + aty), d.dp, d.dq);
    d.dzp = (cp - zp.cwiseProduct(d.dp)).cwiseQuotient(p);
    d.dzq = (cq - zq.cwiseProduct(d.dq)).cwiseQuotient(q);
    return d;
  };
  auto max_step = [](const Vector& v, const Vector& dv) {
    double s = 1.0;
    for (Index i = 0; i < v.size(); ++i)
      if (dv[i] < 0.0) s = std::min(s, -v[i] / dv[i]);
    return s;
  };

  const double two_n = 2.0 * static_cast<double>(n);
  for (long it = 0; it < opts.max_iter; ++it) {
    const Vector x = p - q;
    const Vector aty = a.transpose() * y;
    const Vector rdp = (mu * x).array() + w + aty.array() - zp.array();
    const Vector rdq = (-mu * x).array() + w - aty.array() - zq.array();
    const Vector rp = a * x - b;
    const double gap = (p.dot(zp) + q.dot(zq)) / two_n;
    const double dual_res = std::sqrt(rdp.squaredNorm() + rdq.squaredNorm());
    if (rp.norm() <= 1e-14 * scale_b && dual_res <= 1e-14 * scale_c && gap <= 1e-16 * scale_c) break;

    const Vector dpv = zp.cwiseQuotient(p);
    const Vector dqv = zq.cwiseQuotient(q);
    const Vector hvec =
        ((dpv.array() + dqv.array()) / (mu * (dpv.array() + dqv.array()) + dpv.array() * dqv.array())).matrix();
    Matrix schur = Matrix::Zero(m, m);
    schur.selfadjointView<Eigen::Lower>().rankUpdate(a * hvec.cwiseSqrt().asDiagonal());
    schur = schur.selfadjointView<Eigen::Lower>();
    schur.diagonal().array() += 1e-14 * std::max(1.0, schur.diagonal().maxCoeff());
    const Eigen::LLT<Matrix> llt(schur);
    if (llt.info() != Eigen::Success) break;

    const Vector cp0 = -p.cwiseProduct(zp);
    const Vector cq0 = -q.cwiseProduct(zq);
    const Direction aff = solve_newton(rdp, rdq, rp, cp0, cq0, schur, dpv, dqv, llt);
    const double ap = std::min(max_step(p, aff.dp), max_step(q, aff.dq));
    const double ad = std::min(max_step(zp, aff.dzp), max_step(zq, aff.dzq));
    const double gap_aff = ((p + ap * aff.dp).dot(zp + ad * aff.dzp) + (q + ap * aff.dq).dot(zq + ad * aff.dzq)) / two_n;
    const double centering = std::pow(gap_aff / gap, 3.0);
    const Vector cp = (cp0.array() - aff.dp.array() * aff.dzp.array() + centering * gap).matrix();
    const Vector cq = (cq0.array() - aff.dq.array() * aff.dzq.array() + centering * gap).matrix();
    const Direction d = solve_newton(rdp, rdq, rp, cp, cq, schur, dpv, dqv, llt);
    const double sp = std::min(1.0, 0.995 * std::min(max_step(p, d.dp), max_step(q, d.dq)));
    const double sd = std::min(1.0, 0.995 * std::min(max_step(zp, d.dzp), max_step(zq, d.dzq)));
    p += sp * d.dp;
    q += sp * d.dq;
    zp += sd * d.dzp;
    zq += sd * d.dzq;
    y += sd * d.dy;
  }

  SaddlePointCertificate cert;
  cert.x_star = p - q;
  cert.lambda_star = y;
  KktResidual r = kkt_residual(problem, cert.x_star, cert.lambda_star, 1.0);

  // Active-set polish: with support S and signs s fixed, the KKT system is linear.
  // Support guess: the entries above a relative cutoff, topped up to m by magnitude.
  const double cutoff = 1e-9 * std::max(1.0, cert.x_star.lpNorm<Eigen::Infinity>());
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](Index i, Index j) { return std::abs(cert.x_star[i]) > std::abs(cert.x_star[j]); });
  std::vector<Index> support;
  for (Index r = 0; r < n; ++r) {
    const Index i = order[static_cast<std::size_t>(r)];
    if ((r < m && cert.x_star[i] != 0.0) || std::abs(cert.x_star[i]) > cutoff) support.push_back(i);
  }
  const auto ns = static_cast<Index>(support.size());
  if (ns >= m) {
    Matrix as(m, ns);
    Vector sg(ns);
    for (Index j = 0; j < ns; ++j) {
      as.col(j) = a.col(support[static_cast<std::size_t>(j)]);
      sg[j] = cert.x_star[support[static_cast<std::size_t>(j)]] > 0.0 ? 1.0 : -1.0;
    }
    const Matrix gram = as * as.transpose();
    const Eigen::LDLT<Matrix> ldlt(gram);
    const Vector rhs = -mu * b - w * (as * sg);
    Vector lam = ldlt.solve(rhs);
    lam += ldlt.solve(Vector(rhs - gram * lam));
    Vector xs = Vector::Zero(n);
    const Vector xsv = -(w * sg + as.transpose() * lam) / mu;
    for (Index j = 0; j < ns; ++j) xs[support[static_cast<std::size_t>(j)]] = xsv[j];
    const KktResidual rp = kkt_residual(problem, xs, lam, 1.0);
    if (lam.allFinite() && std::max(rp.stationarity, rp.feasibility) < std::max(r.stationarity, r.feasibility)) {
      cert.x_star = xs;
      cert.lambda_star = lam;
      r = rp;
    }
  }
  cert.opt_value = problem.objective(cert.x_star);
  if (!(std::max(r.stationarity, r.feasibility) <= opts.kkt_tol)) return std::nullopt;
  return cert;
}

}  // namespace iapda::bench

#endif  // IAPDA_BENCH_REFERENCE_SADDLE_HPP
