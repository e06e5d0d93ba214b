#ifndef IAPDA_CERTIFICATES_HPP
#define IAPDA_CERTIFICATES_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "iapda/trace.hpp"

namespace iapda {

struct CertificateTolerances {
  double bound_rel = 1e-8;    // slack allowed: bound_rel * max(bound_floor, bound)
  double bound_floor = 1.0;
  double energy_rel = 1e-9;   // E(k+1) <= E(k) + energy_rel * max(1, E(1))
  double a_k_tol = 1e-12;     // a_k >= -a_k_tol
};

struct CertificateFailure {
  std::string which;
  long k = 0;
  double value = 0.0;
  double bound = 0.0;
};

/// Result of checking a trace against the closed-form convergence bounds.
struct CertificateReport {
  bool pass = true;
  bool energy_monotone = true;
  double e1 = kNaN;        // E(1)
  double c_const = kNaN;   // C
  double feas_numerator = kNaN;  // beta_0 t_1^2 ||A x_1 - b|| + 2C
  double min_a_k = std::numeric_limits<double>::infinity();
  double max_a_k = -std::numeric_limits<double>::infinity();
  // Worst (value - bound) / max(bound_floor, bound) seen per family; <= 0 means satisfied.
  double worst_gap_ratio = -std::numeric_limits<double>::infinity();
  double worst_feas_ratio = -std::numeric_limits<double>::infinity();
  double worst_obj_ratio = -std::numeric_limits<double>::infinity();
  double worst_energy_increase = -std::numeric_limits<double>::infinity();
  long rows_checked = 0;
  std::vector<CertificateFailure> failures;

  std::string summary() const {
    if (pass) return "all certificates hold over " + std::to_string(rows_checked) + " rows";
    const CertificateFailure& f = failures.front();
    return f.which + " violated at k=" + std::to_string(f.k) + " (value " + format_double(f.value) + " > bound " +
           format_double(f.bound) + ")";
  }
};

/// C = ||m_1|| + (1/sigma)(max t_{k+1}||lambda_{k+1}-lambda_k|| + t_1||lambda_1-lambda_0|| + max||lambda_k|| + ||lambda_0||)
/// with the maxima taken over the rows of the trace.
inline double bound_constant(const MetricsTrace& trace) {
  const TraceHeader& h = trace.header;
  double max_scaled_step = 0.0;
  double max_lambda = 0.0;
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const TraceRow& r = trace.rows[i];
    if (i > 0) max_scaled_step = std::max(max_scaled_step, r.t_k * r.lambda_step);
    max_lambda = std::max(max_lambda, r.lambda_norm);
  }
  const double m1 = h.t1 * h.t1 * h.beta0 * h.feas_x1;
  return m1 + (max_scaled_step + h.t1 * h.lambda1_minus_lambda0_norm + max_lambda + h.lambda0_norm) / h.sigma;
}

/// a_k = 1 - t_{k+1}(t_{k+1}-1) beta_k / (t_k^2 beta_{k-1}).
inline double a_coefficient(const TraceRow& r) {
  return 1.0 - r.t_next * (r.t_next - 1.0) * r.beta_k / (r.t_k * r.t_k * r.beta_prev);
}

/// Checks gap, feasibility and objective-residual bounds, a_k in [0, 1) and
/// energy monotonicity on every row. Requires a trace recorded with a saddle certificate.
inline CertificateReport bound_certificates(const MetricsTrace& trace, const CertificateTolerances& tol = {},
                                            bool check_energy = true) {
  CertificateReport rep;
  if (trace.rows.empty() || !trace.header.has_saddle) {
    rep.pass = false;
    rep.failures.push_back({"trace has no rows or no saddle certificate", 0, 0.0, 0.0});
    return rep;
  }
  const TraceHeader& h = trace.header;
  rep.e1 = trace.rows.front().energy_total;
  rep.c_const = bound_constant(trace);
  rep.feas_numerator = h.beta0 * h.t1 * h.t1 * h.feas_x1 + 2.0 * rep.c_const;
  const double lambda_star_norm = std::isnan(h.lambda_star_norm) ? 0.0 : h.lambda_star_norm;

  auto check = [&](const char* which, long k, double value, double bound, double& worst) {
    const double scale = std::max(tol.bound_floor, bound);
    const double ratio = (value - bound) / scale;
    worst = std::max(worst, ratio);
    if (value - bound > tol.bound_rel * scale) {
      rep.pass = false;
      rep.failures.push_back({which, k, value, bound});
    }
  };

  const double energy_slack = tol.energy_rel * std::max(1.0, rep.e1);
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const TraceRow& r = trace.rows[i];
    const double denom = r.t_next * (r.t_next - 1.0) * r.beta_k;
    const double inv = denom > 0.0 ? 1.0 / denom : std::numeric_limits<double>::infinity();
    const double gap_bound = rep.e1 * inv;
    const double feas_bound = rep.feas_numerator * inv;
    const double obj_bound = gap_bound + lambda_star_norm * feas_bound + 0.5 * h.rho * feas_bound * feas_bound;
    check("gap bound", r.k, r.pd_gap, gap_bound, rep.worst_gap_ratio);
    check("feasibility bound", r.k, r.feas_violation, feas_bound, rep.worst_feas_ratio);
    check("objective-residual bound", r.k, r.obj_residual, obj_bound, rep.worst_obj_ratio);

    const double a_k = a_coefficient(r);
    rep.min_a_k = std::min(rep.min_a_k, a_k);
    rep.max_a_k = std::max(rep.max_a_k, a_k);
    if (a_k < -tol.a_k_tol || !(a_k < 1.0)) {
      rep.pass = false;
      rep.failures.push_back({"a_k in [0,1)", r.k, a_k, a_k < 0.0 ? 0.0 : 1.0});
    }

    if (check_energy && i > 0) {
      const double increase = r.energy_total - trace.rows[i - 1].energy_total;
      rep.worst_energy_increase = std::max(rep.worst_energy_increase, increase);
      if (increase > energy_slack) {
        rep.pass = false;
        rep.energy_monotone = false;
        rep.failures.push_back({"energy monotonicity", r.k, r.energy_total, trace.rows[i - 1].energy_total});
      }
    }
    ++rep.rows_checked;
  }
  return rep;
}

}  // namespace iapda

#endif  // IAPDA_CERTIFICATES_HPP
