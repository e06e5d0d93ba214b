#ifndef IAPDA_SCHEDULES_HPP
#define IAPDA_SCHEDULES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "iapda/linear_operator.hpp"

namespace iapda {

enum class RuleKind { Nesterov, ChambolleDossal, AttouchCabot, Custom };

/// Extrapolation sequence t_k, k >= 1.
///
/// Nesterov:          t_1 = 1, t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2
/// Chambolle-Dossal:  t_k = 1 + (k - 1)/(alpha - 1)
/// Attouch-Cabot:     t_k = (k - 1)/(alpha - 1), shifted so that the first
///                    emitted term is the one at index floor(alpha) + 1.
/// Custom:            explicit k -> t_k map (test sequences).
class ExtrapolationRule {
 public:
  static ExtrapolationRule nesterov() { return ExtrapolationRule(RuleKind::Nesterov, 0.0); }
  static ExtrapolationRule chambolle_dossal(double alpha) {
    return ExtrapolationRule(RuleKind::ChambolleDossal, alpha);
  }
  static ExtrapolationRule attouch_cabot(double alpha) {
    return ExtrapolationRule(RuleKind::AttouchCabot, alpha);
  }
  static ExtrapolationRule custom(std::function<double(long)> t_of_k, std::string name = "custom") {
    ExtrapolationRule r(RuleKind::Custom, 0.0);
    r.custom_ = std::move(t_of_k);
    r.name_ = std::move(name);
    return r;
  }

  RuleKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  const std::string& name() const { return name_; }

  /// Original index of the first emitted Attouch-Cabot term.
  long attouch_cabot_offset() const { return static_cast<long>(std::floor(alpha_)) + 1; }

  /// t_1.
  double first() const { return closed_form(1).value_or(1.0); }

  /// Closed-form t_k where one exists (all rules except Nesterov).
  std::optional<double> closed_form(long k) const {
    switch (kind_) {
      case RuleKind::Nesterov: return k == 1 ? std::optional<double>(1.0) : std::nullopt;
      case RuleKind::ChambolleDossal: return 1.0 + static_cast<double>(k - 1) / (alpha_ - 1.0);
      case RuleKind::AttouchCabot: {
        const long original = k + attouch_cabot_offset() - 1;
        return static_cast<double>(original - 1) / (alpha_ - 1.0);
      }
      case RuleKind::Custom: return custom_(k);
    }
    return std::nullopt;
  }

 private:
  ExtrapolationRule(RuleKind kind, double alpha) : kind_(kind), alpha_(alpha) {
    if ((kind == RuleKind::ChambolleDossal || kind == RuleKind::AttouchCabot) && !(alpha >= 3.0)) {
      throw ConfigError("extrapolation rule: alpha must be >= 3");
    }
    switch (kind) {
      case RuleKind::Nesterov: name_ = "nesterov"; break;
      case RuleKind::ChambolleDossal: name_ = "cd"; break;
      case RuleKind::AttouchCabot: name_ = "ac"; break;
      case RuleKind::Custom: name_ = "custom"; break;
    }
  }

  RuleKind kind_;
  double alpha_;
  std::string name_;
  std::function<double(long)> custom_;
};

/// t_{k+1} from t_k.
inline double next_t(const ExtrapolationRule& rule, long k, double t_k) {
  if (rule.kind() == RuleKind::Nesterov) return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_k * t_k));
  return *rule.closed_form(k + 1);
}

/// Absolute slack allowed on t_{k+1}^2 - t_{k+1} - t_k^2 <= 0, scaled by the size of the terms.
inline double rule_slack_tolerance(double t_next) { return 1e-12 * std::max(1.0, t_next * t_next); }

struct RuleCertificate {
  bool pass = true;
  long first_failure = 0;  // 0 when pass
  double failure_slack = 0.0;
  double max_slack = -std::numeric_limits<double>::infinity();
  double tau_hat = std::numeric_limits<double>::infinity();  // min_k t_k / k
  bool monotone = true;
  std::string message;
};

/// Checks t_1 >= 1, monotonicity and t_{k+1}^2 - t_{k+1} - t_k^2 <= 0 for k < horizon,
/// and reports tau_hat = min_{k <= horizon} t_k / k.
inline RuleCertificate validate_rule(const ExtrapolationRule& rule, long horizon) {
  if (horizon < 2) throw ConfigError("validate_rule: horizon must be >= 2");
  RuleCertificate cert;
  double t = rule.first();
  if (t < 1.0) {
    cert.pass = false;
    cert.first_failure = 1;
    cert.message = "t_1 < 1";
  }
  for (long k = 1; k <= horizon; ++k) {
    cert.tau_hat = std::min(cert.tau_hat, t / static_cast<double>(k));
    if (k == horizon) break;
    const double t_next = next_t(rule, k, t);
    const double slack = t_next * t_next - t_next - t * t;
    cert.max_slack = std::max(cert.max_slack, slack);
    if (t_next < t) cert.monotone = false;
    if (cert.pass && (slack > rule_slack_tolerance(t_next) || t_next < t)) {
      cert.pass = false;
      cert.first_failure = k;
      cert.failure_slack = slack;
      cert.message = t_next < t ? "sequence decreases at k=" + std::to_string(k)
                                : "t_{k+1}^2 - t_{k+1} - t_k^2 > 0 at k=" + std::to_string(k);
    }
    t = t_next;
  }
  if (!(cert.tau_hat > 0.0) && cert.pass) {
    cert.pass = false;
    cert.message = "inf t_k / k is not positive";
  }
  return cert;
}

/// Upper factor t_k^2 / (t_{k+1}(t_{k+1} - 1)) of the admissible beta_k / beta_{k-1}; +inf if t_{k+1} = 1.
inline double beta_upper_factor(double t_k, double t_k1) {
  const double denom = t_k1 * (t_k1 - 1.0);
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return t_k * t_k / denom;
}

enum class ScalingKind { Constant, PowerGrowth };

struct ScalingPolicy {
  ScalingKind kind = ScalingKind::Constant;
  double beta0 = 1.0;
  double power = 0.0;

  static ScalingPolicy constant(double beta0) { return make(ScalingKind::Constant, beta0, 0.0); }
  static ScalingPolicy power_growth(double beta0, double p) {
    return make(ScalingKind::PowerGrowth, beta0, p);
  }

  void validate() const {
    if (!(beta0 > 0.0)) throw ConfigError("scaling policy: beta0 must be positive");
    if (kind == ScalingKind::PowerGrowth && !(power >= 0.0))
      throw ConfigError("scaling policy: power must be non-negative");
  }

 private:
  static ScalingPolicy make(ScalingKind kind, double beta0, double p) {
    ScalingPolicy s;
    s.kind = kind;
    s.beta0 = beta0;
    s.power = p;
    s.validate();
    return s;
  }
};

/// beta_k from beta_{k-1}: the policy's candidate clamped into [beta_prev, cap * beta_prev].
inline double next_beta(const ScalingPolicy& policy, double beta_prev, double factor_cap, long k) {
  if (!(beta_prev > 0.0)) throw ConfigError("next_beta: beta_prev must be positive");
  double candidate = beta_prev;
  if (policy.kind == ScalingKind::PowerGrowth && policy.power > 0.0) {
    candidate = beta_prev * std::pow(static_cast<double>(k + 1) / static_cast<double>(k), policy.power);
  }
  const double capped = std::min(candidate, factor_cap * beta_prev);
  return std::max(capped, beta_prev);
}

/// Runs (t_k, beta_k) forward together. After construction the state describes
/// iteration k = 1: t_k = t_1, t_{k+1} = t_2, beta_{k-1} = beta_0, beta_k = beta_1.
class ScheduleState {
 public:
  ScheduleState(ExtrapolationRule rule, ScalingPolicy policy) : rule_(std::move(rule)), policy_(policy) {
    policy_.validate();
    t_cur_ = rule_.first();
    if (t_cur_ < 1.0) throw ConfigError("schedule: t_1 must be >= 1");
    t_next_ = next_t(rule_, 1, t_cur_);
    beta_prev_ = policy_.beta0;
    beta_cur_ = next_beta(policy_, beta_prev_, beta_upper_factor(t_cur_, t_next_), 1);
  }

  long k() const { return k_; }
  double t_cur() const { return t_cur_; }
  double t_next() const { return t_next_; }
  double beta_prev() const { return beta_prev_; }
  double beta_cur() const { return beta_cur_; }
  const ExtrapolationRule& rule() const { return rule_; }
  const ScalingPolicy& policy() const { return policy_; }

  /// (q1) slack t_{k+1}^2 - t_{k+1} - t_k^2 at the current k.
  double rule_slack() const { return t_next_ * t_next_ - t_next_ - t_cur_ * t_cur_; }

  /// True when the current pair satisfies (q0), (q1) and monotonicity within tolerance.
  bool admissible() const {
    const double cap = beta_upper_factor(t_cur_, t_next_);
    const double tol = 1e-12 * beta_prev_;
    return t_next_ >= t_cur_ && rule_slack() <= rule_slack_tolerance(t_next_) &&
           beta_cur_ >= beta_prev_ - tol && beta_cur_ <= cap * beta_prev_ * (1.0 + 1e-12) + tol;
  }

  void advance() {
    ++k_;
    t_cur_ = t_next_;
    t_next_ = next_t(rule_, k_, t_cur_);
    beta_prev_ = beta_cur_;
    beta_cur_ = next_beta(policy_, beta_prev_, beta_upper_factor(t_cur_, t_next_), k_);
  }

 private:
  ExtrapolationRule rule_;
  ScalingPolicy policy_;
  long k_ = 1;
  double t_cur_ = 1.0;
  double t_next_ = 1.0;
  double beta_prev_ = 1.0;
  double beta_cur_ = 1.0;
};

}  // namespace iapda

#endif  // IAPDA_SCHEDULES_HPP
