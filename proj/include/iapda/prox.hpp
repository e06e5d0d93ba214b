#ifndef IAPDA_PROX_HPP
#define IAPDA_PROX_HPP

#include <cmath>
#include <limits>
#include <string>

#include "iapda/linear_operator.hpp"

namespace iapda {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Soft thresholding: sign(z_i) * max(|z_i| - threshold, 0).
inline Vector prox_l1(const Vector& z, double threshold) {
  if (threshold < 0.0) throw ConfigError("prox_l1: threshold must be non-negative");
  return z.unaryExpr([threshold](double v) {
    const double mag = std::abs(v) - threshold;
    return mag > 0.0 ? std::copysign(mag, v) : 0.0;
  });
}

/// Projection onto the non-negative orthant.
inline Vector prox_nonneg(const Vector& z) { return z.cwiseMax(0.0); }

enum class ProxKind { Zero, L1, SqL2, NonNegIndicator, L1SqL2 };

inline std::string to_string(ProxKind kind) {
  switch (kind) {
    case ProxKind::Zero: return "zero";
    case ProxKind::L1: return "l1";
    case ProxKind::SqL2: return "sql2";
    case ProxKind::NonNegIndicator: return "nonneg";
    case ProxKind::L1SqL2: return "l1+sql2";
  }
  return "unknown";
}

inline ProxKind prox_kind_from_string(const std::string& s) {
  if (s == "zero") return ProxKind::Zero;
  if (s == "l1") return ProxKind::L1;
  if (s == "sql2") return ProxKind::SqL2;
  if (s == "nonneg") return ProxKind::NonNegIndicator;
  if (s == "l1+sql2") return ProxKind::L1SqL2;
  throw ConfigError("unknown prox function tag '" + s + "'");
}

/// Nonsmooth term g with a closed-form proximal map.
///
/// The supported family is g(x) = w*||x||_1 + (mu/2)*||x||^2 (any of the two
/// weights may be zero) and the indicator of x >= 0. Indicator values are
/// reported as +infinity outside the feasible set rather than raising.
class ProxFunction {
 public:
  ProxFunction() = default;

  static ProxFunction zero() { return ProxFunction(ProxKind::Zero, 0.0, 0.0); }
  static ProxFunction l1(double weight) { return ProxFunction(ProxKind::L1, weight, 0.0); }
  static ProxFunction sq_l2(double mu) { return ProxFunction(ProxKind::SqL2, 0.0, mu); }
  static ProxFunction nonneg() { return ProxFunction(ProxKind::NonNegIndicator, 0.0, 0.0); }
  static ProxFunction l1_sq_l2(double weight, double mu) {
    return ProxFunction(ProxKind::L1SqL2, weight, mu);
  }

  ProxKind kind() const { return kind_; }
  double l1_weight() const { return l1_weight_; }
  double sq_weight() const { return sq_weight_; }
  bool is_zero() const { return kind_ == ProxKind::Zero; }

  double value(const Vector& x) const {
    switch (kind_) {
      case ProxKind::Zero: return 0.0;
      case ProxKind::NonNegIndicator: return (x.array() >= 0.0).all() ? 0.0 : kInfinity;
      default: break;
    }
    double v = 0.0;
    if (l1_weight_ != 0.0) v += l1_weight_ * x.lpNorm<1>();
    if (sq_weight_ != 0.0) v += 0.5 * sq_weight_ * x.squaredNorm();
    return v;
  }

  /// prox_{step*g}(z) = argmin_u g(u) + ||u - z||^2 / (2 step).
  Vector prox(const Vector& z, double step) const {
    if (!(step > 0.0)) throw ConfigError("prox: step must be positive");
    switch (kind_) {
      case ProxKind::Zero: return z;
      case ProxKind::NonNegIndicator: return prox_nonneg(z);
      case ProxKind::L1: return prox_l1(z, step * l1_weight_);
      case ProxKind::SqL2: return z / (1.0 + step * sq_weight_);
      case ProxKind::L1SqL2: return prox_l1(z, step * l1_weight_) / (1.0 + step * sq_weight_);
    }
    return z;
  }

 private:
  ProxFunction(ProxKind kind, double w, double mu) : kind_(kind), l1_weight_(w), sq_weight_(mu) {
    if (w < 0.0 || mu < 0.0) throw ConfigError("ProxFunction: weights must be non-negative");
  }

  ProxKind kind_ = ProxKind::Zero;
  double l1_weight_ = 0.0;
  double sq_weight_ = 0.0;
};

/// Smoothing parameter of the Moreau-Yosida envelope.
struct MoreauParams {
  double gamma = 1e-3;

  explicit MoreauParams(double g = 1e-3) : gamma(g) {
    if (!(gamma > 0.0)) throw ConfigError("MoreauParams: gamma must be positive");
  }
};

/// Gradient of the Moreau envelope, (x - prox_{gamma g}(x)) / gamma. (1/gamma)-Lipschitz.
inline Vector moreau_grad(const ProxFunction& g, const MoreauParams& params, const Vector& x) {
  return (x - g.prox(x, params.gamma)) / params.gamma;
}

/// g_gamma(x) = g(p) + ||x - p||^2 / (2 gamma) with p = prox_{gamma g}(x).
inline double moreau_value(const ProxFunction& g, const MoreauParams& params, const Vector& x) {
  const Vector p = g.prox(x, params.gamma);
  return g.value(p) + (x - p).squaredNorm() / (2.0 * params.gamma);
}

}  // namespace iapda

#endif  // IAPDA_PROX_HPP
