#ifndef IAPDA_BENCH_RATE_FIT_HPP
#define IAPDA_BENCH_RATE_FIT_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace iapda::bench {

struct RateFit {
  double k_lo = 0.0;
  double k_hi = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  long points = 0;
  std::vector<std::string> warnings;
};

/// Least-squares line through (log k, log value) for k in [k_lo, k_hi].
///
/// Non-positive or non-finite values are dropped (with a warning) and the window
/// shrinks to the remaining points; fewer than two usable points is an error.
inline RateFit fit_rate_slope(std::span<const double> ks, std::span<const double> values, double k_lo, double k_hi) {
  if (ks.size() != values.size()) throw std::invalid_argument("fit_rate_slope: abscissa/value length mismatch");
  if (!(k_lo > 0.0) || !(k_hi > k_lo)) throw std::invalid_argument("fit_rate_slope: need 0 < k_lo < k_hi");
  RateFit fit;
  std::vector<double> lx, ly;
  long dropped = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < k_lo || ks[i] > k_hi) continue;
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      ++dropped;
      continue;
    }
    lx.push_back(std::log(ks[i]));
    ly.push_back(std::log(values[i]));
  }
  if (lx.size() < 2) throw std::invalid_argument("fit_rate_slope: fewer than two positive values in window");
  if (dropped > 0) fit.warnings.push_back(std::to_string(dropped) + " non-positive values dropped from window");

  const double count = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate_slope: window holds a single abscissa");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  fit.k_lo = std::exp(lx.front());
  fit.k_hi = std::exp(lx.back());
  fit.points = static_cast<long>(lx.size());
  return fit;
}

}  // namespace iapda::bench

#endif  // IAPDA_BENCH_RATE_FIT_HPP
