#ifndef IAPDA_RNG_HPP
#define IAPDA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

#include "iapda/linear_operator.hpp"

namespace iapda {

/// SplitMix64 (Steele, Lea, Flood 2014). 64-bit state, one add + three
/// xor-shift-multiply rounds per draw; trivially portable to other languages,
/// which is what makes generated instances reproducible outside C++.
///
/// Streams: `SplitMix64::stream(seed, id)` derives an independent generator
/// per array (A, x*, noise, ...) so adding a draw to one array never shifts
/// the others.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static SplitMix64 stream(std::uint64_t seed, std::uint64_t stream_id) {
    SplitMix64 mixer(seed ^ (0x9E3779B97F4A7C15ULL * (stream_id + 1)));
    return SplitMix64(mixer.next_u64());
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; both outputs of a pair are used.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  Vector normal_vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  /// Column-major fill, so the stream order is the storage order.
  Matrix normal_matrix(Index rows, Index cols) {
    Matrix a(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) a(i, j) = normal();
    return a;
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace iapda

#endif  // IAPDA_RNG_HPP
