#ifndef IAPDA_BENCH_GENERATORS_HPP
#define IAPDA_BENCH_GENERATORS_HPP

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "iapda/composite_solvers.hpp"
#include "iapda/problem.hpp"
#include "iapda/rng.hpp"

namespace iapda::bench {

// Stream ids; one per generated array.
inline constexpr std::uint64_t kStreamMatrix = 1;
inline constexpr std::uint64_t kStreamSignal = 2;
inline constexpr std::uint64_t kStreamSupport = 3;
inline constexpr std::uint64_t kStreamNoise = 4;
inline constexpr std::uint64_t kStreamPattern = 5;
inline constexpr std::uint64_t kStreamRhs = 6;

struct L1L2Instance {
  CompositeProblem problem;
  Vector x_true;
  Vector noise;
  std::vector<std::string> warnings;
};

/// min ||x||_1 + (mu/2)||x||^2  s.t.  A x = b, with A standard Gaussian,
/// x_true ~ N(0, 4) clipped to [-2, 2] and sparsified, b = A x_true + w, ||w|| = noise_norm.
inline L1L2Instance gen_l1l2(Index m, Index n, double mu, double sparsity, double noise_norm, std::uint64_t seed) {
  if (m <= 0 || n <= 0) throw ConfigError("gen_l1l2: dimensions must be positive");
  if (!(sparsity > 0.0 && sparsity <= 1.0)) throw ConfigError("gen_l1l2: sparsity must lie in (0, 1]");
  if (noise_norm < 0.0) throw ConfigError("gen_l1l2: noise_norm must be non-negative");
  std::vector<std::string> warnings;

  SplitMix64 rng_a = SplitMix64::stream(seed, kStreamMatrix);
  Matrix a = rng_a.normal_matrix(m, n);

  SplitMix64 rng_x = SplitMix64::stream(seed, kStreamSignal);
  Vector dense_signal(n);
  for (Index i = 0; i < n; ++i) dense_signal[i] = std::clamp(2.0 * rng_x.normal(), -2.0, 2.0);

  long nnz = std::lround(sparsity * static_cast<double>(n));
  if (nnz < 1) {
    nnz = 1;
    warnings.push_back("sparsity * n < 1; forcing one nonzero entry");
  }
  // Partial Fisher-Yates picks the support.
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  SplitMix64 rng_s = SplitMix64::stream(seed, kStreamSupport);
  for (long i = 0; i < nnz; ++i) {
    const auto span = static_cast<std::uint64_t>(n - i);
    const auto j = static_cast<std::size_t>(i) + static_cast<std::size_t>(rng_s.next_u64() % span);
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
  }
  Vector x_true = Vector::Zero(n);
  for (long i = 0; i < nnz; ++i) {
    const Index j = idx[static_cast<std::size_t>(i)];
    x_true[j] = dense_signal[j];
  }

  SplitMix64 rng_w = SplitMix64::stream(seed, kStreamNoise);
  Vector noise = rng_w.normal_vector(m);
  const double nn = noise.norm();
  noise = nn > 0.0 ? Vector(noise * (noise_norm / nn)) : Vector(Vector::Zero(m));

  Vector b = a * x_true + noise;
  CompositeProblem problem(SmoothFunction::scaled_sq_norm(mu), ProxFunction::l1(1.0), LinearOperator(std::move(a)),
                           std::move(b));
  return {std::move(problem), std::move(x_true), std::move(noise), std::move(warnings)};
}

/// min (1/2)||M x - d||^2 [+ indicator(x >= 0)] with M m x n, each entry nonzero with
/// probability `density`, nonzeros uniform on [0, 0.1], d standard Gaussian. No equality constraint.
inline CompositeProblem gen_nnls(Index m, Index n, double density, std::uint64_t seed, bool nonneg = true) {
  if (m <= 0 || n <= 0) throw ConfigError("gen_nnls: dimensions must be positive");
  if (!(density > 0.0 && density <= 1.0)) throw ConfigError("gen_nnls: density must lie in (0, 1]");
  SplitMix64 pattern = SplitMix64::stream(seed, kStreamPattern);
  SplitMix64 values = SplitMix64::stream(seed, kStreamMatrix);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(density * static_cast<double>(m * n)) + 16);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) {
      if (density < 1.0 && pattern.uniform() >= density) continue;
      triplets.emplace_back(i, j, values.uniform(0.0, 0.1));
    }
  }
  SparseMatrix sm(m, n);
  sm.setFromTriplets(triplets.begin(), triplets.end());
  LinearOperator mop = density < 1.0 ? LinearOperator(std::move(sm)) : LinearOperator(Matrix(sm));
  SplitMix64 rng_d = SplitMix64::stream(seed, kStreamRhs);
  Vector d = rng_d.normal_vector(m);
  const double norm_m = estimate_opnorm(mop, 5000, 1e-12, seed);
  // Small inflation covers the power-iteration underestimate.
  const double lipschitz = norm_m * norm_m * (1.0 + 1e-9);
  return CompositeProblem::unconstrained(SmoothFunction::least_squares(std::move(mop), std::move(d), lipschitz),
                                         nonneg ? ProxFunction::nonneg() : ProxFunction::zero(), n);
}

/// Scalar instance: f = x^2/2, g = 0, A = [1], b = 0; saddle (0, 0).
inline CompositeProblem scalar_instance() {
  Matrix a(1, 1);
  a << 1.0;
  return CompositeProblem(SmoothFunction::scaled_sq_norm(1.0), ProxFunction::zero(), LinearOperator(std::move(a)),
                          Vector::Zero(1));
}

/// Random strongly convex quadratic f with Gaussian A (full row rank almost surely) and g = 0.
inline CompositeProblem gen_quadratic(Index n, Index m, std::uint64_t seed, double curvature_floor = 0.1) {
  if (m > n) throw ConfigError("gen_quadratic: need m <= n");
  SplitMix64 rng_q = SplitMix64::stream(seed, kStreamMatrix);
  const Matrix r = rng_q.normal_matrix(n, n);
  Matrix q = r.transpose() * r / static_cast<double>(n);
  q.diagonal().array() += curvature_floor;
  SplitMix64 rng_l = SplitMix64::stream(seed, kStreamSignal);
  Vector lin = rng_l.normal_vector(n);
  SplitMix64 rng_a = SplitMix64::stream(seed, kStreamPattern);
  Matrix a = rng_a.normal_matrix(m, n);
  SplitMix64 rng_b = SplitMix64::stream(seed, kStreamRhs);
  Vector b = rng_b.normal_vector(m);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(q, Eigen::EigenvaluesOnly);
  const double lf = eig.eigenvalues().maxCoeff();
  return CompositeProblem(SmoothFunction::quadratic(std::move(q), std::move(lin), lf), ProxFunction::zero(),
                          LinearOperator(std::move(a)), std::move(b));
}

}  // namespace iapda::bench

#endif  // IAPDA_BENCH_GENERATORS_HPP
