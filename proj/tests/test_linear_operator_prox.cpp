#include <cmath>

#include <gtest/gtest.h>

#include "iapda/linear_operator.hpp"
#include "iapda/prox.hpp"
#include "iapda/rng.hpp"

using namespace iapda;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Golden-section minimizer of a unimodal 1-D function on [lo, hi].
template <class F>
double golden_min(F&& f, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  for (int i = 0; i < 200; ++i) {
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - r * (b - a);
    d = a + r * (b - a);
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST(LinearOperator, DenseAndSparseAgree) {
  SplitMix64 rng(7);
  Matrix a = rng.normal_matrix(6, 9);
  for (Index i = 0; i < a.size(); ++i)
    if (rng.uniform() < 0.5) a.data()[i] = 0.0;
  const LinearOperator dense(a);
  const LinearOperator sparse(SparseMatrix(a.sparseView()));
  const Vector x = rng.normal_vector(9);
  const Vector y = rng.normal_vector(6);
  EXPECT_LT((dense.apply(x) - sparse.apply(x)).norm(), 1e-13);
  EXPECT_LT((dense.apply_adjoint(y) - sparse.apply_adjoint(y)).norm(), 1e-13);
  EXPECT_LT((dense.gram() - sparse.gram()).norm(), 1e-12);
  EXPECT_TRUE(sparse.is_sparse());
}

TEST(LinearOperator, AdjointConsistency) {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const LinearOperator a(rng.normal_matrix(5, 8));
    const Vector x = rng.normal_vector(8);
    const Vector y = rng.normal_vector(5);
    const double lhs = a.apply(x).dot(y);
    const double rhs = x.dot(a.apply_adjoint(y));
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(LinearOperator, EmptyOperatorHasNoRows) {
  const LinearOperator a = LinearOperator::empty(4);
  EXPECT_EQ(a.rows(), 0);
  EXPECT_EQ(a.cols(), 4);
  EXPECT_EQ(a.apply(Vector::Ones(4)).size(), 0);
  EXPECT_TRUE(a.apply_adjoint(Vector(0)).isZero());
}

TEST(LinearOperator, SizeMismatchThrows) {
  const LinearOperator a(Matrix::Identity(3, 3));
  EXPECT_THROW(a.apply(Vector::Ones(2)), DimensionError);
  EXPECT_THROW(a.apply_adjoint(Vector::Ones(4)), DimensionError);
}

TEST(ProxL1, HandValues) {
  EXPECT_DOUBLE_EQ(prox_l1(vec({2.0}), 0.5)[0], 1.5);
  EXPECT_DOUBLE_EQ(prox_l1(vec({0.3}), 0.5)[0], 0.0);
  EXPECT_DOUBLE_EQ(prox_l1(vec({-2.0}), 0.5)[0], -1.5);
}

TEST(ProxNonneg, ClampsAndIsIdempotent) {
  const Vector p = prox_nonneg(vec({-1.0, 2.0}));
  EXPECT_EQ(p[0], 0.0);
  EXPECT_EQ(p[1], 2.0);
  const Vector z = vec({0.0, 3.5, 1e-300});
  EXPECT_EQ(prox_nonneg(z), z);
  SplitMix64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Vector r = rng.normal_vector(4);
    EXPECT_EQ(prox_nonneg(prox_nonneg(r)), prox_nonneg(r));
  }
}

TEST(ProxFunction, IndicatorValueIsInfinite) {
  const ProxFunction g = ProxFunction::nonneg();
  EXPECT_EQ(g.value(vec({-1.0, 1.0})), kInfinity);
  EXPECT_EQ(g.value(vec({0.0, 1.0})), 0.0);
}

TEST(ProxFunction, KindNamesRoundTrip) {
  for (ProxKind k : {ProxKind::Zero, ProxKind::L1, ProxKind::SqL2, ProxKind::NonNegIndicator, ProxKind::L1SqL2})
    EXPECT_EQ(prox_kind_from_string(to_string(k)), k);
  EXPECT_THROW(prox_kind_from_string("huber"), ConfigError);
}

TEST(ProxFunction, NonexpansiveOnRandomPairs) {
  SplitMix64 rng(5);
  const ProxFunction gs[] = {ProxFunction::zero(), ProxFunction::l1(0.7), ProxFunction::sq_l2(2.0),
                             ProxFunction::nonneg(), ProxFunction::l1_sq_l2(0.3, 1.5)};
  for (const ProxFunction& g : gs) {
    for (int i = 0; i < 200; ++i) {
      const Vector x = rng.normal_vector(6);
      const Vector y = rng.normal_vector(6);
      const double s = 0.1 + rng.uniform();
      EXPECT_LE((g.prox(x, s) - g.prox(y, s)).norm(), (x - y).norm() + 1e-14);
    }
  }
}

TEST(ProxFunction, SubgradientInequalityAtProx) {
  // p = prox_{s g}(x) implies g(z) >= g(p) + <(x - p)/s, z - p> for all z.
  SplitMix64 rng(9);
  const ProxFunction gs[] = {ProxFunction::l1(0.7), ProxFunction::sq_l2(2.0), ProxFunction::nonneg(),
                             ProxFunction::l1_sq_l2(0.3, 1.5)};
  for (const ProxFunction& g : gs) {
    for (int i = 0; i < 100; ++i) {
      const Vector x = rng.normal_vector(5);
      const double s = 0.2 + rng.uniform();
      const Vector p = g.prox(x, s);
      const Vector sub = (x - p) / s;
      for (int j = 0; j < 10; ++j) {
        Vector z = rng.normal_vector(5);
        if (g.kind() == ProxKind::NonNegIndicator) z = z.cwiseAbs();
        EXPECT_GE(g.value(z), g.value(p) + sub.dot(z - p) - 1e-12);
      }
    }
  }
}

TEST(ProxFunction, CompositeMatchesScalarMinimization) {
  const double w = 0.4, mu = 1.3;
  const ProxFunction g = ProxFunction::l1_sq_l2(w, mu);
  for (double z : {-3.0, -0.5, -0.1, 0.0, 0.2, 0.9, 2.5}) {
    for (double s : {0.3, 1.0, 2.0}) {
      auto obj = [&](double u) { return w * std::abs(u) + 0.5 * mu * u * u + (u - z) * (u - z) / (2.0 * s); };
      const double oracle = golden_min(obj, -10.0, 10.0);
      EXPECT_NEAR(g.prox(vec({z}), s)[0], oracle, 1e-6);
      EXPECT_NEAR(g.prox(vec({z}), s)[0], prox_l1(vec({z}), s * w)[0] / (1.0 + s * mu), 1e-15);
    }
  }
}

TEST(Moreau, HandValues) {
  const ProxFunction g = ProxFunction::l1(1.0);
  const MoreauParams p{1.0};
  EXPECT_DOUBLE_EQ(moreau_grad(g, p, vec({2.0}))[0], 1.0);
  EXPECT_DOUBLE_EQ(moreau_grad(g, p, vec({0.25}))[0], 0.25);
  EXPECT_DOUBLE_EQ(moreau_grad(g, p, vec({0.0}))[0], 0.0);
  EXPECT_THROW((void)MoreauParams{0.0}, ConfigError);
}

TEST(Moreau, EnvelopeMatchesScalarMinimization) {
  const ProxFunction g = ProxFunction::l1_sq_l2(0.5, 0.8);
  for (double gamma : {0.1, 1.0}) {
    for (double x : {-2.0, -0.3, 0.0, 0.4, 3.0}) {
      auto obj = [&](double u) { return 0.5 * std::abs(u) + 0.4 * u * u + (u - x) * (u - x) / (2.0 * gamma); };
      const double oracle = obj(golden_min(obj, -10.0, 10.0));
      EXPECT_NEAR(moreau_value(g, MoreauParams{gamma}, vec({x})), oracle, 1e-8);
    }
  }
}

TEST(Moreau, GradientIsInverseGammaLipschitz) {
  SplitMix64 rng(13);
  const ProxFunction g = ProxFunction::l1(0.6);
  const MoreauParams p{0.05};
  for (int i = 0; i < 500; ++i) {
    const Vector x = rng.normal_vector(4);
    const Vector y = rng.normal_vector(4);
    EXPECT_LE((moreau_grad(g, p, x) - moreau_grad(g, p, y)).norm(), (x - y).norm() / p.gamma + 1e-12);
  }
}
