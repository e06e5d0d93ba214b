#include <cmath>

#include <gtest/gtest.h>

#include "iapda/bench/generators.hpp"
#include "iapda/rng.hpp"
#include "iapda/saddle.hpp"
#include "iapda/solver.hpp"
#include "scalar_reference.hpp"

using namespace iapda;

namespace {

IapdaParams scalar_params(long iters) {
  IapdaParams p;
  p.rho = 1.0;
  p.sigma = 1.0;
  p.rule = ExtrapolationRule::chambolle_dossal(3.0);
  p.scaling = ScalingPolicy::constant(1.0);
  p.inner_mode = InnerMode::ClosedForm;
  p.max_iter = iters;
  return p;
}

const SaddlePointCertificate kScalarSaddle{Vector::Zero(1), Vector::Zero(1), 0.0};

Vector one(double v) { return Vector::Constant(1, v); }

}  // namespace

TEST(ScalarOracle, FirstStepHandValues) {
  const std::vector<scalar_ref::Row> rows = scalar_ref::run({}, 1);
  const scalar_ref::Row& r = rows[1];
  EXPECT_DOUBLE_EQ(r.s, 2.25);
  EXPECT_DOUBLE_EQ(r.zeta, 3.25);
  EXPECT_DOUBLE_EQ(r.phi, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.target, 3.0 / 13.0);
  EXPECT_DOUBLE_EQ(r.x, 3.0 / 17.0);
  EXPECT_DOUBLE_EQ(r.u, -4.0 / 17.0);
  EXPECT_DOUBLE_EQ(r.lam, -4.0 / 17.0);
  EXPECT_DOUBLE_EQ(r.v, -6.0 / 17.0);
  EXPECT_DOUBLE_EQ(rows[0].energy, 1.25);
}

TEST(Iteration, StepQuantitiesMatchOracle) {
  const CompositeProblem p = bench::scalar_instance();
  const IapdaParams params = scalar_params(1);
  ScheduleState sched(params.rule, params.scaling);
  const IapdaState st = initial_state(p, sched, one(1.0), one(0.0));
  const IterationScratch sc = assemble_iteration(st, params, p);
  EXPECT_DOUBLE_EQ(sc.x_bar[0], 1.0);
  EXPECT_DOUBLE_EQ(sc.s_next, 2.25);
  EXPECT_DOUBLE_EQ(sc.zeta_next, 3.25);
  EXPECT_DOUBLE_EQ(sc.phi_next[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(sc.mu[0], 0.0);
  EXPECT_DOUBLE_EQ(sc.target_c[0], 3.0 / 13.0);
  const InnerResult inner = solve_primal_subproblem(sc, st, params, p, 1.0);
  EXPECT_NEAR(inner.x[0], 3.0 / 17.0, 1e-15);
  const DualUpdate d = dual_update(sc, inner.x, st, params, p);
  EXPECT_NEAR(d.u_next[0], -4.0 / 17.0, 1e-15);
  EXPECT_NEAR(d.lam_next[0], -4.0 / 17.0, 1e-15);
  EXPECT_NEAR(d.v_next[0], -6.0 / 17.0, 1e-15);
  EXPECT_DOUBLE_EQ(energy(st, kScalarSaddle, params, p).total, 1.25);
}

TEST(IapdaSolver, ScalarTraceMatchesOracle) {
  for (double alpha : {3.0, 4.0, 7.5}) {
    for (double beta : {0.5, 1.0}) {
      IapdaParams params = scalar_params(50);
      params.rule = ExtrapolationRule::chambolle_dossal(alpha);
      params.scaling = ScalingPolicy::constant(beta);
      params.sigma = 2.0;
      params.rho = 0.5;
      scalar_ref::Params ref;
      ref.alpha = alpha;
      ref.beta = beta;
      ref.sigma = 2.0;
      ref.rho = 0.5;
      const std::vector<scalar_ref::Row> rows = scalar_ref::run(ref, 50);
      IapdaSolver solver(bench::scalar_instance(), params);
      const MetricsTrace tr = solver.run(one(1.0), one(0.0), kScalarSaddle);
      ASSERT_EQ(tr.rows.size(), rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(tr.rows[i].k, rows[i].k);
        EXPECT_NEAR(tr.rows[i].t_k, rows[i].t_k, 1e-14);
        EXPECT_NEAR(tr.rows[i].feas_violation, rows[i].feas, 1e-14);
        EXPECT_NEAR(tr.rows[i].pd_gap, rows[i].gap, 1e-14);
        EXPECT_NEAR(tr.rows[i].energy_total, rows[i].energy, 1e-13 * std::max(1.0, rows[i].energy));
        EXPECT_NEAR(tr.rows[i].obj_residual, rows[i].obj_residual, 1e-14);
      }
      EXPECT_NEAR(tr.lambda_final[0], rows.back().lam, 1e-13);
    }
  }
}

TEST(IapdaSolver, SaddleIsFixedPoint) {
  const CompositeProblem p = bench::gen_quadratic(10, 4, 3);
  const SaddlePointCertificate s = solve_quadratic_saddle(p);
  IapdaParams params;
  params.rule = ExtrapolationRule::chambolle_dossal(4.0);
  params.scaling = ScalingPolicy::constant(1.0 / p.lipschitz_f());
  params.max_iter = 30;
  IapdaSolver solver(p, params);
  ScheduleState sched(params.rule, params.scaling);
  const IapdaState st = initial_state(p, sched, s.x_star, s.lambda_star);
  const IterationScratch sc = assemble_iteration(st, params, p);
  EXPECT_LT((sc.x_bar - s.x_star).norm(), 1e-14);
  EXPECT_LT((sc.mu - s.lambda_star).norm(), 1e-14);
  const MetricsTrace tr = solver.run(s.x_star, s.lambda_star, s);
  EXPECT_LT((tr.x_final - s.x_star).norm(), 1e-9);
  EXPECT_LT((tr.lambda_final - s.lambda_star).norm(), 1e-9);
  for (const TraceRow& r : tr.rows) EXPECT_LT(std::abs(r.energy_total), 1e-12);
}

TEST(IapdaSolver, IterationCountEdges) {
  IapdaSolver zero(bench::scalar_instance(), scalar_params(0));
  const MetricsTrace t0 = zero.run(one(1.0), one(0.0), kScalarSaddle);
  ASSERT_EQ(t0.rows.size(), 1u);
  EXPECT_EQ(t0.rows[0].k, 1);
  EXPECT_DOUBLE_EQ(t0.rows[0].energy_total, 1.25);
  EXPECT_EQ(t0.x_final[0], 1.0);

  IapdaSolver single(bench::scalar_instance(), scalar_params(1));
  const MetricsTrace t1 = single.run(one(1.0), one(0.0), kScalarSaddle);
  ASSERT_EQ(t1.rows.size(), 2u);
  EXPECT_NEAR(t1.x_final[0], 3.0 / 17.0, 1e-15);
}

TEST(IapdaSolver, VIdentityAndFiniteEnergy) {
  SplitMix64 rng(21);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const CompositeProblem p = bench::gen_quadratic(12, 5, seed);
    const SaddlePointCertificate s = solve_quadratic_saddle(p);
    IapdaParams params;
    params.rule = ExtrapolationRule::nesterov();
    params.scaling = ScalingPolicy::constant(1.0 / p.lipschitz_f());
    params.max_iter = 200;
    IapdaSolver solver(p, params);
    const MetricsTrace tr = solver.run(rng.normal_vector(12), rng.normal_vector(5), s);
    for (const TraceRow& r : tr.rows) {
      EXPECT_LT(r.v_identity_error, 1e-10);
      EXPECT_TRUE(std::isfinite(r.energy_total));
    }
  }
}

TEST(IapdaSolver, InadmissibleRuleRaisesScheduleError) {
  IapdaParams params = scalar_params(5);
  params.rule = ExtrapolationRule::custom([](long k) { return static_cast<double>(k); });
  IapdaSolver solver(bench::scalar_instance(), params);
  EXPECT_THROW(solver.run(one(1.0), one(0.0)), ScheduleError);

  IapdaParams stepped = scalar_params(5);
  stepped.scaling = ScalingPolicy::constant(2.0);
  stepped.require_step_hypothesis = true;
  IapdaSolver strict(bench::scalar_instance(), stepped);
  EXPECT_THROW(strict.run(one(1.0), one(0.0)), ScheduleError);
}

TEST(IapdaSolver, InvalidParametersThrow) {
  IapdaParams p;
  p.rho = 0.0;
  EXPECT_THROW(IapdaSolver(bench::scalar_instance(), p), ConfigError);
  p.rho = 1.0;
  p.sigma = -1.0;
  EXPECT_THROW(IapdaSolver(bench::scalar_instance(), p), ConfigError);
}

TEST(IapdaSolver, InnerFistaMatchesClosedForm) {
  const CompositeProblem p = bench::gen_quadratic(8, 4, 11);
  const SaddlePointCertificate s = solve_quadratic_saddle(p);
  IapdaParams params;
  params.rule = ExtrapolationRule::chambolle_dossal(5.0);
  params.scaling = ScalingPolicy::constant(1.0 / p.lipschitz_f());
  params.max_iter = 40;
  params.inner.subtol = 1e-13;
  params.inner.max_inner = 20000;
  params.inner_mode = InnerMode::ClosedForm;
  const Vector x1 = Vector::Ones(8);
  const Vector l1 = Vector::Zero(4);
  const MetricsTrace exact = IapdaSolver(p, params).run(x1, l1, s);
  params.inner_mode = InnerMode::Fista;
  const MetricsTrace iter = IapdaSolver(p, params).run(x1, l1, s);
  EXPECT_LT((exact.x_final - iter.x_final).norm(), 1e-8);
  EXPECT_LT((exact.lambda_final - iter.lambda_final).norm(), 1e-8);
}
