#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "iapda/bench/generators.hpp"
#include "iapda/dynamics.hpp"
#include "iapda/saddle.hpp"

using namespace iapda;

namespace {

const SaddlePointCertificate kScalarSaddle{Vector::Zero(1), Vector::Zero(1), 0.0};

OdeState scalar_state(double x) {
  return {Vector::Constant(1, x), Vector::Zero(1), Vector::Zero(1), Vector::Zero(1)};
}

OdeConfig short_config() {
  OdeConfig c;
  c.rho = 0.0;
  c.t_end = 2.0;
  c.step_h = 0.01;
  return c;
}

}  // namespace

TEST(OdeRhs, ScalarHandValues) {
  const OdeAccel a = ode_rhs(1.0, scalar_state(1.0), short_config(), bench::scalar_instance());
  EXPECT_DOUBLE_EQ(a.xddot[0], -1.0);
  EXPECT_DOUBLE_EQ(a.lamddot[0], 1.0);
  OdeConfig c = short_config();
  c.rho = 1.0;
  EXPECT_DOUBLE_EQ(ode_rhs(1.0, scalar_state(1.0), c, bench::scalar_instance()).xddot[0], -2.0);
}

TEST(OdeRhs, VanishesAtSaddle) {
  const CompositeProblem p = bench::gen_quadratic(6, 3, 2);
  const SaddlePointCertificate s = solve_quadratic_saddle(p);
  const OdeState st{s.x_star, Vector::Zero(6), s.lambda_star, Vector::Zero(3)};
  const OdeAccel a = ode_rhs(2.5, st, short_config(), p);
  EXPECT_LT(a.xddot.norm(), 1e-10);
  EXPECT_LT(a.lamddot.norm(), 1e-10);
}

TEST(ContinuousEnergy, HandValueAndZeroAtSaddle) {
  const CompositeProblem p = bench::scalar_instance();
  EXPECT_DOUBLE_EQ(continuous_energy(1.0, scalar_state(1.0), short_config(), p, kScalarSaddle), 0.625);
  EXPECT_EQ(continuous_energy(4.0, scalar_state(0.0), short_config(), p, kScalarSaddle), 0.0);
}

TEST(Rk4, FourthOrderOnHarmonicOscillator) {
  auto rhs = [](double, const Vector& y) {
    Vector d(2);
    d << y[1], -y[0];
    return d;
  };
  auto error = [&](double h) {
    Vector y(2);
    y << 1.0, 0.0;
    const long steps = std::lround(1.0 / h);
    for (long i = 0; i < steps; ++i) y = rk4_step(rhs, i * h, y, h);
    return std::abs(y[0] - std::cos(1.0));
  };
  const double ratio = error(0.02) / error(0.01);
  EXPECT_NEAR(ratio, 16.0, 1.0);
}

TEST(Integrate, SaddleStartStaysPut) {
  const Trajectory tr = integrate(short_config(), bench::scalar_instance(), scalar_state(0.0), kScalarSaddle);
  EXPECT_FALSE(tr.aborted);
  ASSERT_EQ(tr.records.size(), 101u);
  for (const TrajectoryRecord& r : tr.records) {
    EXPECT_EQ(r.state.x[0], 0.0);
    EXPECT_EQ(r.energy, 0.0);
  }
  EXPECT_NEAR(tr.records.back().t, 2.0, 1e-12);
}

TEST(Integrate, EnergyDecaysOnScalarProblem) {
  OdeConfig c;
  c.alpha = 4.0;
  c.beta_p = 0.5;
  c.t_end = 10.0;
  c.step_h = 1e-3;
  c.output_stride = 10;
  const Trajectory tr = integrate(c, bench::scalar_instance(), scalar_state(1.0), kScalarSaddle);
  ASSERT_FALSE(tr.aborted);
  for (std::size_t i = 1; i < tr.records.size(); ++i)
    EXPECT_LE(tr.records[i].energy, tr.records[i - 1].energy + 1e-9);
  EXPECT_LT(tr.records.back().gap, tr.records.front().gap);
}

TEST(OdeConfig, ValidationErrors) {
  OdeConfig c;
  c.alpha = 2.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = OdeConfig{};
  c.beta_p = 1.0;  // alpha = 3 allows p = 0 only
  EXPECT_THROW(c.validate(), ConfigError);
  c = OdeConfig{};
  c.t_end = 0.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = OdeConfig{};
  c.step_h = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = OdeConfig{};
  c.output_stride = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = OdeConfig{};
  EXPECT_THROW(integrate(c, bench::scalar_instance(),
                         OdeState{Vector::Zero(2), Vector::Zero(2), Vector::Zero(1), Vector::Zero(1)}),
               DimensionError);
}

TEST(Trajectory, CsvWriters) {
  OdeConfig c = short_config();
  c.t_end = 1.02;
  const Trajectory tr = integrate(c, bench::scalar_instance(), scalar_state(1.0), kScalarSaddle);
  std::ostringstream traj, state;
  write_trajectory_csv(traj, tr);
  write_state_csv(state, tr);
  EXPECT_EQ(traj.str().substr(0, traj.str().find('\n')), "t,gap,feas,energy,gap_unsmoothed,obj_residual");
  EXPECT_EQ(state.str().substr(0, state.str().find('\n')), "t,x0,xdot0,lam0,lamdot0");
  std::istringstream lines(state.str());
  std::string line;
  long count = 0;
  while (std::getline(lines, line)) ++count;
  EXPECT_EQ(count, 4);
  EXPECT_NE(state.str().find("\n1,1,0,0,0\n"), std::string::npos);
}
