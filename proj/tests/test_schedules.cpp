#include <cmath>

#include <gtest/gtest.h>

#include "iapda/schedules.hpp"

using namespace iapda;

TEST(Nesterov, FirstTerms) {
  const ExtrapolationRule r = ExtrapolationRule::nesterov();
  EXPECT_EQ(r.first(), 1.0);
  const double t2 = next_t(r, 1, 1.0);
  EXPECT_NEAR(t2, (1.0 + std::sqrt(5.0)) / 2.0, 1e-15);
  EXPECT_NEAR(next_t(r, 2, t2), 2.1935, 1e-4);
}

TEST(Nesterov, RelationIsTightAndGrowsLinearly) {
  const ExtrapolationRule r = ExtrapolationRule::nesterov();
  double t = r.first();
  for (long k = 1; k < 2000; ++k) {
    EXPECT_GE(t, (static_cast<double>(k) + 1.0) / 2.0 - 1e-12);
    const double tn = next_t(r, k, t);
    EXPECT_NEAR(tn * tn - tn - t * t, 0.0, rule_slack_tolerance(tn));
    t = tn;
  }
  EXPECT_TRUE(validate_rule(r, 2000).pass);
}

TEST(ChambolleDossal, ClosedForm) {
  const ExtrapolationRule r = ExtrapolationRule::chambolle_dossal(3.0);
  EXPECT_EQ(r.first(), 1.0);
  EXPECT_EQ(*r.closed_form(3), 2.0);
  EXPECT_EQ(next_t(r, 2, 1.5), 2.0);
  const ExtrapolationRule r5 = ExtrapolationRule::chambolle_dossal(5.0);
  for (long k = 1; k < 500; ++k) {
    const double t = *r5.closed_form(k);
    const double tn = *r5.closed_form(k + 1);
    EXPECT_LE(tn * tn - tn - t * t, 0.0);
    EXPECT_GE(t, static_cast<double>(k) / 4.0);
  }
  const RuleCertificate c = validate_rule(r5, 500);
  EXPECT_TRUE(c.pass);
  EXPECT_NEAR(c.tau_hat, (1.0 + 499.0 / 4.0) / 500.0, 1e-15);
}

TEST(AttouchCabot, ShiftedStartAndConstantSlack) {
  const ExtrapolationRule r = ExtrapolationRule::attouch_cabot(3.0);
  EXPECT_EQ(r.attouch_cabot_offset(), 4);
  EXPECT_EQ(r.first(), 1.5);
  double t = r.first();
  for (long k = 1; k < 100; ++k) {
    const double tn = next_t(r, k, t);
    EXPECT_NEAR(tn * tn - tn - t * t, -0.25, 1e-12);
    t = tn;
  }
  EXPECT_TRUE(validate_rule(r, 100).pass);
}

TEST(Rules, AlphaBelowThreeThrows) {
  EXPECT_THROW(ExtrapolationRule::chambolle_dossal(2.5), ConfigError);
  EXPECT_THROW(ExtrapolationRule::attouch_cabot(2.9), ConfigError);
}

TEST(Rules, CustomInadmissibleSequenceFails) {
  const ExtrapolationRule r = ExtrapolationRule::custom([](long k) { return static_cast<double>(k); }, "linear");
  const RuleCertificate c = validate_rule(r, 10);
  EXPECT_FALSE(c.pass);
  EXPECT_EQ(c.first_failure, 1);
  EXPECT_DOUBLE_EQ(c.failure_slack, 1.0);

  const ExtrapolationRule down = ExtrapolationRule::custom([](long k) { return k == 1 ? 2.0 : 1.0; });
  const RuleCertificate d = validate_rule(down, 5);
  EXPECT_FALSE(d.pass);
  EXPECT_FALSE(d.monotone);
  EXPECT_THROW(validate_rule(down, 1), ConfigError);
}

TEST(BetaFactor, HandValues) {
  EXPECT_DOUBLE_EQ(beta_upper_factor(1.0, 1.5), 4.0 / 3.0);
  EXPECT_EQ(beta_upper_factor(1.0, 1.0), std::numeric_limits<double>::infinity());
}

TEST(NextBeta, GrowthIsClampedByFactor) {
  const ScalingPolicy grow = ScalingPolicy::power_growth(1.0, 1.0);
  EXPECT_DOUBLE_EQ(next_beta(grow, 1.0, 4.0 / 3.0, 1), 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(next_beta(grow, 1.0, 10.0, 1), 2.0);
  EXPECT_DOUBLE_EQ(next_beta(ScalingPolicy::constant(0.5), 0.5, 2.0, 7), 0.5);
  EXPECT_THROW(next_beta(grow, 0.0, 2.0, 1), ConfigError);
  EXPECT_THROW(ScalingPolicy::constant(-1.0), ConfigError);
  EXPECT_THROW(ScalingPolicy::power_growth(1.0, -0.5), ConfigError);
}

TEST(ScheduleState, NesterovKeepsBetaConstant) {
  ScheduleState s(ExtrapolationRule::nesterov(), ScalingPolicy::power_growth(1.0, 2.0));
  for (int i = 0; i < 200; ++i) {
    EXPECT_TRUE(s.admissible());
    EXPECT_NEAR(s.beta_cur(), 1.0, 1e-12);
    s.advance();
  }
  EXPECT_EQ(s.k(), 201);
}

TEST(ScheduleState, PowerGrowthStaysAdmissible) {
  ScheduleState s(ExtrapolationRule::chambolle_dossal(6.0), ScalingPolicy::power_growth(1e-4, 2.0));
  double prev = s.beta_cur();
  for (int i = 0; i < 1000; ++i) {
    EXPECT_TRUE(s.admissible());
    EXPECT_LE(s.rule_slack(), rule_slack_tolerance(s.t_next()));
    s.advance();
    EXPECT_GE(s.beta_cur(), prev);
    prev = s.beta_cur();
  }
  EXPECT_GT(s.beta_cur(), 1e-4 * 100.0);
}

TEST(ScheduleState, StartsAtIterationOne) {
  ScheduleState s(ExtrapolationRule::chambolle_dossal(3.0), ScalingPolicy::constant(2.0));
  EXPECT_EQ(s.k(), 1);
  EXPECT_EQ(s.t_cur(), 1.0);
  EXPECT_EQ(s.t_next(), 1.5);
  EXPECT_EQ(s.beta_prev(), 2.0);
  EXPECT_EQ(s.beta_cur(), 2.0);
}
