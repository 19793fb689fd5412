#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "risjam/radio_link.hpp"
#include "risjam/rng.hpp"

using namespace risjam;
using std::numbers::pi;

namespace {
const Complex I{0.0, 1.0};

ChannelSnapshot unit_snapshot() {
  ChannelSnapshot s;
  s.h_bu = s.h_ju = 1.0;
  s.h_ru = s.h_br = s.h_jr = ComplexVector::Ones(1);
  return s;
}
}  // namespace

TEST(RadioLink, WrapPhase) {
  EXPECT_DOUBLE_EQ(wrap_phase(pi), -pi);
  EXPECT_DOUBLE_EQ(wrap_phase(-pi), -pi);
  EXPECT_NEAR(wrap_phase(3 * pi / 2), -pi / 2, 1e-15);
  EXPECT_NEAR(wrap_phase(-7.0), -7.0 + 2 * pi, 1e-15);
  RandomStream rng(1, "wrap");
  for (int i = 0; i < 10000; ++i) {
    const double w = wrap_phase(rng.uniform(-100, 100));
    ASSERT_GE(w, -pi);
    ASSERT_LT(w, pi);
  }
}

TEST(RadioLink, EffectiveGain) {
  const ComplexVector one = ComplexVector::Ones(1);
  EXPECT_EQ(effective_gain(1.0, one, RisPhaseVector(1), one), Complex(2.0, 0.0));
  ComplexVector hx(3);
  hx << Complex(1, 2), Complex(-0.5, 0.1), Complex(0, -3);
  const Complex g = effective_gain(0.25, ComplexVector::Ones(3), RisPhaseVector(3), hx);
  EXPECT_NEAR(std::abs(g - (0.25 + hx.sum())), 0.0, 1e-15);
  EXPECT_THROW(effective_gain(0.0, one, RisPhaseVector(2), one), std::invalid_argument);
}

TEST(RadioLink, TwoElementGridOptimum) {
  ComplexVector h_ru(2), h_x(2);
  h_ru << 1.0, I;
  h_x << 1.0, 1.0;
  double best = 0.0, best_t1 = 0.0, best_t2 = 0.0;
  for (int a = 0; a < 360; ++a) {
    for (int b = 0; b < 360; ++b) {
      const double t1 = -pi + a * pi / 180, t2 = -pi + b * pi / 180;
      const double g = std::abs(effective_gain(0.0, h_ru, RisPhaseVector({t1, t2}), h_x));
      if (g > best) best = g, best_t1 = t1, best_t2 = t2;
    }
  }
  EXPECT_NEAR(best, 2.0, 1e-9);
  EXPECT_NEAR(wrap_phase(best_t1 - (best_t2 - pi / 2)), 0.0, 1e-9);
}

TEST(RadioLink, SinrAndRate) {
  const auto m = sinr(unit_snapshot(), RisPhaseVector(1), 1.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(m.sinr, 0.8);
  EXPECT_DOUBLE_EQ(m.rate, std::log2(1.8));
  EXPECT_NEAR(m.rate, 0.8480, 5e-5);
  EXPECT_DOUBLE_EQ(m.desired_power, 4.0);
  EXPECT_DOUBLE_EQ(m.interference_power, 4.0);
}

TEST(RadioLink, JammerFreeNoRisIsSnr) {
  ChannelSnapshot s;
  s.h_bu = Complex(0.3, -0.4);
  s.h_ju = Complex(2.0, 0.0);
  s.h_ru = ComplexVector::Ones(2);
  s.h_br = s.h_jr = ComplexVector::Zero(2);
  const auto m = sinr(s, RisPhaseVector(2), 2.0, 0.0, 0.5);
  EXPECT_DOUBLE_EQ(m.sinr, 2.0 * 0.25 / 0.5);
}

TEST(RadioLink, GlobalPhaseInvariance) {
  RandomStream rng(4, "phase");
  ComplexVector h_ru(4), h_x(4);
  for (int i = 0; i < 4; ++i) h_ru[i] = rng.complex_normal(), h_x[i] = rng.complex_normal();
  std::vector<double> t(4);
  for (auto& v : t) v = rng.uniform(-pi, pi);
  const double base = std::abs(effective_gain(0.0, h_ru, RisPhaseVector(t), h_x));
  for (double shift : {0.3, -1.7, 2.9}) {
    auto u = t;
    for (auto& v : u) v += shift;
    EXPECT_NEAR(std::abs(effective_gain(0.0, h_ru, RisPhaseVector(u), h_x)), base, 1e-12);
  }
}

TEST(RadioLink, RateMonotonicity) {
  auto s = unit_snapshot();
  double prev = -1.0;
  for (double pt : {0.5, 1.0, 2.0, 4.0}) {
    const double r = sinr(s, RisPhaseVector(1), pt, 1.0, 1.0).rate;
    EXPECT_GT(r, prev);
    prev = r;
  }
  prev = 1e9;
  for (double pj : {0.5, 1.0, 2.0, 4.0}) {
    const double r = sinr(s, RisPhaseVector(1), 1.0, pj, 1.0).rate;
    EXPECT_LT(r, prev);
    prev = r;
  }
}

TEST(RadioLink, StepReward) {
  EXPECT_DOUBLE_EQ(step_reward(1.3, 50.0, 50.0, 1.0), 1.3);
  EXPECT_DOUBLE_EQ(step_reward(1.0, 100.0, 90.0, 1.0), 11.0);
  EXPECT_LT(step_reward(1.0, 90.0, 100.0, 1.0), 1.0);
}
