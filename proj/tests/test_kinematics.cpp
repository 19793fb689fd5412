#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "risjam/kinematics.hpp"
#include "risjam/rng.hpp"

using namespace risjam;

namespace {

KinematicLimits limits() { return KinematicLimits{2.0, 40.0, 2.0, std::numbers::pi / 4}; }

// Brute-force nearest feasible velocity in the vertical plane through v's
// horizontal heading (the feasible set is rotationally symmetric about z).
Vec3 brute_force_projection(const Vec3& v, const KinematicLimits& lim, const Vec3& fallback_heading) {
  Vec3 h(v.x(), v.y(), 0.0);
  if (h.norm() == 0.0) h = Vec3(fallback_heading.x(), fallback_heading.y(), 0.0);
  h.normalize();
  Vec3 best = Vec3::Zero();
  double best_d = 1e300;
  const int na = 4000, nr = 4000;
  for (int i = 0; i <= na; ++i) {
    const double ang = -lim.max_pitch + 2.0 * lim.max_pitch * i / na;
    for (int j = 0; j <= nr; ++j) {
      const double r = lim.min_speed + (lim.max_speed - lim.min_speed) * j / nr;
      const Vec3 u = r * (std::cos(ang) * h + std::sin(ang) * Vec3::UnitZ());
      const double d = (u - v).squaredNorm();
      if (d < best_d) best_d = d, best = u;
    }
  }
  return best;
}

}  // namespace

TEST(Kinematics, ClampAccel) {
  const auto lim = limits();
  EXPECT_EQ(clamp_accel(Vec3(3, 0, -5), lim).value, Vec3(2, 0, -2));
  EXPECT_EQ(clamp_accel(Vec3::Zero(), lim).value, Vec3::Zero());
  EXPECT_EQ(clamp_accel(Vec3(1.9, -1.9, 2.0), lim).value, Vec3(1.9, -1.9, 2.0));
}

TEST(Kinematics, StepIntegratesExactly) {
  UavState s{Vec3::Zero(), Vec3(10, 0, 0), 0};
  const UavState n = step(s, Accel{Vec3(2, 0, 0)}, 0.1, limits());
  EXPECT_NEAR(n.position.x(), 1.01, 1e-15);
  EXPECT_NEAR(n.velocity.x(), 10.2, 1e-15);
  EXPECT_EQ(n.slot, 1);
}

TEST(Kinematics, ZeroAccelCruise) {
  UavState s{Vec3(1, 2, 3), Vec3(3, 4, 2), 5};
  const UavState n = step(s, Accel{}, 0.1, limits());
  EXPECT_EQ(n.velocity, s.velocity);
  EXPECT_TRUE(n.position.isApprox(Vec3(1.3, 2.4, 3.2), 1e-15));
}

TEST(Kinematics, SlowVelocityLiftedToMinimumSpeed) {
  const UavState s{Vec3::Zero(), Vec3(0.5, 0, 0), 0};
  const UavState n = step(s, Accel{}, 0.1, limits());
  EXPECT_NEAR(n.velocity.norm(), 2.0, 1e-15);
  EXPECT_NEAR(n.velocity.normalized().dot(Vec3::UnitX()), 1.0, 1e-15);
}

TEST(Kinematics, FastVelocityScaledDown) {
  const Vec3 v = Vec3(30, 40, 0);
  const Vec3 p = project(v, limits()).velocity;
  EXPECT_NEAR(p.norm(), 40.0, 1e-12);
  EXPECT_NEAR(p.normalized().dot(v.normalized()), 1.0, 1e-15);
}

TEST(Kinematics, VerticalVelocityClippedToPitch) {
  const auto lim = limits();
  const Vec3 v(0, 0, 10);
  const Vec3 p = project(v, lim).velocity;
  EXPECT_NEAR(p.z() / p.norm(), std::sin(lim.max_pitch), 1e-12);
  const Vec3 oracle = brute_force_projection(v, lim, Vec3::UnitX());
  EXPECT_LT((p - oracle).norm(), 0.02);
}

TEST(Kinematics, ProjectionMatchesBruteForce) {
  const auto lim = limits();
  RandomStream rng(4, "kin/proj");
  for (int k = 0; k < 25; ++k) {
    const Vec3 v(rng.normal(0, 25), rng.normal(0, 25), rng.normal(0, 25));
    const Vec3 p = project(v, lim).velocity;
    const Vec3 oracle = brute_force_projection(v, lim, Vec3::UnitX());
    EXPECT_LT((p - oracle).norm(), 0.03) << v.transpose();
    EXPECT_LE((p - v).norm(), (oracle - v).norm() + 1e-9);
  }
}

TEST(Kinematics, FeasibleUnchanged) {
  const Vec3 v(10, -5, 3);
  EXPECT_EQ(project(v, limits()).velocity, v);
}

TEST(Kinematics, ZeroVelocity) {
  const auto lim = limits();
  const auto none = project(Vec3::Zero(), lim);
  EXPECT_TRUE(none.degenerate);
  EXPECT_EQ(none.velocity, Vec3(2, 0, 0));
  const auto with = project(Vec3::Zero(), lim, Vec3(0, -3, 0));
  EXPECT_FALSE(with.degenerate);
  EXPECT_TRUE(with.velocity.isApprox(Vec3(0, -2, 0)));
}

TEST(Kinematics, RandomStepsStayFeasibleAndIdempotent) {
  const auto lim = limits();
  RandomStream rng(8, "kin/random");
  for (int k = 0; k < 100000; ++k) {
    UavState s{Vec3::Zero(), project(Vec3(rng.normal(0, 20), rng.normal(0, 20), rng.normal(0, 20)), lim).velocity, 0};
    const Accel a = clamp_accel(Vec3(rng.uniform(-6, 6), rng.uniform(-6, 6), rng.uniform(-6, 6)), lim);
    const UavState n = step(s, a, 0.1, lim);
    const double speed = n.velocity.norm();
    ASSERT_LE(speed, lim.max_speed * (1 + 1e-12));
    ASSERT_GE(speed, lim.min_speed * (1 - 1e-12));
    ASSERT_LE(std::abs(n.velocity.z()) / speed, std::sin(lim.max_pitch) + 1e-12);
    const Vec3 again = project(n.velocity, lim).velocity;
    ASSERT_LE((again - n.velocity).norm(), 1e-12 * speed);
  }
}

TEST(Kinematics, TwoHalfStepsEqualOneStep) {
  const auto lim = limits();
  const UavState s{Vec3(5, -3, 20), Vec3(12, 4, 1), 0};
  const Accel a{Vec3(1.5, -0.5, 0.2)};
  const UavState one = step(s, a, 0.2, lim);
  const UavState two = step(step(s, a, 0.1, lim), a, 0.1, lim);
  EXPECT_LT((one.position - two.position).norm(), 1e-9);
  EXPECT_LT((one.velocity - two.velocity).norm(), 1e-9);
}

TEST(Kinematics, FinishingDistance) {
  EXPECT_DOUBLE_EQ(finishing_distance(UavState{Vec3(3, 4, 0)}, Vec3::Zero()), 5.0);
  EXPECT_DOUBLE_EQ(finishing_distance(UavState{Vec3(1, 1, 1)}, Vec3(1, 1, 1)), 0.0);
  EXPECT_NEAR(finishing_distance(UavState{Vec3(-200, -100, 5)}, Vec3(100, 60, 50)),
              std::sqrt(300.0 * 300 + 160 * 160 + 45 * 45), 1e-12);
  EXPECT_NEAR(std::sqrt(300.0 * 300 + 160 * 160 + 45 * 45), 342.97, 0.005);
}

TEST(Kinematics, InitialVelocityPointsAtGoal) {
  const Vec3 v = initial_velocity(Vec3(-200, -100, 5), Vec3(100, 60, 50), limits());
  EXPECT_NEAR(v.norm(), 2.0, 1e-12);
  EXPECT_NEAR(v.normalized().dot(Vec3(300, 160, 45).normalized()), 1.0, 1e-12);
}
