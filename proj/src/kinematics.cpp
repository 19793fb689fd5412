#include "risjam/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace risjam {

Accel clamp_accel(const Vec3& raw, const KinematicLimits& limits) {
  const double a = limits.max_accel;
  return Accel{raw.cwiseMax(Vec3::Constant(-a)).cwiseMin(Vec3::Constant(a))};
}

namespace {

Vec3 horizontal_unit(const std::optional<Vec3>& heading) {
  if (heading) {
    const Vec3 h(heading->x(), heading->y(), 0.0);
    const double n = h.norm();
    if (n > 0.0) return h / n;
  }
  return Vec3::UnitX();
}

}  // namespace

ProjectedVelocity project(const Vec3& raw, const KinematicLimits& limits,
                          const std::optional<Vec3>& heading) {
  ProjectedVelocity out{raw, false};
  const double speed = raw.norm();
  if (speed == 0.0) {
    if (heading && heading->norm() > 0.0) {
      // The heading is itself a projected velocity, so it is pitch-feasible.
      out.velocity = limits.min_speed * heading->normalized();
    } else {
      out.velocity = limits.min_speed * Vec3::UnitX();
      out.degenerate = true;
    }
    return out;
  }

  const double sin_p = std::sin(limits.max_pitch);
  const double cos_p = std::cos(limits.max_pitch);
  Vec3 v = raw;
  const double horizontal = std::hypot(v.x(), v.y());
  const double vertical = std::abs(v.z());
  if (vertical > sin_p * speed) {
    const Vec3 dir = horizontal > 0.0 ? Vec3(v.x() / horizontal, v.y() / horizontal, 0.0)
                                      : horizontal_unit(heading);
    // Projection of (horizontal, vertical) onto the ray (cos_p, sin_p).
    const double length = horizontal * cos_p + vertical * sin_p;
    v = length * cos_p * dir;
    v.z() = std::copysign(length * sin_p, raw.z());
  }

  const double n = v.norm();
  if (n > limits.max_speed) {
    v *= limits.max_speed / n;
  } else if (n < limits.min_speed) {
    v *= limits.min_speed / n;
  }
  out.velocity = v;
  return out;
}

UavState step(const UavState& state, const Accel& accel, double slot_length,
              const KinematicLimits& limits) {
  UavState next;
  next.position = state.position + state.velocity * slot_length +
                  0.5 * accel.value * slot_length * slot_length;
  const Vec3 raw = state.velocity + accel.value * slot_length;
  next.velocity = project(raw, limits, state.velocity).velocity;
  next.slot = state.slot + 1;
  return next;
}

double finishing_distance(const UavState& state, const Vec3& goal) {
  return (state.position - goal).norm();
}

bool velocity_feasible(const Vec3& v, const KinematicLimits& limits, double slack) {
  const double n = v.norm();
  if (n < limits.min_speed * (1.0 - slack) || n > limits.max_speed * (1.0 + slack)) return false;
  return std::abs(v.z()) <= std::sin(limits.max_pitch) * n * (1.0 + slack);
}

Vec3 initial_velocity(const Vec3& start, const Vec3& goal, const KinematicLimits& limits) {
  const Vec3 d = goal - start;
  const Vec3 dir = d.norm() > 0.0 ? Vec3(d.normalized()) : Vec3(Vec3::UnitX());
  return project(limits.min_speed * dir, limits).velocity;
}

}  // namespace risjam
