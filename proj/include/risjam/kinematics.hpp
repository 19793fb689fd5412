#pragma once

#include <optional>

#include "risjam/config.hpp"

namespace risjam {

struct UavState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  int slot = 0;
};

/// Per-axis bounded acceleration.
struct Accel {
  Vec3 value = Vec3::Zero();
};

struct ProjectedVelocity {
  Vec3 velocity;
  /// Set when the input was the zero vector and no heading was available.
  bool degenerate = false;
};

/// Clips each component into [-max_accel, max_accel].
Accel clamp_accel(const Vec3& raw, const KinematicLimits& limits);

/// Repairs a velocity so that it satisfies the pitch and speed constraints.
///
/// The pitch constraint |v_z| <= sin(max_pitch) * |v| is a cone around the
/// horizontal plane; an infeasible vector is replaced by its Euclidean
/// projection onto that cone, which keeps the horizontal heading and the sign
/// of the vertical component. The result is then scaled radially into
/// [min_speed, max_speed]. A zero input becomes min_speed along `heading`
/// (or +x, flagged degenerate, when no heading is known). A purely vertical
/// input has no horizontal heading of its own and borrows the horizontal part
/// of `heading`, falling back to +x.
ProjectedVelocity project(const Vec3& raw, const KinematicLimits& limits,
                          const std::optional<Vec3>& heading = std::nullopt);

/// Advances one slot: exact constant-acceleration integration of position,
/// then velocity repair. The previous velocity serves as the fallback heading.
UavState step(const UavState& state, const Accel& accel, double slot_length,
              const KinematicLimits& limits);

double finishing_distance(const UavState& state, const Vec3& goal);

/// True when |a_i| <= max_accel, speed in bounds and pitch in bounds, each
/// up to `slack` (relative for the speed and pitch checks).
bool velocity_feasible(const Vec3& v, const KinematicLimits& limits, double slack = 1e-12);

/// Minimum-speed velocity pointing from start toward goal.
Vec3 initial_velocity(const Vec3& start, const Vec3& goal, const KinematicLimits& limits);

}  // namespace risjam
