#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>

#include "risjam/channel.hpp"
#include "risjam/config.hpp"
#include "risjam/kinematics.hpp"
#include "risjam/radio_link.hpp"
#include "risjam/ris_oracle.hpp"

namespace risjam {

/// How the RIS phases of each slot are chosen.
enum class RisMode {
  learned,  // phases are part of the action (dim N + 3)
  none,     // no RIS at all; action is the acceleration only
  oracle,   // perfect-CSI Dinkelbach phases every slot; action is the acceleration only
};

std::string to_string(RisMode m);

inline constexpr int kObservationDim = 7;
inline constexpr double kPositionScale = 100.0;

struct EpisodeState {
  UavState uav;
  Vec3 goal = Vec3::Zero();
  RisLinks ris_links;
  ChannelSnapshot snapshot;
  RisPhaseVector phases;
  LinkMetrics metrics;  // of the last completed slot (reset: theta = 0 probe)
  double prev_distance = 0.0;
  double cumulative_rate = 0.0;
  double cumulative_reward = 0.0;
  int step = 0;
};

struct StepResult {
  Eigen::VectorXd observation;
  double reward = 0.0;
  bool done = false;
  LinkMetrics metrics;
  double distance = 0.0;  // finishing distance after the step
};

/// Network input [ (q - qF)/100, V/v_max, log1p(sinr) ].
Eigen::VectorXd observe(const EpisodeState& state, const KinematicLimits& limits);

/// Inverse of observe: relative position (m), velocity (m/s) and linear SINR.
struct PhysicalObservation {
  Vec3 relative_position;
  Vec3 velocity;
  double sinr = 0.0;
};
PhysicalObservation unscale_observation(const Eigen::VectorXd& obs, const KinematicLimits& limits);

/// Fixed-length episodic environment over the kinematic, channel and link models.
class Environment {
 public:
  explicit Environment(Scenario scenario, RisMode mode = RisMode::learned);

  int state_dim() const { return kObservationDim; }
  int action_dim() const;
  RisMode mode() const { return mode_; }
  const Scenario& scenario() const { return scenario_; }

  /// Starts an episode; all randomness of the episode comes from `rng`.
  Eigen::VectorXd reset(RandomStream rng);
  /// Applies a normalised action in [-1, 1]^action_dim.
  StepResult step(const Eigen::VectorXd& action);
  /// Applies physical phases and acceleration. Phases are ignored outside
  /// RisMode::learned.
  StepResult step(const RisPhaseVector& phases, const Accel& accel);

  const EpisodeState& state() const { return state_; }
  bool done() const { return state_.step >= scenario_.hyper.steps_per_episode; }

 private:
  LinkMetrics measure(const ChannelSnapshot& snapshot, RisPhaseVector& phases) const;

  Scenario scenario_;
  RisMode mode_;
  EpisodeState state_;
  std::optional<RandomStream> rng_;
};

}  // namespace risjam
