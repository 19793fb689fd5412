#include "risjam/environment.hpp"

#include <cmath>
#include <stdexcept>

#include "risjam/agent.hpp"

namespace risjam {

std::string to_string(RisMode m) {
  switch (m) {
    case RisMode::learned: return "learned";
    case RisMode::none: return "none";
    case RisMode::oracle: return "oracle";
  }
  return "learned";
}

Eigen::VectorXd observe(const EpisodeState& state, const KinematicLimits& limits) {
  Eigen::VectorXd obs(kObservationDim);
  obs.head<3>() = (state.uav.position - state.goal) / kPositionScale;
  obs.segment<3>(3) = state.uav.velocity / limits.max_speed;
  obs[6] = std::log1p(state.metrics.sinr);
  return obs;
}

PhysicalObservation unscale_observation(const Eigen::VectorXd& obs, const KinematicLimits& limits) {
  if (obs.size() != kObservationDim) throw std::invalid_argument("unscale_observation: expected 7 entries");
  return {obs.head<3>() * kPositionScale, obs.segment<3>(3) * limits.max_speed, std::expm1(obs[6])};
}

Environment::Environment(Scenario scenario, RisMode mode) : scenario_(std::move(scenario)), mode_(mode) {
  validate(scenario_);
}

int Environment::action_dim() const {
  return mode_ == RisMode::learned ? scenario_.system.element_count() + 3 : 3;
}

LinkMetrics Environment::measure(const ChannelSnapshot& snapshot, RisPhaseVector& phases) const {
  const auto& sys = scenario_.system;
  switch (mode_) {
    case RisMode::none:
      return no_ris_metrics(snapshot, sys.tx_power, sys.jammer_power, sys.noise_power);
    case RisMode::oracle: {
      DinkelbachOptions opts;
      opts.snr_only = scenario_.run.baseline_snr_only;
      opts.seed = scenario_.run.seed;
      phases = dinkelbach_optimize(snapshot, sys.tx_power, sys.jammer_power, sys.noise_power, opts).phases;
      break;
    }
    case RisMode::learned:
      break;
  }
  return sinr(snapshot, phases, sys.tx_power, sys.jammer_power, sys.noise_power);
}

Eigen::VectorXd Environment::reset(RandomStream rng) {
  rng_.emplace(std::move(rng));
  const auto& sys = scenario_.system;
  state_ = EpisodeState{};
  state_.goal = sys.uav_goal;
  if (scenario_.run.random_goal) {
    // Goal jittered inside a box of +-50 m horizontally and +-20 m vertically.
    state_.goal += Vec3(rng_->uniform(-50.0, 50.0), rng_->uniform(-50.0, 50.0), rng_->uniform(-20.0, 20.0));
  }
  state_.uav.position = sys.uav_start;
  state_.uav.velocity = initial_velocity(sys.uav_start, state_.goal, scenario_.kinematics);
  state_.uav.slot = 0;
  state_.ris_links = sample_ris_links(sys, scenario_.channel, *rng_);
  state_.snapshot = sample_snapshot(state_.uav.position, 0, state_.ris_links, sys, scenario_.channel, *rng_);
  state_.phases = RisPhaseVector(static_cast<std::size_t>(sys.element_count()));
  state_.metrics = measure(state_.snapshot, state_.phases);
  state_.prev_distance = finishing_distance(state_.uav, state_.goal);
  return observe(state_, scenario_.kinematics);
}

StepResult Environment::step(const Eigen::VectorXd& action) {
  if (action.size() != action_dim()) {
    throw std::invalid_argument("Environment::step: action has " + std::to_string(action.size()) +
                                " entries, expected " + std::to_string(action_dim()));
  }
  const int n = mode_ == RisMode::learned ? scenario_.system.element_count() : 0;
  auto [phases, accel] = denormalize_action(action, n, scenario_.kinematics.max_accel);
  if (mode_ != RisMode::learned) phases = RisPhaseVector(static_cast<std::size_t>(scenario_.system.element_count()));
  return step(phases, accel);
}

StepResult Environment::step(const RisPhaseVector& phases, const Accel& accel) {
  if (!rng_) throw std::logic_error("Environment::step: reset() has not been called");
  if (done()) throw std::logic_error("Environment::step: episode is already done");
  const auto& sys = scenario_.system;
  const Accel a = clamp_accel(accel.value, scenario_.kinematics);
  state_.uav = risjam::step(state_.uav, a, sys.slot_length, scenario_.kinematics);
  if (scenario_.channel.ris_link_fading == RisLinkFading::per_slot) {
    state_.ris_links = sample_ris_links(sys, scenario_.channel, *rng_);
  }
  state_.snapshot =
      sample_snapshot(state_.uav.position, state_.uav.slot, state_.ris_links, sys, scenario_.channel, *rng_);
  state_.phases = mode_ == RisMode::learned ? phases : RisPhaseVector(static_cast<std::size_t>(sys.element_count()));
  if (state_.phases.size() != static_cast<std::size_t>(sys.element_count())) {
    throw std::invalid_argument("Environment::step: phase vector length does not match the RIS");
  }
  state_.metrics = measure(state_.snapshot, state_.phases);

  const double d = finishing_distance(state_.uav, state_.goal);
  StepResult r;
  r.metrics = state_.metrics;
  r.reward = step_reward(state_.metrics.rate, state_.prev_distance, d, scenario_.hyper.reward_weight);
  r.distance = d;
  state_.prev_distance = d;
  state_.cumulative_rate += state_.metrics.rate;
  state_.cumulative_reward += r.reward;
  ++state_.step;
  r.done = done();
  r.observation = observe(state_, scenario_.kinematics);
  return r;
}

}  // namespace risjam
