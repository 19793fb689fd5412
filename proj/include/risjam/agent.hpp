#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "risjam/config.hpp"
#include "risjam/kinematics.hpp"
#include "risjam/neural.hpp"
#include "risjam/radio_link.hpp"
#include "risjam/replay_buffer.hpp"

namespace risjam {

enum class Algorithm { ddpg, td3 };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

enum class ActionMode { explore, exploit };

/// Hidden widths. The defaults are the published actor (64-128-64) and
/// critic (64-128) sizes.
struct NetworkShape {
  std::vector<int> actor_hidden{64, 128, 64};
  std::vector<int> critic_hidden{64, 128};
  /// Final actor layer is drawn from U(-scale, scale) so tanh starts unsaturated.
  double actor_output_scale = 3e-3;
};

struct UpdateDiagnostics {
  double critic_loss = 0.0;       // mean over critics, before the step
  double actor_objective = 0.0;   // mean Q(s, mu(s)); valid when actor_updated
  bool actor_updated = false;
};

/// The TD3 smoothed target action clip(mu'(s') + clip(noise, -c, c), -1, 1).
Eigen::MatrixXd smooth_target_actions(const Eigen::MatrixXd& target_actions, const Eigen::MatrixXd& noise,
                                      double noise_clip);

/// Splits a normalised action in [-1, 1]^(N+3) into RIS phases (scaled by pi,
/// +pi wrapping to -pi) and an acceleration (scaled by max_accel).
std::pair<RisPhaseVector, Accel> denormalize_action(const Eigen::VectorXd& action, int element_count,
                                                    double max_accel);

/// DDPG or TD3 learner: online and target actor, one or two critics with
/// their targets, and the optimiser state for each trained network.
class Agent {
 public:
  Agent(Algorithm algorithm, int state_dim, int action_dim, const HyperParams& hyper, RandomStream& init_rng,
        const NetworkShape& shape = {});

  Algorithm algorithm() const { return algorithm_; }
  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }

  /// exploit: raw actor output. explore: adds N(0, exploration_noise_var)
  /// per entry and clips to [-1, 1].
  Eigen::VectorXd select_action(const Eigen::VectorXd& state, ActionMode mode, RandomStream& rng) const;
  Eigen::VectorXd random_action(RandomStream& rng) const;

  /// Bellman targets y_i. DDPG bootstraps from the single target critic;
  /// TD3 smooths the target action with `rng` and takes the smaller of the
  /// two target critics.
  Eigen::VectorXd critic_targets(const Batch& batch, RandomStream* rng) const;

  UpdateDiagnostics update(const Batch& batch, RandomStream& rng);
  UpdateDiagnostics ddpg_update(const Batch& batch);
  UpdateDiagnostics td3_update(const Batch& batch, RandomStream& rng);

  const Mlp& actor() const { return actor_; }
  const Mlp& target_actor() const { return target_actor_; }
  std::size_t critic_count() const { return critics_.size(); }
  const Mlp& critic(std::size_t i) const { return critics_.at(i); }
  const Mlp& target_critic(std::size_t i) const { return target_critics_.at(i); }
  Mlp& mutable_actor() { return actor_; }
  Mlp& mutable_target_actor() { return target_actor_; }
  Mlp& mutable_critic(std::size_t i) { return critics_.at(i); }
  Mlp& mutable_target_critic(std::size_t i) { return target_critics_.at(i); }
  const HyperParams& hyper() const { return hyper_; }

  long critic_updates() const { return critic_updates_; }
  long actor_updates() const { return actor_updates_; }

  nlohmann::json to_json() const;
  static Agent from_json(const nlohmann::json& j);

 private:
  Agent() = default;
  double regress_critics(const Batch& batch, const Eigen::VectorXd& targets);
  double improve_actor(const Batch& batch);
  void update_targets(bool include_actor);

  Algorithm algorithm_ = Algorithm::ddpg;
  int state_dim_ = 0;
  int action_dim_ = 0;
  HyperParams hyper_;
  Mlp actor_;
  Mlp target_actor_;
  std::vector<Mlp> critics_;
  std::vector<Mlp> target_critics_;
  OptimizerState actor_opt_;
  std::vector<OptimizerState> critic_opts_;
  long critic_updates_ = 0;
  long actor_updates_ = 0;
};

}  // namespace risjam
