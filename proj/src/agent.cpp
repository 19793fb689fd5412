#include "risjam/agent.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace risjam {

std::string to_string(Algorithm a) { return a == Algorithm::ddpg ? "ddpg" : "td3"; }

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "ddpg") return Algorithm::ddpg;
  if (name == "td3") return Algorithm::td3;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

Eigen::MatrixXd smooth_target_actions(const Eigen::MatrixXd& target_actions, const Eigen::MatrixXd& noise,
                                      double noise_clip) {
  const Eigen::MatrixXd clipped = noise.cwiseMax(-noise_clip).cwiseMin(noise_clip);
  return (target_actions + clipped).cwiseMax(-1.0).cwiseMin(1.0);
}

std::pair<RisPhaseVector, Accel> denormalize_action(const Eigen::VectorXd& action, int element_count,
                                                    double max_accel) {
  if (action.size() != element_count + 3) {
    throw std::invalid_argument("denormalize_action: expected " + std::to_string(element_count + 3) +
                                " entries, got " + std::to_string(action.size()));
  }
  std::vector<double> phases(static_cast<std::size_t>(element_count));
  for (int n = 0; n < element_count; ++n) phases[static_cast<std::size_t>(n)] = std::numbers::pi * action[n];
  const Vec3 accel = max_accel * action.tail<3>();
  return {RisPhaseVector(std::move(phases)), Accel{accel}};
}

namespace {

std::vector<int> layer_dims(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

Eigen::MatrixXd stack(const Eigen::MatrixXd& top, const Eigen::MatrixXd& bottom) {
  Eigen::MatrixXd out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

void require_finite(double value, const char* what) {
  if (!std::isfinite(value)) throw NonFiniteError(std::string(what) + " is not finite; update aborted");
}

}  // namespace

Agent::Agent(Algorithm algorithm, int state_dim, int action_dim, const HyperParams& hyper, RandomStream& init_rng,
             const NetworkShape& shape)
    : algorithm_(algorithm), state_dim_(state_dim), action_dim_(action_dim), hyper_(hyper) {
  if (state_dim < 1 || action_dim < 1) throw std::invalid_argument("Agent: dimensions must be positive");
  actor_ = Mlp(layer_dims(state_dim, shape.actor_hidden, action_dim), Activation::relu, Activation::tanh);
  actor_.initialize(init_rng, shape.actor_output_scale);
  target_actor_ = actor_;
  const std::size_t n_critics = algorithm == Algorithm::td3 ? 2 : 1;
  for (std::size_t i = 0; i < n_critics; ++i) {
    Mlp critic(layer_dims(state_dim + action_dim, shape.critic_hidden, 1), Activation::relu, Activation::identity);
    critic.initialize(init_rng);
    critics_.push_back(critic);
    target_critics_.push_back(critic);
    critic_opts_.push_back(OptimizerState::for_network(critic, hyper.critic_lr));
  }
  actor_opt_ = OptimizerState::for_network(actor_, hyper.actor_lr);
}

Eigen::VectorXd Agent::select_action(const Eigen::VectorXd& state, ActionMode mode, RandomStream& rng) const {
  if (state.size() != state_dim_) throw std::invalid_argument("select_action: state dimension mismatch");
  Eigen::VectorXd action = actor_.forward(state);
  if (mode == ActionMode::explore) {
    const double stddev = std::sqrt(hyper_.exploration_noise_var);
    for (Eigen::Index i = 0; i < action.size(); ++i) action[i] += stddev * rng.normal();
    action = action.cwiseMax(-1.0).cwiseMin(1.0);
  }
  return action;
}

Eigen::VectorXd Agent::random_action(RandomStream& rng) const {
  Eigen::VectorXd action(action_dim_);
  for (Eigen::Index i = 0; i < action.size(); ++i) action[i] = rng.uniform(-1.0, 1.0);
  return action;
}

Eigen::VectorXd Agent::critic_targets(const Batch& batch, RandomStream* rng) const {
  Eigen::MatrixXd next_actions = target_actor_.forward(batch.next_states);
  Eigen::VectorXd bootstrap;
  if (algorithm_ == Algorithm::td3) {
    if (!rng) throw std::invalid_argument("critic_targets: TD3 needs a random stream for target smoothing");
    const double stddev = std::sqrt(hyper_.policy_noise_var);
    Eigen::MatrixXd noise(next_actions.rows(), next_actions.cols());
    for (Eigen::Index c = 0; c < noise.cols(); ++c) {
      for (Eigen::Index r = 0; r < noise.rows(); ++r) noise(r, c) = stddev * rng->normal();
    }
    next_actions = smooth_target_actions(next_actions, noise, hyper_.noise_clip);
    const Eigen::MatrixXd input = stack(batch.next_states, next_actions);
    const Eigen::RowVectorXd q1 = target_critics_[0].forward(input);
    const Eigen::RowVectorXd q2 = target_critics_[1].forward(input);
    bootstrap = q1.cwiseMin(q2).transpose();
  } else {
    bootstrap = target_critics_[0].forward(stack(batch.next_states, next_actions)).transpose();
  }
  return batch.rewards + hyper_.discount * batch.not_terminal.cwiseProduct(bootstrap);
}

double Agent::regress_critics(const Batch& batch, const Eigen::VectorXd& targets) {
  const Eigen::MatrixXd input = stack(batch.states, batch.actions);
  const double n = static_cast<double>(batch.size());
  std::vector<Gradients> grads;
  double loss_sum = 0.0;
  for (auto& critic : critics_) {
    ForwardCache cache;
    const Eigen::RowVectorXd q = critic.forward(input, cache);
    const Eigen::RowVectorXd err = q - targets.transpose();
    const double loss = err.squaredNorm() / n;
    require_finite(loss, "critic loss");
    loss_sum += loss;
    grads.push_back(critic.backward(cache, (2.0 / n) * err));
  }
  // All gradients are checked before any network moves.
  for (const auto& g : grads) {
    for (const auto& layer : g.layers) {
      if (!layer.weight.allFinite() || !layer.bias.allFinite()) {
        throw NonFiniteError("critic gradient is not finite; update aborted");
      }
    }
  }
  for (std::size_t i = 0; i < critics_.size(); ++i) apply_update(critics_[i], grads[i], critic_opts_[i]);
  return loss_sum / static_cast<double>(critics_.size());
}

double Agent::improve_actor(const Batch& batch) {
  const double n = static_cast<double>(batch.size());
  ForwardCache actor_cache;
  const Eigen::MatrixXd actions = actor_.forward(batch.states, actor_cache);
  ForwardCache critic_cache;
  const Eigen::RowVectorXd q = critics_[0].forward(stack(batch.states, actions), critic_cache);
  const double objective = q.mean();
  require_finite(objective, "actor objective");
  const Eigen::MatrixXd dq = critics_[0].backward(critic_cache, Eigen::RowVectorXd::Constant(q.size(), 1.0 / n),
                                                  /*parameter_grads=*/false).input;
  // Ascent on Q is descent on -Q.
  const Gradients g = actor_.backward(actor_cache, -dq.bottomRows(action_dim_));
  apply_update(actor_, g, actor_opt_);
  ++actor_updates_;
  return objective;
}

void Agent::update_targets(bool include_actor) {
  if (include_actor) soft_update(target_actor_, actor_, hyper_.tau_actor);
  for (std::size_t i = 0; i < critics_.size(); ++i) soft_update(target_critics_[i], critics_[i], hyper_.tau_critic);
}

UpdateDiagnostics Agent::ddpg_update(const Batch& batch) {
  if (algorithm_ != Algorithm::ddpg) throw std::logic_error("ddpg_update called on a TD3 agent");
  if (batch.size() == 0) throw std::invalid_argument("ddpg_update: empty batch");
  UpdateDiagnostics d;
  d.critic_loss = regress_critics(batch, critic_targets(batch, nullptr));
  ++critic_updates_;
  d.actor_objective = improve_actor(batch);
  d.actor_updated = true;
  update_targets(true);
  return d;
}

UpdateDiagnostics Agent::td3_update(const Batch& batch, RandomStream& rng) {
  if (algorithm_ != Algorithm::td3) throw std::logic_error("td3_update called on a DDPG agent");
  if (batch.size() == 0) throw std::invalid_argument("td3_update: empty batch");
  UpdateDiagnostics d;
  d.critic_loss = regress_critics(batch, critic_targets(batch, &rng));
  ++critic_updates_;
  if (critic_updates_ % hyper_.policy_delay == 0) {
    d.actor_objective = improve_actor(batch);
    d.actor_updated = true;
    update_targets(true);
  }
  return d;
}

UpdateDiagnostics Agent::update(const Batch& batch, RandomStream& rng) {
  return algorithm_ == Algorithm::td3 ? td3_update(batch, rng) : ddpg_update(batch);
}

nlohmann::json Agent::to_json() const {
  nlohmann::json critics = nlohmann::json::array();
  nlohmann::json targets = nlohmann::json::array();
  nlohmann::json opts = nlohmann::json::array();
  for (std::size_t i = 0; i < critics_.size(); ++i) {
    critics.push_back(risjam::to_json(critics_[i]));
    targets.push_back(risjam::to_json(target_critics_[i]));
    opts.push_back(risjam::to_json(critic_opts_[i]));
  }
  return {{"algorithm", to_string(algorithm_)},
          {"state_dim", state_dim_},
          {"action_dim", action_dim_},
          {"hyper",
           {{"discount", hyper_.discount},
            {"actor_lr", hyper_.actor_lr},
            {"critic_lr", hyper_.critic_lr},
            {"tau_actor", hyper_.tau_actor},
            {"tau_critic", hyper_.tau_critic},
            {"exploration_noise_var", hyper_.exploration_noise_var},
            {"policy_noise_var", hyper_.policy_noise_var},
            {"noise_clip", hyper_.noise_clip},
            {"policy_delay", hyper_.policy_delay}}},
          {"actor", risjam::to_json(actor_)},
          {"target_actor", risjam::to_json(target_actor_)},
          {"critics", critics},
          {"target_critics", targets},
          {"actor_optimizer", risjam::to_json(actor_opt_)},
          {"critic_optimizers", opts},
          {"critic_updates", critic_updates_},
          {"actor_updates", actor_updates_}};
}

Agent Agent::from_json(const nlohmann::json& j) {
  Agent a;
  a.algorithm_ = algorithm_from_string(j.at("algorithm"));
  a.state_dim_ = j.at("state_dim");
  a.action_dim_ = j.at("action_dim");
  const auto& h = j.at("hyper");
  a.hyper_.discount = h.at("discount");
  a.hyper_.actor_lr = h.at("actor_lr");
  a.hyper_.critic_lr = h.at("critic_lr");
  a.hyper_.tau_actor = h.at("tau_actor");
  a.hyper_.tau_critic = h.at("tau_critic");
  a.hyper_.exploration_noise_var = h.at("exploration_noise_var");
  a.hyper_.policy_noise_var = h.at("policy_noise_var");
  a.hyper_.noise_clip = h.at("noise_clip");
  a.hyper_.policy_delay = h.at("policy_delay");
  a.actor_ = mlp_from_json(j.at("actor"));
  a.target_actor_ = mlp_from_json(j.at("target_actor"));
  for (const auto& c : j.at("critics")) a.critics_.push_back(mlp_from_json(c));
  for (const auto& c : j.at("target_critics")) a.target_critics_.push_back(mlp_from_json(c));
  a.actor_opt_ = optimizer_from_json(j.at("actor_optimizer"));
  for (const auto& o : j.at("critic_optimizers")) a.critic_opts_.push_back(optimizer_from_json(o));
  a.critic_updates_ = j.at("critic_updates");
  a.actor_updates_ = j.at("actor_updates");

  const std::size_t expected = a.algorithm_ == Algorithm::td3 ? 2 : 1;
  if (a.critics_.size() != expected || a.target_critics_.size() != expected || a.critic_opts_.size() != expected) {
    throw std::runtime_error("checkpoint critic count does not match algorithm " + to_string(a.algorithm_));
  }
  if (a.actor_.input_dim() != a.state_dim_ || a.actor_.output_dim() != a.action_dim_) {
    throw std::runtime_error("checkpoint actor shape does not match its declared dimensions");
  }
  return a;
}

}  // namespace risjam
