#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace risjam {

using Vec3 = Eigen::Vector3d;

/// Thrown for malformed documents and for invariant violations. The message
/// always names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

enum class RisLinkFading { per_episode, per_slot };

struct ScenarioConfig {
  Vec3 bs_position{0.0, 0.0, 0.0};
  Vec3 jammer_position{-25.0, -25.0, 0.0};
  Vec3 ris_reference{50.0, 50.0, 30.0};
  int ris_rows = 4;  // n_y
  int ris_cols = 5;  // n_x
  Vec3 uav_start{-200.0, -100.0, 5.0};
  Vec3 uav_goal{100.0, 60.0, 50.0};
  double mission_time = 30.0;
  double slot_length = 0.1;
  int slot_count = 300;
  // Transmit and jammer powers are not given by the published scenario;
  // 0.1 W (20 dBm) is an invented default.
  double tx_power = 0.1;
  double jammer_power = 0.1;
  double noise_power = 1.2589254117941662e-20;  // -169 dBm
  double element_spacing_ratio = 0.5;

  int element_count() const { return ris_rows * ris_cols; }
};

struct KinematicLimits {
  double max_accel = 2.0;
  double max_speed = 40.0;
  double min_speed = 2.0;
  double max_pitch = 0.7853981633974483;  // 45 deg
};

struct ChannelParams {
  double ref_path_loss = 1e-3;  // -30 dB at 1 m
  double exponent_direct = 3.5;
  double exponent_ris = 2.8;
  double rician_xi1 = 1.0;
  double rician_xi2 = 4.4;
  double rician_ris = 1.9952623149688795;  // 3 dB
  RisLinkFading ris_link_fading = RisLinkFading::per_episode;
};

struct HyperParams {
  double discount = 0.99;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double tau_actor = 5e-3;
  double tau_critic = 5e-3;
  int replay_capacity = 100000;
  int episodes = 3000;
  int steps_per_episode = 300;
  int batch_size = 128;
  double exploration_noise_var = 0.2;
  double policy_noise_var = 0.2;
  double noise_clip = 0.5;
  int policy_delay = 2;
  double reward_weight = 1.0;
  int warmup_random_steps = 1000;
  bool mask_time_limit = false;
};

struct RunOptions {
  std::uint64_t seed = 0;
  bool random_goal = false;
  bool baseline_snr_only = false;
  int eval_episodes = 500;
  int checkpoint_interval = 100;
};

/// Everything a run needs; immutable once loaded.
struct Scenario {
  ScenarioConfig system;
  KinematicLimits kinematics;
  ChannelParams channel;
  HyperParams hyper;
  RunOptions run;

  bool operator==(const Scenario& other) const;
};

/// Built-in defaults (the published system and training tables).
Scenario default_scenario();

/// Parses an INI-style document. Missing keys keep their defaults; unknown
/// keys, bad units and violated invariants raise ConfigError.
Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::string& path);

/// Applies RISJAM_SEED from the environment, if set.
void apply_env_overrides(Scenario& scenario);

/// Throws ConfigError naming the first violated invariant.
void validate(const Scenario& scenario);

/// Canonical text form; load_scenario(to_text(s)) == s.
std::string to_text(const Scenario& scenario);

/// FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const Scenario& scenario);

/// Returns a copy with a new mission time; slot count and steps follow.
Scenario with_mission_time(const Scenario& scenario, double mission_time);

}  // namespace risjam
