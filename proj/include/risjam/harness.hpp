#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "risjam/agent.hpp"
#include "risjam/config.hpp"
#include "risjam/environment.hpp"

namespace risjam {

/// What gets trained: the two proposed learners and the two baselines
/// (TD3 without an RIS; TD3 trajectory with perfect-CSI Dinkelbach phases).
enum class TrainAlgorithm { ddpg, td3, td3_no_ris, td3_csi_baseline };

std::string to_string(TrainAlgorithm a);
TrainAlgorithm train_algorithm_from_string(const std::string& name);
Algorithm learner_of(TrainAlgorithm a);
RisMode ris_mode_of(TrainAlgorithm a);

struct EpisodeRecord {
  int episode = 0;  // 1-based
  double reward = 0.0;
  double running_average = 0.0;
  double cumulative_rate = 0.0;
  double finishing_distance = 0.0;
  double critic_loss = 0.0;  // mean over the episode's updates, 0 without updates
};

struct TrainOptions {
  std::uint64_t seed = 0;
  std::optional<int> episodes;  // overrides the scenario's episode count
  std::string checkpoint_path;  // empty: no checkpoints
  std::optional<int> checkpoint_interval;
  NetworkShape shape;
  std::function<void(const EpisodeRecord&)> on_episode;
};

struct TrainResult {
  Agent agent;
  TrainAlgorithm algorithm;
  std::vector<EpisodeRecord> episodes;
  bool aborted = false;
  std::string abort_reason;
};

/// r_bar_i = (1/i) sum_{j <= i} r_j.
std::vector<double> running_average(std::span<const double> values);

/// Runs episodes x steps of interaction and learning. A non-finite training
/// signal stops the run (aborted = true); the last periodic checkpoint on
/// disk is left as the last good state.
TrainResult train(const Scenario& scenario, TrainAlgorithm algorithm, const TrainOptions& options);

struct TraceRow {
  int t = 0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double sinr = 0.0;
  double rate = 0.0;
  double reward = 0.0;
  double distance = 0.0;
};

struct EpisodeOutcome {
  double cumulative_rate = 0.0;
  double mean_rate = 0.0;
  double cumulative_reward = 0.0;
  double finishing_distance = 0.0;
};

/// Plays one episode with the noise-free policy.
EpisodeOutcome rollout(const Agent& agent, const Scenario& scenario, RisMode mode, RandomStream rng,
                       std::vector<TraceRow>* trace = nullptr);

struct EvalReport {
  std::string algorithm;
  std::uint64_t seed = 0;
  int episodes = 0;
  double mean_rate = 0.0;  // per-slot rate, averaged over episodes
  double rate_stddev = 0.0;
  double mean_cumulative_rate = 0.0;
  double cumulative_rate_stddev = 0.0;
  double mean_finishing_distance = 0.0;
  double finishing_distance_stddev = 0.0;
  std::vector<EpisodeOutcome> outcomes;
};

/// Deterministic policy rollouts, episode i drawing from (seed, "eval/<i>").
/// The parallel and serial paths give identical reports.
EvalReport evaluate(const Agent& agent, const Scenario& scenario, TrainAlgorithm algorithm, int n_episodes,
                    std::uint64_t seed, bool parallel = true);
EvalReport evaluate_serial(const Agent& agent, const Scenario& scenario, TrainAlgorithm algorithm, int n_episodes,
                           std::uint64_t seed);

struct CdfPoint {
  double value = 0.0;
  double probability = 0.0;
};

/// Empirical CDF; one point per distinct value, (v_(k), k/n).
std::vector<CdfPoint> cdf(std::span<const double> values);

double mean_of(std::span<const double> values);
/// Sample standard deviation (n - 1); 0 for fewer than two values.
double sample_stddev(std::span<const double> values);

struct SweepRow {
  double mission_time = 0.0;
  double mean_rate = 0.0;
  double rate_stddev = 0.0;
  double mean_finishing_distance = 0.0;
  double finishing_distance_stddev = 0.0;
  std::vector<EpisodeOutcome> outcomes;
};

struct SweepOptions {
  std::uint64_t seed = 0;
  std::optional<int> episodes;
  int eval_episodes = 500;
  NetworkShape shape;
};

/// One train + evaluate cycle per mission duration.
std::vector<SweepRow> sweep_mission_duration(const Scenario& scenario, std::span<const double> durations,
                                             TrainAlgorithm algorithm, const SweepOptions& options);

struct CheckpointMeta {
  TrainAlgorithm algorithm = TrainAlgorithm::td3;
  int episode = 0;
  std::uint64_t seed = 0;
  std::string rng_label;
  std::string config_hash;
};

inline constexpr int kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const Agent& agent, const CheckpointMeta& meta);
std::pair<Agent, CheckpointMeta> load_checkpoint(const std::string& path);

/// Throws std::runtime_error when the agent does not fit the scenario.
void check_compatible(const Agent& agent, const Scenario& scenario, TrainAlgorithm algorithm);

}  // namespace risjam
