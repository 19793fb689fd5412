#include "risjam/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "risjam/replay_buffer.hpp"

namespace risjam {

std::string to_string(TrainAlgorithm a) {
  switch (a) {
    case TrainAlgorithm::ddpg: return "ddpg";
    case TrainAlgorithm::td3: return "td3";
    case TrainAlgorithm::td3_no_ris: return "td3-no-ris";
    case TrainAlgorithm::td3_csi_baseline: return "td3-csi-baseline";
  }
  return "td3";
}

TrainAlgorithm train_algorithm_from_string(const std::string& name) {
  if (name == "ddpg") return TrainAlgorithm::ddpg;
  if (name == "td3") return TrainAlgorithm::td3;
  if (name == "td3-no-ris") return TrainAlgorithm::td3_no_ris;
  if (name == "td3-csi-baseline") return TrainAlgorithm::td3_csi_baseline;
  throw std::invalid_argument("unknown algorithm '" + name + "' (ddpg, td3, td3-no-ris, td3-csi-baseline)");
}

Algorithm learner_of(TrainAlgorithm a) { return a == TrainAlgorithm::ddpg ? Algorithm::ddpg : Algorithm::td3; }

RisMode ris_mode_of(TrainAlgorithm a) {
  switch (a) {
    case TrainAlgorithm::td3_no_ris: return RisMode::none;
    case TrainAlgorithm::td3_csi_baseline: return RisMode::oracle;
    default: return RisMode::learned;
  }
}

std::vector<double> running_average(std::span<const double> values) {
  std::vector<double> out;
  out.reserve(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    out.push_back(sum / static_cast<double>(i + 1));
  }
  return out;
}

double mean_of(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

void check_compatible(const Agent& agent, const Scenario& scenario, TrainAlgorithm algorithm) {
  const int expected_action =
      ris_mode_of(algorithm) == RisMode::learned ? scenario.system.element_count() + 3 : 3;
  if (agent.state_dim() != kObservationDim || agent.action_dim() != expected_action) {
    throw std::runtime_error("agent dimensions (state " + std::to_string(agent.state_dim()) + ", action " +
                             std::to_string(agent.action_dim()) + ") do not match the scenario (state " +
                             std::to_string(kObservationDim) + ", action " + std::to_string(expected_action) + ")");
  }
  if (agent.algorithm() != learner_of(algorithm)) {
    throw std::runtime_error("agent is " + to_string(agent.algorithm()) + " but " + to_string(algorithm) +
                             " was requested");
  }
}

TrainResult train(const Scenario& base, TrainAlgorithm algorithm, const TrainOptions& options) {
  Scenario scenario = base;
  if (options.episodes) scenario.hyper.episodes = *options.episodes;
  validate(scenario);
  const auto& hyper = scenario.hyper;

  Environment env(scenario, ris_mode_of(algorithm));
  RandomStream init_rng = rng_stream(options.seed, "init");
  TrainResult result{Agent(learner_of(algorithm), env.state_dim(), env.action_dim(), hyper, init_rng, options.shape),
                     algorithm, {}, false, {}};
  Agent& agent = result.agent;
  ReplayBuffer buffer(static_cast<std::size_t>(hyper.replay_capacity), env.state_dim(), env.action_dim());
  RandomStream explore_rng = rng_stream(options.seed, "explore");
  RandomStream replay_rng = rng_stream(options.seed, "replay");
  RandomStream smoothing_rng = rng_stream(options.seed, "target-smoothing");

  const int interval = options.checkpoint_interval.value_or(scenario.run.checkpoint_interval);
  const std::string hash = config_hash(scenario);
  long total_steps = 0;
  double reward_sum = 0.0;

  try {
    for (int episode = 1; episode <= hyper.episodes; ++episode) {
      Eigen::VectorXd obs = env.reset(rng_stream(options.seed, "env/episode/" + std::to_string(episode)));
      double loss_sum = 0.0;
      int updates = 0;
      for (int t = 0; t < hyper.steps_per_episode; ++t) {
        const Eigen::VectorXd action = total_steps < hyper.warmup_random_steps
                                           ? agent.random_action(explore_rng)
                                           : agent.select_action(obs, ActionMode::explore, explore_rng);
        const StepResult step = env.step(action);
        const bool terminal = step.done && hyper.mask_time_limit;
        buffer.push({obs, action, step.reward, step.observation, terminal});
        obs = step.observation;
        ++total_steps;
        if (buffer.size() >= static_cast<std::size_t>(hyper.batch_size)) {
          const Batch batch = buffer.sample(static_cast<std::size_t>(hyper.batch_size), replay_rng);
          loss_sum += agent.update(batch, smoothing_rng).critic_loss;
          ++updates;
        }
      }
      const auto& st = env.state();
      EpisodeRecord rec;
      rec.episode = episode;
      rec.reward = st.cumulative_reward;
      reward_sum += rec.reward;
      rec.running_average = reward_sum / episode;
      rec.cumulative_rate = st.cumulative_rate;
      rec.finishing_distance = finishing_distance(st.uav, st.goal);
      rec.critic_loss = updates > 0 ? loss_sum / updates : 0.0;
      if (!std::isfinite(rec.reward)) throw NonFiniteError("episode reward is not finite");
      result.episodes.push_back(rec);
      if (options.on_episode) options.on_episode(rec);
      if (!options.checkpoint_path.empty() && (episode % interval == 0 || episode == hyper.episodes)) {
        save_checkpoint(options.checkpoint_path, agent,
                        {algorithm, episode, options.seed, "env/episode/" + std::to_string(episode), hash});
      }
    }
  } catch (const NonFiniteError& e) {
    result.aborted = true;
    result.abort_reason = e.what();
  }
  return result;
}

EpisodeOutcome rollout(const Agent& agent, const Scenario& scenario, RisMode mode, RandomStream rng,
                       std::vector<TraceRow>* trace) {
  Environment env(scenario, mode);
  Eigen::VectorXd obs = env.reset(std::move(rng));
  if (trace) {
    const auto& st = env.state();
    trace->push_back({0, st.uav.position, st.uav.velocity, st.metrics.sinr, st.metrics.rate, 0.0, st.prev_distance});
  }
  while (!env.done()) {
    const StepResult r = env.step(Eigen::VectorXd(agent.actor().forward(obs)));
    obs = r.observation;
    if (trace) {
      const auto& st = env.state();
      trace->push_back({st.step, st.uav.position, st.uav.velocity, r.metrics.sinr, r.metrics.rate, r.reward,
                        r.distance});
    }
  }
  const auto& st = env.state();
  EpisodeOutcome out;
  out.cumulative_rate = st.cumulative_rate;
  out.mean_rate = st.cumulative_rate / st.step;
  out.cumulative_reward = st.cumulative_reward;
  out.finishing_distance = finishing_distance(st.uav, st.goal);
  return out;
}

namespace {

EvalReport summarize(std::vector<EpisodeOutcome> outcomes, TrainAlgorithm algorithm, std::uint64_t seed) {
  EvalReport report;
  report.algorithm = to_string(algorithm);
  report.seed = seed;
  report.episodes = static_cast<int>(outcomes.size());
  std::vector<double> rates, cumulative, distances;
  for (const auto& o : outcomes) {
    rates.push_back(o.mean_rate);
    cumulative.push_back(o.cumulative_rate);
    distances.push_back(o.finishing_distance);
  }
  report.mean_rate = mean_of(rates);
  report.rate_stddev = sample_stddev(rates);
  report.mean_cumulative_rate = mean_of(cumulative);
  report.cumulative_rate_stddev = sample_stddev(cumulative);
  report.mean_finishing_distance = mean_of(distances);
  report.finishing_distance_stddev = sample_stddev(distances);
  report.outcomes = std::move(outcomes);
  return report;
}

std::string eval_label(int episode) { return "eval/" + std::to_string(episode); }

}  // namespace

EvalReport evaluate_serial(const Agent& agent, const Scenario& scenario, TrainAlgorithm algorithm, int n_episodes,
                           std::uint64_t seed) {
  check_compatible(agent, scenario, algorithm);
  std::vector<EpisodeOutcome> outcomes;
  for (int i = 0; i < n_episodes; ++i) {
    outcomes.push_back(rollout(agent, scenario, ris_mode_of(algorithm), rng_stream(seed, eval_label(i))));
  }
  return summarize(std::move(outcomes), algorithm, seed);
}

EvalReport evaluate(const Agent& agent, const Scenario& scenario, TrainAlgorithm algorithm, int n_episodes,
                    std::uint64_t seed, bool parallel) {
  if (n_episodes < 1) throw std::invalid_argument("evaluate: need at least one episode");
  if (!parallel) return evaluate_serial(agent, scenario, algorithm, n_episodes, seed);
  check_compatible(agent, scenario, algorithm);
  std::vector<EpisodeOutcome> outcomes(static_cast<std::size_t>(n_episodes));
  const RisMode mode = ris_mode_of(algorithm);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n_episodes; ++i) {
    outcomes[static_cast<std::size_t>(i)] = rollout(agent, scenario, mode, rng_stream(seed, eval_label(i)));
  }
  return summarize(std::move(outcomes), algorithm, seed);
}

std::vector<CdfPoint> cdf(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("cdf: empty value list");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<CdfPoint> out;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    out.push_back({sorted[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

std::vector<SweepRow> sweep_mission_duration(const Scenario& scenario, std::span<const double> durations,
                                             TrainAlgorithm algorithm, const SweepOptions& options) {
  std::vector<SweepRow> rows;
  for (double duration : durations) {
    const Scenario sc = with_mission_time(scenario, duration);
    TrainOptions topts;
    topts.seed = options.seed;
    topts.episodes = options.episodes;
    topts.shape = options.shape;
    const TrainResult trained = train(sc, algorithm, topts);
    if (trained.aborted) throw std::runtime_error("sweep: training aborted at T=" + std::to_string(duration) + ": " +
                                                  trained.abort_reason);
    const EvalReport report = evaluate(trained.agent, sc, algorithm, options.eval_episodes, options.seed);
    SweepRow row;
    row.mission_time = duration;
    row.mean_rate = report.mean_rate;
    row.rate_stddev = report.rate_stddev;
    row.mean_finishing_distance = report.mean_finishing_distance;
    row.finishing_distance_stddev = report.finishing_distance_stddev;
    row.outcomes = report.outcomes;
    rows.push_back(std::move(row));
  }
  return rows;
}

void save_checkpoint(const std::string& path, const Agent& agent, const CheckpointMeta& meta) {
  nlohmann::json doc = {{"format", "risjam-checkpoint"},
                        {"version", kCheckpointVersion},
                        {"code_version", RISJAM_VERSION},
                        {"train_algorithm", to_string(meta.algorithm)},
                        {"episode", meta.episode},
                        {"seed", meta.seed},
                        {"rng_label", meta.rng_label},
                        {"config_hash", meta.config_hash},
                        {"agent", agent.to_json()}};
  // Write-then-rename keeps the previous checkpoint intact on failure.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write checkpoint '" + tmp + "'");
    out << doc.dump(1) << '\n';
    if (!out) throw std::runtime_error("failed writing checkpoint '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw std::runtime_error("cannot move checkpoint to '" + path + "'");
}

std::pair<Agent, CheckpointMeta> load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("checkpoint '" + path + "' is not valid JSON: " + e.what());
  }
  if (doc.value("format", "") != "risjam-checkpoint") throw std::runtime_error("'" + path + "' is not a checkpoint");
  if (doc.at("version").get<int>() != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " + doc.at("version").dump());
  }
  CheckpointMeta meta;
  meta.algorithm = train_algorithm_from_string(doc.at("train_algorithm"));
  meta.episode = doc.at("episode");
  meta.seed = doc.at("seed");
  meta.rng_label = doc.at("rng_label");
  meta.config_hash = doc.at("config_hash");
  return {Agent::from_json(doc.at("agent")), meta};
}

}  // namespace risjam
