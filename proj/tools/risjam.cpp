// Command-line front end: training, evaluation, sweeps, baselines, plot
// export and the oracle suite.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "risjam/config.hpp"
#include "risjam/harness.hpp"
#include "risjam/report_io.hpp"
#include "risjam/verification.hpp"

namespace fs = std::filesystem;
using namespace risjam;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
};

Scenario load(const Common& c) {
  Scenario s = c.config_path.empty() ? default_scenario() : load_scenario_file(c.config_path);
  apply_env_overrides(s);
  if (c.seed) s.run.seed = *c.seed;
  return s;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_path, "INI scenario file (built-in defaults when omitted)")
      ->check(CLI::ExistingFile);
  app->add_option("-s,--seed", c.seed, "Master seed (overrides run.seed and RISJAM_SEED)");
}

std::string join(const fs::path& dir, const std::string& name) { return (dir / name).string(); }

void write_eval_outputs(const fs::path& out, const EvalReport& report) {
  write_text(join(out, "eval.csv"), eval_csv(report));
  write_text(join(out, "eval.json"), to_json(report).dump(2) + "\n");
  write_text(join(out, "distance_cdf.svg"), render_svg(distance_cdf_plot({report})));
  write_text(join(out, "rate_vs_distance.svg"), render_svg(rate_distance_plot({report})));
}

void print_eval(const EvalReport& r) {
  std::printf("%s: %d episodes, mean rate %.6g (sd %.3g) bit/s/Hz, finishing distance %.4g m (sd %.3g)\n",
              r.algorithm.c_str(), r.episodes, r.mean_rate, r.rate_stddev, r.mean_finishing_distance,
              r.finishing_distance_stddev);
}

TrainResult run_training(const Scenario& sc, TrainAlgorithm algo, std::optional<int> episodes, const fs::path& out,
                         bool quiet) {
  fs::create_directories(out);
  TrainOptions opts;
  opts.seed = sc.run.seed;
  opts.episodes = episodes;
  opts.checkpoint_path = join(out, "checkpoint.json");
  const int total = episodes.value_or(sc.hyper.episodes);
  opts.on_episode = [&](const EpisodeRecord& e) {
    if (!quiet && (e.episode % 10 == 0 || e.episode == total)) {
      std::printf("episode %d/%d reward %.4f average %.4f distance %.2f\n", e.episode, total, e.reward,
                  e.running_average, e.finishing_distance);
      std::fflush(stdout);
    }
  };
  TrainResult result = train(sc, algo, opts);
  const MetricsFile metrics{{RISJAM_VERSION, config_hash(sc), sc.run.seed, to_string(algo)}, result.episodes};
  write_text(join(out, "metrics.csv"), metrics_csv(metrics));
  write_text(join(out, "reward.svg"), render_svg(reward_curve_plot({metrics}, false)));
  write_text(join(out, "average_reward.svg"), render_svg(reward_curve_plot({metrics}, true)));
  write_text(join(out, "config.ini"), to_text(sc));
  if (result.aborted) std::fprintf(stderr, "training aborted: %s\n", result.abort_reason.c_str());
  return result;
}

std::vector<double> parse_durations(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  if (out.empty()) throw CLI::ValidationError("--durations", "empty list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS-assisted anti-jamming UAV trajectory planning with DDPG/TD3"};
  app.set_version_flag("--version", RISJAM_VERSION);
  app.require_subcommand(1);

  Common common;
  std::string algorithm = "td3";
  std::optional<int> episodes;
  std::string out_dir = "out";
  std::string checkpoint;
  std::optional<int> eval_episodes;
  std::string trace_path;
  std::string durations = "5,10,15,20,25,30,35,40";
  std::string baseline_kind = "no-ris";
  std::vector<std::string> metrics_files, eval_files;
  bool quiet = false;

  auto* config_cmd = app.add_subcommand("config", "Print the canonical scenario (defaults merged with --config)");
  add_common(config_cmd, common);

  auto* train_cmd = app.add_subcommand("train", "Train an agent; writes metrics.csv, checkpoint.json and plots");
  add_common(train_cmd, common);
  train_cmd->add_option("-a,--algorithm", algorithm, "ddpg | td3 | td3-no-ris | td3-csi-baseline")
      ->capture_default_str();
  train_cmd->add_option("-e,--episodes", episodes, "Episode count (default: training.episodes)");
  train_cmd->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
  train_cmd->add_flag("-q,--quiet", quiet, "No per-episode progress");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint with the noise-free policy");
  add_common(eval_cmd, common);
  eval_cmd->add_option("-k,--checkpoint", checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("-n,--episodes", eval_episodes, "Test episodes (default: run.eval_episodes)");
  eval_cmd->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
  eval_cmd->add_option("--trace", trace_path, "Write a per-step CSV trace of test episode 0");

  auto* sweep_cmd = app.add_subcommand("sweep", "Train and evaluate for each mission duration");
  add_common(sweep_cmd, common);
  sweep_cmd->add_option("-a,--algorithm", algorithm, "Algorithm")->capture_default_str();
  sweep_cmd->add_option("-d,--durations", durations, "Comma-separated mission durations (s)")
      ->capture_default_str();
  sweep_cmd->add_option("-e,--episodes", episodes, "Training episodes per duration");
  sweep_cmd->add_option("-n,--eval-episodes", eval_episodes, "Test episodes per duration");
  sweep_cmd->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();

  auto* base_cmd = app.add_subcommand("baseline", "Train and evaluate a baseline (no-ris or perfect-CSI)");
  add_common(base_cmd, common);
  base_cmd->add_option("-b,--kind", baseline_kind, "no-ris | csi")->capture_default_str()
      ->check(CLI::IsMember({"no-ris", "csi"}));
  base_cmd->add_option("-e,--episodes", episodes, "Training episodes");
  base_cmd->add_option("-n,--eval-episodes", eval_episodes, "Test episodes");
  base_cmd->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
  base_cmd->add_flag("-q,--quiet", quiet, "No per-episode progress");

  auto* export_cmd = app.add_subcommand("export", "Combine metrics and eval CSVs into comparison plots");
  export_cmd->add_option("-m,--metrics", metrics_files, "metrics.csv files")->check(CLI::ExistingFile);
  export_cmd->add_option("-r,--eval", eval_files, "eval.csv files")->check(CLI::ExistingFile);
  export_cmd->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();

  auto* verify_cmd = app.add_subcommand("verify", "Run the oracle checks; nonzero exit on any failure");
  add_common(verify_cmd, common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*config_cmd) {
      std::cout << to_text(load(common));
      return 0;
    }
    if (*train_cmd) {
      const Scenario sc = load(common);
      const TrainResult r = run_training(sc, train_algorithm_from_string(algorithm), episodes, out_dir, quiet);
      return r.aborted ? 3 : 0;
    }
    if (*eval_cmd) {
      const Scenario sc = load(common);
      auto [agent, meta] = load_checkpoint(checkpoint);
      if (meta.config_hash != config_hash(sc))
        std::fprintf(stderr, "note: checkpoint was trained under config %s, evaluating under %s\n",
                     meta.config_hash.c_str(), config_hash(sc).c_str());
      fs::create_directories(out_dir);
      const EvalReport report =
          evaluate(agent, sc, meta.algorithm, eval_episodes.value_or(sc.run.eval_episodes), sc.run.seed);
      write_eval_outputs(out_dir, report);
      if (!trace_path.empty()) {
        std::vector<TraceRow> trace;
        rollout(agent, sc, ris_mode_of(meta.algorithm), rng_stream(sc.run.seed, "eval/0"), &trace);
        write_text(trace_path, trace_csv(trace));
      }
      print_eval(report);
      return 0;
    }
    if (*sweep_cmd) {
      const Scenario sc = load(common);
      SweepOptions opts;
      opts.seed = sc.run.seed;
      opts.episodes = episodes;
      opts.eval_episodes = eval_episodes.value_or(sc.run.eval_episodes);
      const auto algo = train_algorithm_from_string(algorithm);
      const auto rows = sweep_mission_duration(sc, parse_durations(durations), algo, opts);
      fs::create_directories(out_dir);
      write_text(join(out_dir, "sweep.csv"), sweep_csv(rows));
      write_text(join(out_dir, "sweep.json"), to_json(rows).dump(2) + "\n");
      const std::vector<std::pair<std::string, std::vector<SweepRow>>> series{{to_string(algo), rows}};
      write_text(join(out_dir, "rate_vs_duration.svg"), render_svg(sweep_rate_plot(series)));
      write_text(join(out_dir, "distance_vs_duration.svg"), render_svg(sweep_distance_plot(series)));
      for (const auto& r : rows)
        std::printf("T=%g s: rate %.6g (sd %.3g), distance %.4g m (sd %.3g)\n", r.mission_time, r.mean_rate,
                    r.rate_stddev, r.mean_finishing_distance, r.finishing_distance_stddev);
      return 0;
    }
    if (*base_cmd) {
      const Scenario sc = load(common);
      const auto algo = baseline_kind == "csi" ? TrainAlgorithm::td3_csi_baseline : TrainAlgorithm::td3_no_ris;
      const TrainResult r = run_training(sc, algo, episodes, out_dir, quiet);
      if (r.aborted) return 3;
      const EvalReport report =
          evaluate(r.agent, sc, algo, eval_episodes.value_or(sc.run.eval_episodes), sc.run.seed);
      write_eval_outputs(out_dir, report);
      print_eval(report);
      return 0;
    }
    if (*export_cmd) {
      fs::create_directories(out_dir);
      std::vector<MetricsFile> runs;
      for (const auto& f : metrics_files) runs.push_back(parse_metrics_csv(read_text(f)));
      std::vector<EvalReport> reports;
      for (const auto& f : eval_files) reports.push_back(parse_eval_csv(read_text(f)));
      if (!runs.empty()) {
        write_text(join(out_dir, "reward.svg"), render_svg(reward_curve_plot(runs, false)));
        write_text(join(out_dir, "average_reward.svg"), render_svg(reward_curve_plot(runs, true)));
      }
      if (!reports.empty()) {
        write_text(join(out_dir, "distance_cdf.svg"), render_svg(distance_cdf_plot(reports)));
        write_text(join(out_dir, "rate_vs_distance.svg"), render_svg(rate_distance_plot(reports)));
        nlohmann::json all = nlohmann::json::array();
        for (const auto& r : reports) all.push_back(to_json(r));
        write_text(join(out_dir, "eval_summary.json"), all.dump(2) + "\n");
      }
      std::printf("wrote plots for %zu training runs and %zu evaluations to %s\n", runs.size(), reports.size(),
                  out_dir.c_str());
      return 0;
    }
    if (*verify_cmd) {
      const Scenario sc = load(common);
      bool ok = true;
      for (const auto& r : run_oracle_suite(sc, sc.run.seed)) {
        std::cout << format_check(r) << std::endl;
        ok = ok && r.passed;
      }
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
