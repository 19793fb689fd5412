#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "risjam/channel.hpp"
#include "risjam/harness.hpp"

namespace risjam {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Provenance lines written as "# key: value" before the CSV header.
struct MetricsHeader {
  std::string code_version = RISJAM_VERSION;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string algorithm;
};

struct MetricsFile {
  MetricsHeader header;
  std::vector<EpisodeRecord> episodes;
};

/// Columns: episode,reward,running_average,cumulative_rate,finishing_distance,critic_loss.
std::string metrics_csv(const MetricsFile& metrics);
MetricsFile parse_metrics_csv(const std::string& text);

std::string eval_csv(const EvalReport& report);
EvalReport parse_eval_csv(const std::string& text);
nlohmann::json to_json(const EvalReport& report);

std::string sweep_csv(const std::vector<SweepRow>& rows);
nlohmann::json to_json(const std::vector<SweepRow>& rows);

/// Columns: t,qx,qy,qz,vx,vy,vz,sinr,rate,reward,distance.
std::string trace_csv(const std::vector<TraceRow>& rows);

/// One row per channel coefficient: link,index,re,im.
std::string snapshot_csv(const ChannelSnapshot& snapshot);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> error;  // optional symmetric error bars
};

enum class PlotStyle { line, step, scatter };

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  PlotStyle style = PlotStyle::line;
  std::vector<Series> series;
};

/// Static SVG, one polyline (or marker group) per series, labelled axes.
std::string render_svg(const Plot& plot);

Plot reward_curve_plot(const std::vector<MetricsFile>& runs, bool running_average);
Plot sweep_rate_plot(const std::vector<std::pair<std::string, std::vector<SweepRow>>>& sweeps);
Plot sweep_distance_plot(const std::vector<std::pair<std::string, std::vector<SweepRow>>>& sweeps);
Plot distance_cdf_plot(const std::vector<EvalReport>& reports);
Plot rate_distance_plot(const std::vector<EvalReport>& reports);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace risjam
