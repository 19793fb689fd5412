#include "risjam/report_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace risjam {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError("line " + std::to_string(line) + ": '" + s + "' is not a number");
  }
}

/// Comment lines "# key: value" followed by a header and data rows.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> row_lines;
};

CsvTable parse_table(const std::string& text, const std::string& expected_header) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  int line_no = 0;
  const auto width = split(expected_header, ',').size();
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        std::string key = line.substr(1, colon - 1);
        std::string value = line.substr(colon + 1);
        key.erase(0, key.find_first_not_of(' '));
        value.erase(0, value.find_first_not_of(' '));
        table.meta.emplace_back(key, value);
      }
      continue;
    }
    if (!header_seen) {
      if (line != expected_header) {
        throw IoError("unexpected CSV header '" + line + "', expected '" + expected_header + "'");
      }
      header_seen = true;
      continue;
    }
    auto cells = split(line, ',');
    if (cells.size() != width) {
      throw IoError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) + " columns, got " +
                    std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
    table.row_lines.push_back(line_no);
  }
  if (!header_seen) throw IoError("CSV has no header line");
  return table;
}

std::string meta_value(const CsvTable& t, const std::string& key) {
  for (const auto& [k, v] : t.meta)
    if (k == key) return v;
  return {};
}

constexpr const char* kMetricsHeader = "episode,reward,running_average,cumulative_rate,finishing_distance,critic_loss";
constexpr const char* kEvalHeader = "episode,cumulative_rate,mean_rate,cumulative_reward,finishing_distance";

}  // namespace

std::string metrics_csv(const MetricsFile& metrics) {
  std::ostringstream out;
  out << "# version: " << metrics.header.code_version << '\n'
      << "# config_hash: " << metrics.header.config_hash << '\n'
      << "# seed: " << metrics.header.seed << '\n'
      << "# algorithm: " << metrics.header.algorithm << '\n'
      << kMetricsHeader << '\n';
  for (const auto& e : metrics.episodes) {
    out << e.episode << ',' << num(e.reward) << ',' << num(e.running_average) << ',' << num(e.cumulative_rate) << ','
        << num(e.finishing_distance) << ',' << num(e.critic_loss) << '\n';
  }
  return out.str();
}

MetricsFile parse_metrics_csv(const std::string& text) {
  const CsvTable t = parse_table(text, kMetricsHeader);
  MetricsFile m;
  m.header.code_version = meta_value(t, "version");
  m.header.config_hash = meta_value(t, "config_hash");
  const std::string seed = meta_value(t, "seed");
  m.header.seed = seed.empty() ? 0 : std::stoull(seed);
  m.header.algorithm = meta_value(t, "algorithm");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    const int ln = t.row_lines[i];
    EpisodeRecord e;
    e.episode = static_cast<int>(to_double(r[0], ln));
    e.reward = to_double(r[1], ln);
    e.running_average = to_double(r[2], ln);
    e.cumulative_rate = to_double(r[3], ln);
    e.finishing_distance = to_double(r[4], ln);
    e.critic_loss = to_double(r[5], ln);
    m.episodes.push_back(e);
  }
  return m;
}

std::string eval_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "# version: " << RISJAM_VERSION << '\n'
      << "# algorithm: " << report.algorithm << '\n'
      << "# seed: " << report.seed << '\n'
      << "# mean_rate: " << num(report.mean_rate) << '\n'
      << "# rate_stddev: " << num(report.rate_stddev) << '\n'
      << "# mean_finishing_distance: " << num(report.mean_finishing_distance) << '\n'
      << "# finishing_distance_stddev: " << num(report.finishing_distance_stddev) << '\n'
      << kEvalHeader << '\n';
  for (std::size_t i = 0; i < report.outcomes.size(); ++i) {
    const auto& o = report.outcomes[i];
    out << i << ',' << num(o.cumulative_rate) << ',' << num(o.mean_rate) << ',' << num(o.cumulative_reward) << ','
        << num(o.finishing_distance) << '\n';
  }
  return out.str();
}

EvalReport parse_eval_csv(const std::string& text) {
  const CsvTable t = parse_table(text, kEvalHeader);
  EvalReport report;
  report.algorithm = meta_value(t, "algorithm");
  const std::string seed = meta_value(t, "seed");
  report.seed = seed.empty() ? 0 : std::stoull(seed);
  std::vector<double> rates, cumulative, distances;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    const int ln = t.row_lines[i];
    EpisodeOutcome o{to_double(r[1], ln), to_double(r[2], ln), to_double(r[3], ln), to_double(r[4], ln)};
    rates.push_back(o.mean_rate);
    cumulative.push_back(o.cumulative_rate);
    distances.push_back(o.finishing_distance);
    report.outcomes.push_back(o);
  }
  report.episodes = static_cast<int>(report.outcomes.size());
  report.mean_rate = mean_of(rates);
  report.rate_stddev = sample_stddev(rates);
  report.mean_cumulative_rate = mean_of(cumulative);
  report.cumulative_rate_stddev = sample_stddev(cumulative);
  report.mean_finishing_distance = mean_of(distances);
  report.finishing_distance_stddev = sample_stddev(distances);
  return report;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json outcomes = nlohmann::json::array();
  for (const auto& o : report.outcomes) {
    outcomes.push_back({{"cumulative_rate", o.cumulative_rate},
                        {"mean_rate", o.mean_rate},
                        {"cumulative_reward", o.cumulative_reward},
                        {"finishing_distance", o.finishing_distance}});
  }
  return {{"version", RISJAM_VERSION},
          {"algorithm", report.algorithm},
          {"seed", report.seed},
          {"episodes", report.episodes},
          {"mean_rate", report.mean_rate},
          {"rate_stddev", report.rate_stddev},
          {"mean_cumulative_rate", report.mean_cumulative_rate},
          {"cumulative_rate_stddev", report.cumulative_rate_stddev},
          {"mean_finishing_distance", report.mean_finishing_distance},
          {"finishing_distance_stddev", report.finishing_distance_stddev},
          {"outcomes", outcomes}};
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "# version: " << RISJAM_VERSION << '\n'
      << "mission_time,mean_rate,rate_stddev,mean_finishing_distance,finishing_distance_stddev\n";
  for (const auto& r : rows) {
    out << num(r.mission_time) << ',' << num(r.mean_rate) << ',' << num(r.rate_stddev) << ','
        << num(r.mean_finishing_distance) << ',' << num(r.finishing_distance_stddev) << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const std::vector<SweepRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"mission_time", r.mission_time},
                   {"mean_rate", r.mean_rate},
                   {"rate_stddev", r.rate_stddev},
                   {"mean_finishing_distance", r.mean_finishing_distance},
                   {"finishing_distance_stddev", r.finishing_distance_stddev}});
  }
  return out;
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::ostringstream out;
  out << "t,qx,qy,qz,vx,vy,vz,sinr,rate,reward,distance\n";
  for (const auto& r : rows) {
    out << r.t;
    for (int i = 0; i < 3; ++i) out << ',' << num(r.position[i]);
    for (int i = 0; i < 3; ++i) out << ',' << num(r.velocity[i]);
    out << ',' << num(r.sinr) << ',' << num(r.rate) << ',' << num(r.reward) << ',' << num(r.distance) << '\n';
  }
  return out.str();
}

std::string snapshot_csv(const ChannelSnapshot& s) {
  std::ostringstream out;
  out << "# slot: " << s.slot << '\n' << "link,index,re,im\n";
  auto row = [&](const char* link, int i, Complex c) {
    out << link << ',' << i << ',' << num(c.real()) << ',' << num(c.imag()) << '\n';
  };
  row("bu", 0, s.h_bu);
  row("ju", 0, s.h_ju);
  for (Eigen::Index i = 0; i < s.h_ru.size(); ++i) row("ru", static_cast<int>(i), s.h_ru[i]);
  for (Eigen::Index i = 0; i < s.h_br.size(); ++i) row("br", static_cast<int>(i), s.h_br[i]);
  for (Eigen::Index i = 0; i < s.h_jr.size(); ++i) row("jr", static_cast<int>(i), s.h_jr[i]);
  return out.str();
}

std::string render_svg(const Plot& plot) {
  constexpr double W = 720, H = 460, left = 80, right = 170, top = 40, bottom = 60;
  constexpr std::array<const char*, 6> palette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double e = i < s.error.size() ? std::abs(s.error[i]) : 0.0;
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i] - e);
      y1 = std::max(y1, s.y[i] + e);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double pw = W - left - right, ph = H - top - bottom;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << plot.title
      << "</text>\n"
      << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = x0 + (x1 - x0) * k / 5.0, yv = y0 + (y1 - y0) * k / 5.0;
    out << "<line x1=\"" << sx(xv) << "\" y1=\"" << top + ph << "\" x2=\"" << sx(xv) << "\" y2=\"" << top + ph + 5
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << sx(xv) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << short_num(xv)
        << "</text>\n"
        << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(yv) << "\" x2=\"" << left << "\" y2=\"" << sy(yv)
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << left - 8 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">" << short_num(yv)
        << "</text>\n";
  }
  out << "<text class=\"x-label\" x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
      << plot.x_label << "</text>\n"
      << "<text class=\"y-label\" x=\"20\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << top + ph / 2 << ")\">" << plot.y_label << "</text>\n";

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* color = palette[k % palette.size()];
    if (plot.style == PlotStyle::scatter) {
      out << "<g class=\"series\" fill=\"" << color << "\">\n";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        out << "<circle cx=\"" << sx(s.x[i]) << "\" cy=\"" << sy(s.y[i]) << "\" r=\"2.5\"/>\n";
      out << "</g>\n";
    } else {
      out << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (plot.style == PlotStyle::step && i > 0) out << sx(s.x[i]) << ',' << sy(s.y[i - 1]) << ' ';
        out << sx(s.x[i]) << ',' << sy(s.y[i]) << ' ';
      }
      out << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.error.size() && i < s.x.size(); ++i) {
      out << "<line x1=\"" << sx(s.x[i]) << "\" y1=\"" << sy(s.y[i] - s.error[i]) << "\" x2=\"" << sx(s.x[i])
          << "\" y2=\"" << sy(s.y[i] + s.error[i]) << "\" stroke=\"" << color << "\"/>\n";
    }
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    out << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 30 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n"
        << "<text x=\"" << left + pw + 35 << "\" y=\"" << ly + 4 << "\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

Plot reward_curve_plot(const std::vector<MetricsFile>& runs, bool running_average) {
  Plot p{running_average ? "Average reward" : "Episode reward", "Episode",
         running_average ? "Average reward" : "Reward", PlotStyle::line, {}};
  for (const auto& run : runs) {
    Series s{run.header.algorithm + " (seed " + std::to_string(run.header.seed) + ")", {}, {}, {}};
    for (const auto& e : run.episodes) {
      s.x.push_back(e.episode);
      s.y.push_back(running_average ? e.running_average : e.reward);
    }
    p.series.push_back(std::move(s));
  }
  return p;
}

Plot sweep_rate_plot(const std::vector<std::pair<std::string, std::vector<SweepRow>>>& sweeps) {
  Plot p{"Data rate vs mission duration", "Mission duration T (s)", "Mean rate (bit/s/Hz)", PlotStyle::line, {}};
  for (const auto& [label, rows] : sweeps) {
    Series s{label, {}, {}, {}};
    for (const auto& r : rows) {
      s.x.push_back(r.mission_time);
      s.y.push_back(r.mean_rate);
      s.error.push_back(r.rate_stddev);
    }
    p.series.push_back(std::move(s));
  }
  return p;
}

Plot sweep_distance_plot(const std::vector<std::pair<std::string, std::vector<SweepRow>>>& sweeps) {
  Plot p{"Finishing distance vs mission duration", "Mission duration T (s)", "Finishing distance (m)",
         PlotStyle::line, {}};
  for (const auto& [label, rows] : sweeps) {
    Series s{label, {}, {}, {}};
    for (const auto& r : rows) {
      s.x.push_back(r.mission_time);
      s.y.push_back(r.mean_finishing_distance);
      s.error.push_back(r.finishing_distance_stddev);
    }
    p.series.push_back(std::move(s));
  }
  return p;
}

Plot distance_cdf_plot(const std::vector<EvalReport>& reports) {
  Plot p{"CDF of finishing distance", "Finishing distance (m)", "CDF", PlotStyle::step, {}};
  for (const auto& r : reports) {
    std::vector<double> d;
    for (const auto& o : r.outcomes) d.push_back(o.finishing_distance);
    Series s{r.algorithm, {}, {}, {}};
    if (!d.empty()) {
      for (const auto& pt : cdf(d)) {
        s.x.push_back(pt.value);
        s.y.push_back(pt.probability);
      }
    }
    p.series.push_back(std::move(s));
  }
  return p;
}

Plot rate_distance_plot(const std::vector<EvalReport>& reports) {
  Plot p{"Rate vs finishing distance", "Finishing distance (m)", "Mean rate (bit/s/Hz)", PlotStyle::scatter, {}};
  for (const auto& r : reports) {
    Series s{r.algorithm, {}, {}, {}};
    for (const auto& o : r.outcomes) {
      s.x.push_back(o.finishing_distance);
      s.y.push_back(o.mean_rate);
    }
    p.series.push_back(std::move(s));
  }
  return p;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace risjam
