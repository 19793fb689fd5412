#include <gtest/gtest.h>

#include "risjam/report_io.hpp"

using namespace risjam;

namespace {
std::size_t count(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
  return n;
}

MetricsFile sample_metrics(const std::string& algo) {
  MetricsFile m{{"0.1.0", "abcdef0123456789", 4, algo}, {}};
  double sum = 0.0;
  for (int i = 1; i <= 5; ++i) {
    const double r = 0.1 * i + 1.0 / 3.0;
    sum += r;
    m.episodes.push_back({i, r, sum / i, 2.0 / 7.0 * i, 300.0 - i, 1e-3 / i});
  }
  return m;
}

EvalReport sample_eval() {
  EvalReport r;
  r.algorithm = "td3";
  r.seed = 2;
  r.outcomes = {{10.0 / 3, 0.1 / 3, 50.5, 120.25}, {7.5, 0.075, 20.0, 80.0}, {9.0, 0.09, 40.0, 100.0}};
  r.episodes = 3;
  return r;
}
}  // namespace

TEST(ReportIo, MetricsRoundTrip) {
  const MetricsFile m = sample_metrics("td3");
  const std::string text = metrics_csv(m);
  EXPECT_NE(text.find("# config_hash: abcdef0123456789"), std::string::npos);
  EXPECT_NE(text.find("# seed: 4"), std::string::npos);
  EXPECT_NE(text.find("# version: 0.1.0"), std::string::npos);
  const MetricsFile back = parse_metrics_csv(text);
  ASSERT_EQ(back.episodes.size(), 5u);
  EXPECT_EQ(back.episodes[2].reward, m.episodes[2].reward);
  EXPECT_EQ(back.episodes[4].critic_loss, m.episodes[4].critic_loss);
  EXPECT_EQ(back.header.seed, 4u);
  EXPECT_EQ(metrics_csv(back), text);
}

TEST(ReportIo, MalformedCsv) {
  EXPECT_THROW(parse_metrics_csv("a,b\n1,2\n"), IoError);
  EXPECT_THROW(parse_metrics_csv(""), IoError);
  EXPECT_THROW(parse_metrics_csv("episode,reward,running_average,cumulative_rate,finishing_distance,critic_loss\n1,x,2,3,4,5\n"),
               IoError);
  EXPECT_THROW(parse_metrics_csv("episode,reward,running_average,cumulative_rate,finishing_distance,critic_loss\n1,2\n"),
               IoError);
}

TEST(ReportIo, EvalRoundTripAndJson) {
  const EvalReport r = sample_eval();
  const EvalReport back = parse_eval_csv(eval_csv(r));
  ASSERT_EQ(back.outcomes.size(), 3u);
  EXPECT_EQ(back.outcomes[0].cumulative_rate, r.outcomes[0].cumulative_rate);
  EXPECT_EQ(back.algorithm, "td3");
  EXPECT_EQ(eval_csv(back), eval_csv(parse_eval_csv(eval_csv(back))));
  const auto j = to_json(back);
  EXPECT_EQ(j["outcomes"].size(), 3u);
  EXPECT_DOUBLE_EQ(j["mean_finishing_distance"].get<double>(), 100.0 + 1.0 / 12.0);
  EXPECT_EQ(j["outcomes"][0]["mean_rate"].get<double>(), r.outcomes[0].mean_rate);
}

TEST(ReportIo, CanonicalFormatting) {
  EXPECT_EQ(metrics_csv(sample_metrics("x")), metrics_csv(sample_metrics("x")));
  EXPECT_EQ(eval_csv(sample_eval()), eval_csv(sample_eval()));
}

TEST(ReportIo, SweepAndTrace) {
  std::vector<SweepRow> rows{{5.0, 0.5, 0.1, 200.0, 10.0, {}}, {10.0, 0.6, 0.05, 150.0, 8.0, {}}};
  const std::string csv = sweep_csv(rows);
  EXPECT_EQ(count(csv, "\n"), 4u);
  EXPECT_EQ(to_json(rows).size(), 2u);
  std::vector<TraceRow> trace{{0, Vec3(1, 2, 3), Vec3(4, 5, 6), 0.5, 0.58, 0.0, 100.0}};
  const std::string t = trace_csv(trace);
  EXPECT_EQ(t.substr(0, t.find('\n')), "t,qx,qy,qz,vx,vy,vz,sinr,rate,reward,distance");
  EXPECT_NE(t.find("0,1,2,3,4,5,6,0.5,"), std::string::npos);
}

TEST(ReportIo, SnapshotCsv) {
  ChannelSnapshot s;
  s.h_bu = {1.0, -2.0};
  s.h_ru = s.h_br = s.h_jr = ComplexVector::Ones(2);
  const std::string text = snapshot_csv(s);
  EXPECT_NE(text.find("bu,0,1,-2"), std::string::npos);
  EXPECT_EQ(count(text, "\nru,"), 2u);
}

TEST(ReportIo, SvgPlots) {
  const std::vector<MetricsFile> runs{sample_metrics("ddpg"), sample_metrics("td3")};
  const std::string svg = render_svg(reward_curve_plot(runs, true));
  EXPECT_EQ(count(svg, "<polyline"), 2u);
  EXPECT_NE(svg.find("class=\"x-label\""), std::string::npos);
  EXPECT_NE(svg.find(">Episode</text>"), std::string::npos);
  EXPECT_NE(svg.find(">Average reward</text>"), std::string::npos);

  const std::string cdf_svg = render_svg(distance_cdf_plot({sample_eval()}));
  EXPECT_EQ(count(cdf_svg, "<polyline"), 1u);
  const std::string scatter = render_svg(rate_distance_plot({sample_eval()}));
  EXPECT_EQ(count(scatter, "<circle"), 3u);
  std::vector<SweepRow> rows{{5.0, 0.5, 0.1, 200.0, 10.0, {}}, {10.0, 0.6, 0.05, 150.0, 8.0, {}}};
  const std::string sweep = render_svg(sweep_rate_plot({{"td3", rows}, {"no-ris", rows}}));
  EXPECT_EQ(count(sweep, "<polyline"), 2u);
  EXPECT_NE(render_svg(sweep_distance_plot({{"td3", rows}})).find("Finishing distance (m)"), std::string::npos);
}
