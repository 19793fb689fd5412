#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "risjam/channel.hpp"
#include "risjam/kernels.hpp"

using namespace risjam;
using std::numbers::pi;

namespace {
const Complex I{0.0, 1.0};
}

TEST(Channel, Distances) {
  const ScenarioConfig cfg;
  const auto d = distances(Vec3(0, 0, 100), cfg);
  EXPECT_DOUBLE_EQ(d.bs_uav, 100.0);
  EXPECT_NEAR(d.bs_ris, std::sqrt(50.0 * 50 + 50 * 50 + 30 * 30), 1e-12);
  EXPECT_NEAR(d.bs_ris, 76.81, 0.005);
  EXPECT_NEAR(d.jammer_ris, std::sqrt(75.0 * 75 + 75 * 75 + 30 * 30), 1e-12);
  EXPECT_DOUBLE_EQ(distances(cfg.ris_reference, cfg).ris_uav, 0.0);
  EXPECT_THROW(ris_uav_link(cfg.ris_reference, cfg, ChannelParams{}), DegenerateGeometry);
}

TEST(Channel, RicianFactor) {
  ChannelParams p;
  EXPECT_DOUBLE_EQ(rician_factor_bu(0.0, 10.0, p), 1.0);
  const double overhead = rician_factor_bu(10.0, 10.0, p);
  EXPECT_NEAR(overhead, std::exp(4.4 * pi / 2), 1e-9 * overhead);
  EXPECT_NEAR(overhead, 1.004e3, 0.5);
  p.rician_xi2 = 0.0;
  p.rician_xi1 = 2.5;
  EXPECT_DOUBLE_EQ(rician_factor_bu(7.0, 9.0, p), 2.5);
  EXPECT_THROW(rician_factor_bu(0.0, 0.0, p), DegenerateGeometry);
}

TEST(Channel, SteeringVector) {
  const auto a = steering_vector(2, 1, {1.0, 0.0});
  EXPECT_NEAR(std::abs(a[0] - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a[1] + 1.0), 0.0, 1e-15);
  const auto b = steering_vector(3, 4, {0.0, 0.0});
  for (Eigen::Index i = 0; i < b.size(); ++i) EXPECT_NEAR(std::abs(b[i] - 1.0), 0.0, 1e-15);
}

TEST(Channel, SteeringVectorIsKroneckerProduct) {
  const double px = 0.5, py = 0.5;
  const auto a = steering_vector(2, 2, {px, py});
  // Column factor (k_x) outer, row factor (k_y) inner.
  const Complex ax[2] = {1.0, std::exp(-I * pi * px)};
  const Complex ay[2] = {1.0, std::exp(-I * pi * py)};
  for (int kx = 0; kx < 2; ++kx)
    for (int ky = 0; ky < 2; ++ky) EXPECT_NEAR(std::abs(a[kx * 2 + ky] - ax[kx] * ay[ky]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a[1] - (-I)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a[3] - (-1.0)), 0.0, 1e-15);
}

TEST(Channel, SteeringVectorUnitModulus) {
  RandomStream rng(2, "steer");
  for (int k = 0; k < 20; ++k) {
    const auto a = steering_vector(5, 4, {rng.uniform(-1, 1), rng.uniform(-1, 1)});
    EXPECT_NEAR(a.squaredNorm(), 20.0, 1e-12);
    for (Eigen::Index i = 0; i < a.size(); ++i) EXPECT_NEAR(std::abs(a[i]), 1.0, 1e-15);
  }
}

TEST(Channel, DirectLinkLosLimit) {
  RandomStream rng(1, "los");
  const double inf = std::numeric_limits<double>::infinity();
  const Complex h = sample_direct(1.0, inf, 3.5, 1e-3, rng);
  EXPECT_NEAR(std::abs(h), std::sqrt(1e-3), 1e-15);
  const Complex h2 = sample_direct(20.0, inf, 3.5, 1e-3, rng);
  EXPECT_NEAR(std::abs(h2), std::sqrt(1e-3 * std::pow(20.0, -3.5)), 1e-18);
  EXPECT_THROW(sample_direct(0.0, 1.0, 3.5, 1e-3, rng), DegenerateGeometry);
}

TEST(Channel, DirectLinkMeanPower) {
  const double d = 80.0, expected = 1e-3 * std::pow(d, -3.5);
  for (double beta : {0.0, 1.0, 30.0}) {
    const double p = kernels::direct_power_mc_parallel(d, beta, 3.5, 1e-3, 17, 1000000, 8);
    EXPECT_NEAR(p / expected, 1.0, 0.01) << "beta " << beta;
  }
}

TEST(Channel, RisLinksLosLimitAndPower) {
  ScenarioConfig cfg;
  ChannelParams p;
  p.rician_ris = std::numeric_limits<double>::infinity();
  RandomStream rng(3, "ris");
  const auto los = sample_ris_links(cfg, p, rng);
  const auto d = distances(Vec3(0, 0, 1), cfg);
  const ComplexVector expect = std::sqrt(p.ref_path_loss * std::pow(d.bs_ris, -p.exponent_ris)) *
                               steering_vector(cfg.ris_cols, cfg.ris_rows, bs_ris_frequencies(cfg));
  EXPECT_LT((los.h_br - expect).cwiseAbs().maxCoeff(), 1e-18);

  p.rician_ris = 2.0;
  const int n = 200000;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(cfg.ris_rows * cfg.ris_cols);
  for (int i = 0; i < n; ++i) acc += sample_ris_links(cfg, p, rng).h_jr.cwiseAbs2();
  const double expected = p.ref_path_loss * std::pow(d.jammer_ris, -p.exponent_ris);
  for (Eigen::Index i = 0; i < acc.size(); ++i) EXPECT_NEAR(acc[i] / n / expected, 1.0, 0.015);
}

TEST(Channel, SingleElementRicianMoments) {
  // |h|/sqrt(Omega) with K = beta: E|h|^4 / (E|h|^2)^2 = (2 + 4K + K^2) / (1 + K)^2.
  ScenarioConfig cfg;
  cfg.ris_rows = cfg.ris_cols = 1;
  ChannelParams p;
  p.rician_ris = 2.0;
  RandomStream rng(5, "rician");
  const int n = 1000000;
  double m2 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const double a = std::norm(sample_ris_links(cfg, p, rng).h_br[0]);
    m2 += a;
    m4 += a * a;
  }
  m2 /= n;
  m4 /= n;
  const double K = 2.0;
  const double omega = p.ref_path_loss * std::pow(distances(Vec3(0, 0, 1), cfg).bs_ris, -p.exponent_ris);
  EXPECT_NEAR(m2 / omega, 1.0, 0.01);
  EXPECT_NEAR(m4 / (m2 * m2), (2 + 4 * K + K * K) / ((1 + K) * (1 + K)), 0.01);
}

TEST(Channel, RisUavLink) {
  ScenarioConfig cfg;
  ChannelParams p;
  const Vec3 q(10, -20, 60);
  const auto h = ris_uav_link(q, cfg, p);
  const double d = (q - cfg.ris_reference).norm();
  for (Eigen::Index i = 0; i < h.size(); ++i) EXPECT_NEAR(std::abs(h[i]), std::sqrt(p.ref_path_loss) / d, 1e-18);
  const auto broadside = ris_uav_link(Vec3(50, 50, 90), cfg, p);
  for (Eigen::Index i = 0; i < broadside.size(); ++i)
    EXPECT_NEAR(std::abs(broadside[i] / broadside[0] - 1.0), 0.0, 1e-15);
  const Vec3 far = cfg.ris_reference + 2.0 * (q - cfg.ris_reference);
  EXPECT_NEAR(ris_uav_link(far, cfg, p).squaredNorm() / h.squaredNorm(), 0.25, 1e-12);
}

TEST(Channel, SnapshotsReproducible) {
  ScenarioConfig cfg;
  ChannelParams p;
  auto run = [&] {
    RandomStream rng(21, "snap");
    const RisLinks links = sample_ris_links(cfg, p, rng);
    std::vector<ChannelSnapshot> out;
    for (int t = 0; t < 5; ++t) out.push_back(sample_snapshot(Vec3(-100 + t, 0, 20), t, links, cfg, p, rng));
    return out;
  };
  const auto a = run(), b = run();
  for (std::size_t t = 0; t < a.size(); ++t) {
    EXPECT_EQ(a[t].h_bu, b[t].h_bu);
    EXPECT_EQ(a[t].h_ju, b[t].h_ju);
    EXPECT_EQ(a[t].h_ru, b[t].h_ru);
    EXPECT_EQ(a[t].h_br, b[t].h_br);
    EXPECT_TRUE(a[t].h_br.allFinite());
    EXPECT_EQ(a[t].element_count(), 20);
  }
}
