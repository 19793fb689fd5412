#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "risjam/ris_oracle.hpp"

using namespace risjam;
using std::numbers::pi;

namespace {

ChannelSnapshot random_snapshot(int n, RandomStream& rng, double direct_scale = 0.5) {
  ChannelSnapshot s;
  s.h_bu = direct_scale * rng.complex_normal();
  s.h_ju = direct_scale * rng.complex_normal();
  s.h_ru.resize(n);
  s.h_br.resize(n);
  s.h_jr.resize(n);
  for (int i = 0; i < n; ++i) {
    s.h_ru[i] = rng.complex_normal();
    s.h_br[i] = rng.complex_normal();
    s.h_jr[i] = rng.complex_normal();
  }
  return s;
}

// Independent 1-D brute force over theta for a single element.
double brute_force_n1(const ChannelSnapshot& s, double pt, double pj, double noise, int points) {
  double best = 0.0;
  for (int k = 0; k < points; ++k) {
    const std::complex<double> e = std::polar(1.0, -pi + 2 * pi * k / points);
    const double f = pt * std::norm(s.h_bu + std::conj(s.h_ru[0]) * e * s.h_br[0]);
    const double g = pj * std::norm(s.h_ju + std::conj(s.h_ru[0]) * e * s.h_jr[0]) + noise;
    best = std::max(best, f / g);
  }
  return best;
}

}  // namespace

TEST(RisOracle, NoRisMetrics) {
  RandomStream rng(1, "noris");
  ChannelSnapshot s = random_snapshot(3, rng);
  const auto m = no_ris_metrics(s, 1.0, 0.5, 0.1);
  ChannelSnapshot z = s;
  z.h_br.setZero();
  z.h_jr.setZero();
  const auto ref = sinr(z, RisPhaseVector(3), 1.0, 0.5, 0.1);
  EXPECT_DOUBLE_EQ(m.sinr, ref.sinr);
  EXPECT_DOUBLE_EQ(m.rate, ref.rate);
  ChannelSnapshot u;
  u.h_bu = u.h_ju = 1.0;
  u.h_ru = u.h_br = u.h_jr = ComplexVector::Ones(1);
  EXPECT_DOUBLE_EQ(no_ris_metrics(u, 2.0, 3.0, 1.0).sinr, 2.0 / 4.0);
}

TEST(RisOracle, SingleElementWithoutDirectPaths) {
  RandomStream rng(2, "n1");
  ChannelSnapshot s = random_snapshot(1, rng);
  s.h_bu = s.h_ju = 0.0;
  const double pt = 1.0, pj = 0.7, noise = 0.2;
  const auto r = dinkelbach_optimize(s, pt, pj, noise);
  const double a = std::norm(s.h_ru[0]);
  const double expected = pt * a * std::norm(s.h_br[0]) / (pj * a * std::norm(s.h_jr[0]) + noise);
  EXPECT_NEAR(r.ratio, expected, 1e-12 * expected);
  EXPECT_NEAR(r.ratio, brute_force_n1(s, pt, pj, noise, 360), 1e-12 * expected);
  EXPECT_EQ(r.outer_iterations, 1);
  EXPECT_TRUE(r.converged);
}

TEST(RisOracle, JammerFreeDirectFreeAlignment) {
  RandomStream rng(3, "align");
  for (int k = 0; k < 30; ++k) {
    const int n = 1 + k % 8;
    ChannelSnapshot s = random_snapshot(n, rng);
    s.h_bu = 0.0;
    s.h_jr.setZero();
    double bound = 0.0;
    for (int i = 0; i < n; ++i) bound += std::abs(s.h_ru[i]) * std::abs(s.h_br[i]);
    const double pt = 0.3;
    const auto r = dinkelbach_optimize(s, pt, 1.0, 1.0);
    const double f = pt * std::norm(effective_gain(0.0, s.h_ru, r.phases, s.h_br));
    EXPECT_NEAR(f / (pt * bound * bound), 1.0, 1e-6);
    const double g = std::norm(effective_gain(0.0, s.h_ru, alignment_phases(s.h_ru, s.h_br), s.h_br));
    EXPECT_NEAR(g / (bound * bound), 1.0, 1e-12);
  }
}

TEST(RisOracle, AgainstGrid) {
  RandomStream rng(4, "grid");
  for (int k = 0; k < 12; ++k) {
    const int n = 1 + k % 3;
    const int points = n == 1 ? 360 : n == 2 ? 120 : 48;
    const ChannelSnapshot s = random_snapshot(n, rng);
    const auto r = dinkelbach_optimize(s, 1.0, 1.0, 0.1);
    const double grid = grid_verify(s, 1.0, 1.0, 0.1, points);
    EXPECT_GE(r.ratio, grid * (1 - 1e-3)) << "n=" << n;
    for (std::size_t i = 1; i < r.lambdas.size(); ++i) EXPECT_GE(r.lambdas[i], r.lambdas[i - 1]);
    for (std::size_t i = 0; i < r.phases.size(); ++i) {
      EXPECT_GE(r.phases[i], -pi);
      EXPECT_LT(r.phases[i], pi);
    }
    EXPECT_GE(r.ratio, sinr(s, RisPhaseVector(n), 1.0, 1.0, 0.1).sinr);
    EXPECT_NEAR(r.ratio, sinr(s, r.phases, 1.0, 1.0, 0.1).sinr, 1e-12 * r.ratio);
  }
}

TEST(RisOracle, GridRefinementNeverWorse) {
  RandomStream rng(5, "refine");
  const ChannelSnapshot s = random_snapshot(2, rng);
  const double coarse = grid_verify(s, 1.0, 1.0, 0.1, 30);
  const double fine = grid_verify(s, 1.0, 1.0, 0.1, 90);
  EXPECT_GE(fine, coarse);
  EXPECT_THROW(grid_verify(random_snapshot(4, rng), 1.0, 1.0, 0.1, 8), std::invalid_argument);
}

TEST(RisOracle, SnrOnlyIgnoresJammer) {
  RandomStream rng(6, "snr");
  ChannelSnapshot s = random_snapshot(3, rng);
  DinkelbachOptions o;
  o.snr_only = true;
  const auto r = dinkelbach_optimize(s, 1.0, 5.0, 0.1, o);
  const double f = std::norm(effective_gain(s.h_bu, s.h_ru, r.phases, s.h_br));
  EXPECT_NEAR(r.ratio, f / 0.1, 1e-12 * r.ratio);
  // With the direct term included the optimum aligns every reflection with h_bu.
  double bound = std::abs(s.h_bu);
  for (int i = 0; i < 3; ++i) bound += std::abs(s.h_ru[i]) * std::abs(s.h_br[i]);
  EXPECT_NEAR(f / (bound * bound), 1.0, 1e-6);
}

TEST(RisOracle, RejectsBadInput) {
  RandomStream rng(7, "bad");
  EXPECT_THROW(dinkelbach_optimize(random_snapshot(2, rng), 1.0, 1.0, 0.0), std::invalid_argument);
}
