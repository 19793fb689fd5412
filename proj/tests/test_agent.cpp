#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "risjam/agent.hpp"

using namespace risjam;

namespace {

constexpr int kState = 7, kAction = 11;

Batch scripted_batch(int n, std::uint64_t seed, bool some_terminal = true) {
  RandomStream rng(seed, "agent/batch");
  std::vector<Transition> ts;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd s(kState), a(kAction), s2(kState);
    for (auto* v : {&s, &a, &s2})
      for (Eigen::Index j = 0; j < v->size(); ++j) (*v)[j] = rng.uniform(-1, 1);
    ts.push_back({s, a, rng.normal(), s2, some_terminal && i % 5 == 0});
  }
  return make_batch(ts);
}

Agent make_agent(Algorithm algo, HyperParams hyper = {}, std::uint64_t seed = 1) {
  RandomStream init(seed, "agent/init");
  return Agent(algo, kState, kAction, hyper, init);
}

Eigen::MatrixXd stack(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd m(a.rows() + b.rows(), a.cols());
  m << a, b;
  return m;
}

}  // namespace

TEST(Agent, ShapesFollowPublishedSizes) {
  const Agent a = make_agent(Algorithm::td3);
  EXPECT_EQ(a.actor().dims(), (std::vector<int>{7, 64, 128, 64, 11}));
  EXPECT_EQ(a.critic(0).dims(), (std::vector<int>{18, 64, 128, 1}));
  EXPECT_EQ(a.critic_count(), 2u);
  EXPECT_EQ(make_agent(Algorithm::ddpg).critic_count(), 1u);
  EXPECT_NE(a.critic(0).layer(0).weight, a.critic(1).layer(0).weight);
  EXPECT_EQ(a.target_critic(1).layer(0).weight, a.critic(1).layer(0).weight);
}

TEST(Agent, ActionSelection) {
  const Agent a = make_agent(Algorithm::ddpg);
  const Eigen::VectorXd s = Eigen::VectorXd::LinSpaced(kState, -1, 1);
  RandomStream r1(2, "x"), r2(3, "y");
  EXPECT_EQ(a.select_action(s, ActionMode::exploit, r1), a.select_action(s, ActionMode::exploit, r2));

  HyperParams quiet;
  quiet.exploration_noise_var = 0.0;
  const Agent b = make_agent(Algorithm::ddpg, quiet);
  EXPECT_EQ(b.select_action(s, ActionMode::explore, r1), b.select_action(s, ActionMode::exploit, r1));

  RandomStream r3(4, "z");
  double lo = 0, hi = 0;
  for (int i = 0; i < 10000; ++i) {
    const Eigen::VectorXd act = a.select_action(s * (i % 7), ActionMode::explore, r3);
    lo = std::min(lo, act.minCoeff());
    hi = std::max(hi, act.maxCoeff());
  }
  EXPECT_GE(lo, -1.0);
  EXPECT_LE(hi, 1.0);
  EXPECT_EQ(lo, -1.0);  // clipping was exercised
}

TEST(Agent, ExplorationNoiseVariance) {
  const Agent a = make_agent(Algorithm::ddpg);
  const Eigen::VectorXd s = Eigen::VectorXd::Zero(kState);
  const Eigen::VectorXd mu = a.actor().forward(s);
  RandomStream r(5, "noise");
  double m2 = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) m2 += (a.select_action(s, ActionMode::explore, r) - mu).squaredNorm();
  // Actor output starts near 0, so clipping at +-1 barely truncates N(0, 0.2).
  EXPECT_NEAR(m2 / n / kAction, 0.2, 0.01);
}

TEST(Agent, DenormalizeAction) {
  const auto [p0, a0] = denormalize_action(Eigen::VectorXd::Zero(8 + 3), 8, 2.0);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(p0[i], 0.0);
  EXPECT_EQ(a0.value, Vec3::Zero());
  Eigen::VectorXd a = Eigen::VectorXd::Zero(11);
  a[0] = 1.0;
  a[1] = -1.0;
  a[2] = 0.5;
  a[8] = -1.0;
  a[10] = 0.25;
  const auto [p, acc] = denormalize_action(a, 8, 2.0);
  EXPECT_DOUBLE_EQ(p[0], -std::numbers::pi);
  EXPECT_DOUBLE_EQ(p[1], -std::numbers::pi);
  EXPECT_DOUBLE_EQ(p[2], std::numbers::pi / 2);
  EXPECT_EQ(acc.value, Vec3(-2.0, 0.0, 0.5));
}

TEST(Agent, DdpgCriticRegressesToRewardsWithZeroDiscount) {
  HyperParams h;
  h.discount = 0.0;
  Agent a = make_agent(Algorithm::ddpg, h);
  const Batch b = scripted_batch(16, 3);
  EXPECT_EQ(a.critic_targets(b, nullptr), b.rewards);
  for (int i = 0; i < 3000; ++i) a.ddpg_update(b);
  const Eigen::RowVectorXd q = a.critic(0).forward(stack(b.states, b.actions));
  const double mse = (q.transpose() - b.rewards).squaredNorm() / 16.0;
  EXPECT_LT(mse, 1e-3);
}

TEST(Agent, TerminalDropsBootstrap) {
  const Agent a = make_agent(Algorithm::ddpg);
  const Batch b = scripted_batch(10, 4);
  const Eigen::VectorXd y = a.critic_targets(b, nullptr);
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    if (b.not_terminal[i] == 0.0) {
      EXPECT_EQ(y[i], b.rewards[i]);
    } else {
      const double q = a.target_critic(0).forward(
          stack(b.next_states.col(i), a.target_actor().forward(b.next_states.col(i))))(0, 0);
      EXPECT_NEAR(y[i], b.rewards[i] + 0.99 * q, 1e-12);
    }
  }
}

TEST(Agent, SoftTargetStep) {
  Agent a = make_agent(Algorithm::ddpg);
  const Batch b = scripted_batch(8, 5);
  const Mlp target_before = a.target_critic(0);
  a.ddpg_update(b);
  const double tau = a.hyper().tau_critic;
  for (std::size_t l = 0; l < target_before.layer_count(); ++l) {
    const Eigen::MatrixXd expect = tau * a.critic(0).layer(l).weight + (1 - tau) * target_before.layer(l).weight;
    EXPECT_TRUE(a.target_critic(0).layer(l).weight.isApprox(expect, 1e-14));
  }
}

TEST(Agent, TargetGapShrinksWhenOnlineFrozen) {
  Agent a = make_agent(Algorithm::ddpg);
  a.mutable_actor().mutable_layer(0).weight.array() += 0.3;
  const Mlp& online = a.actor();
  Mlp target = a.target_actor();
  const double tau = 5e-3;
  const double before = (target.layer(0).weight - online.layer(0).weight).cwiseAbs().maxCoeff();
  soft_update(target, online, tau);
  const double after = (target.layer(0).weight - online.layer(0).weight).cwiseAbs().maxCoeff();
  EXPECT_NEAR(after, (1 - tau) * before, 1e-12);
}

TEST(Agent, Td3TargetUsesLowerCritic) {
  Agent a = make_agent(Algorithm::td3);
  const Batch b = scripted_batch(12, 6, false);
  // Critic 0 reads 100 higher everywhere, so the min picks critic 1.
  a.mutable_target_critic(0) = a.target_critic(1);
  a.mutable_target_critic(0).mutable_layer(2).bias[0] += 100.0;
  RandomStream r1(7, "smooth"), replay(7, "smooth");
  const Eigen::VectorXd y = a.critic_targets(b, &r1);
  Eigen::MatrixXd mu = a.target_actor().forward(b.next_states);
  const double sd = std::sqrt(a.hyper().policy_noise_var);
  for (Eigen::Index c = 0; c < mu.cols(); ++c)
    for (Eigen::Index k = 0; k < mu.rows(); ++k)
      mu(k, c) = std::clamp(mu(k, c) + std::clamp(sd * replay.normal(), -0.5, 0.5), -1.0, 1.0);
  const Eigen::RowVectorXd q2 = a.target_critic(1).forward(stack(b.next_states, mu));
  for (Eigen::Index i = 0; i < b.size(); ++i) EXPECT_NEAR(y[i], b.rewards[i] + 0.99 * q2[i], 1e-12);
}

TEST(Agent, Td3TargetBelowEitherCritic) {
  const Agent a = make_agent(Algorithm::td3);
  const Batch b = scripted_batch(32, 8);
  RandomStream r(9, "s");
  RandomStream replay = r;
  const Eigen::VectorXd y = a.critic_targets(b, &r);
  Eigen::MatrixXd mu = a.target_actor().forward(b.next_states);
  Eigen::MatrixXd noise(mu.rows(), mu.cols());
  for (Eigen::Index c = 0; c < mu.cols(); ++c)
    for (Eigen::Index k = 0; k < mu.rows(); ++k) noise(k, c) = std::sqrt(0.2) * replay.normal();
  const Eigen::MatrixXd in = stack(b.next_states, smooth_target_actions(mu, noise, 0.5));
  for (std::size_t c = 0; c < 2; ++c) {
    const Eigen::RowVectorXd q = a.target_critic(c).forward(in);
    for (Eigen::Index i = 0; i < b.size(); ++i)
      EXPECT_LE(y[i], b.rewards[i] + 0.99 * b.not_terminal[i] * q[i] + 1e-12);
  }
}

TEST(Agent, TargetNoiseClip) {
  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(1, 3), eps(1, 3);
  eps << 0.8, -0.8, 0.3;
  const Eigen::MatrixXd out = smooth_target_actions(mu, eps, 0.5);
  EXPECT_EQ(out(0, 0), 0.5);
  EXPECT_EQ(out(0, 1), -0.5);
  EXPECT_EQ(out(0, 2), 0.3);
  mu.setConstant(0.9);
  EXPECT_EQ(smooth_target_actions(mu, eps, 0.5)(0, 0), 1.0);
}

TEST(Agent, PolicyDelay) {
  Agent a = make_agent(Algorithm::td3);
  const Batch b = scripted_batch(16, 10);
  RandomStream r(11, "td3");
  const int k = 6;
  int actor_steps = 0;
  for (int i = 1; i <= 2 * k; ++i) {
    const Mlp actor_before = a.actor();
    const auto d = a.td3_update(b, r);
    const bool moved = a.actor().layer(0).weight != actor_before.layer(0).weight;
    EXPECT_EQ(moved, i % 2 == 0) << "call " << i;
    EXPECT_EQ(d.actor_updated, moved);
    actor_steps += moved;
  }
  EXPECT_EQ(actor_steps, k);
  EXPECT_EQ(a.actor_updates(), k);
  EXPECT_EQ(a.critic_updates(), 2 * k);
}

TEST(Agent, WrongAlgorithmUpdateRejected) {
  Agent d = make_agent(Algorithm::ddpg);
  Agent t = make_agent(Algorithm::td3);
  RandomStream r(1, "r");
  const Batch b = scripted_batch(4, 1);
  EXPECT_THROW(d.td3_update(b, r), std::logic_error);
  EXPECT_THROW(t.ddpg_update(b), std::logic_error);
  EXPECT_THROW(t.critic_targets(b, nullptr), std::invalid_argument);
}

TEST(Agent, UpdatesAreDeterministic) {
  for (Algorithm algo : {Algorithm::ddpg, Algorithm::td3}) {
    Agent x = make_agent(algo), y = make_agent(algo);
    RandomStream rx(12, "u"), ry(12, "u");
    for (int i = 0; i < 20; ++i) {
      const Batch b = scripted_batch(16, 100 + i);
      x.update(b, rx);
      y.update(b, ry);
    }
    EXPECT_EQ(x.to_json().dump(), y.to_json().dump());
  }
}

TEST(Agent, JsonRoundTrip) {
  Agent a = make_agent(Algorithm::td3);
  RandomStream r(13, "j");
  for (int i = 0; i < 3; ++i) a.update(scripted_batch(8, 200 + i), r);
  const Agent b = Agent::from_json(nlohmann::json::parse(a.to_json().dump()));
  EXPECT_EQ(b.to_json().dump(), a.to_json().dump());
  EXPECT_EQ(b.critic_updates(), 3);
  EXPECT_EQ(b.actor_updates(), 1);
}
