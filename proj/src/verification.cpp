#include "risjam/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "risjam/agent.hpp"
#include "risjam/environment.hpp"
#include "risjam/harness.hpp"
#include "risjam/kernels.hpp"
#include "risjam/kinematics.hpp"
#include "risjam/neural.hpp"
#include "risjam/radio_link.hpp"
#include "risjam/report_io.hpp"
#include "risjam/ris_oracle.hpp"

namespace risjam {
namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

template <class Body>
CheckResult timed(int id, std::string name, double limit, Body body) {
  CheckResult r{id, std::move(name), false, {}, 0.0, limit};
  const auto t0 = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (limit > 0.0 && r.seconds >= limit) {
    r.passed = false;
    r.detail += fmt(" [over the %.0f s budget]", limit);
  }
  return r;
}

// ReLU on/off pattern of every hidden unit, used to skip finite differences
// that straddle a kink.
std::vector<Eigen::MatrixXd> hidden_masks(const Mlp& net, const Eigen::MatrixXd& x) {
  ForwardCache cache;
  net.forward(x, cache);
  std::vector<Eigen::MatrixXd> masks;
  for (std::size_t i = 0; i + 1 < cache.outputs.size(); ++i)
    masks.push_back((cache.outputs[i].array() > 0.0).cast<double>().matrix());
  return masks;
}

struct GradStats {
  double worst = 0.0;
  long checked = 0;
  long skipped = 0;
};

// Relative error floor for gradients that are numerically zero.
constexpr double kGradFloor = 1e-6;

void compare_gradients(Mlp& net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& g, RandomStream& rng,
                       int max_params, GradStats& stats) {
  const double h = 1e-5;
  auto loss = [&](const Mlp& n, const Eigen::MatrixXd& in) { return (n.forward(in).array() * g.array()).sum(); };
  ForwardCache cache;
  net.forward(x, cache);
  const Gradients grads = net.backward(cache, g);
  const auto base_masks = hidden_masks(net, x);

  auto record = [&](double analytic, double numeric) {
    const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), kGradFloor});
    stats.worst = std::max(stats.worst, rel);
    ++stats.checked;
  };

  std::vector<std::pair<std::size_t, Eigen::Index>> params;  // (layer, flat index; weights then bias)
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const Eigen::Index n = net.layer(l).weight.size() + net.layer(l).bias.size();
    for (Eigen::Index i = 0; i < n; ++i) params.emplace_back(l, i);
  }
  if (max_params > 0 && static_cast<int>(params.size()) > max_params) {
    for (int k = 0; k < max_params; ++k)
      std::swap(params[k], params[k + rng.uniform_index(params.size() - k)]);
    params.resize(max_params);
  }

  for (const auto& [l, i] : params) {
    const Eigen::Index nw = net.layer(l).weight.size();
    auto ref = [&]() -> double& {
      DenseLayer& layer = net.mutable_layer(l);
      return i < nw ? layer.weight.data()[i] : layer.bias.data()[i - nw];
    };
    const double original = ref();
    ref() = original + h;
    const double up = loss(net, x);
    const bool kink_up = hidden_masks(net, x) != base_masks;
    ref() = original - h;
    const double down = loss(net, x);
    const bool kink_down = hidden_masks(net, x) != base_masks;
    ref() = original;
    if (kink_up || kink_down) {
      ++stats.skipped;
      continue;
    }
    const double analytic = i < nw ? grads.layers[l].weight.data()[i] : grads.layers[l].bias.data()[i - nw];
    record(analytic, (up - down) / (2.0 * h));
  }

  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::MatrixXd xp = x, xm = x;
    xp.data()[i] += h;
    xm.data()[i] -= h;
    if (hidden_masks(net, xp) != base_masks || hidden_masks(net, xm) != base_masks) {
      ++stats.skipped;
      continue;
    }
    record(grads.input.data()[i], (loss(net, xp) - loss(net, xm)) / (2.0 * h));
  }
}

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, RandomStream& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.normal();
  return m;
}

ComplexVector random_cvec(int n, RandomStream& rng) {
  ComplexVector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.complex_normal();
  return v;
}

}  // namespace

std::string format_check(const CheckResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.2f s)", r.seconds);
  return std::string(r.passed ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " + r.name + buf + ": " +
         r.detail;
}

CheckResult check_gradients(std::uint64_t seed) {
  return timed(1, "gradient correctness", 5.0, [&](CheckResult& r) {
    RandomStream rng(seed, "verify/gradients");
    GradStats stats;
    const int state_dim = kObservationDim, action_dim = 8 + 3;
    for (int k = 0; k < 100; ++k) {
      const bool actor = k % 2 == 0;
      // Two nets carry the full published widths (sampled parameters); the
      // rest keep the depth and activations at reduced width.
      const bool full = k < 2;
      std::vector<int> dims;
      if (actor) {
        dims = full ? std::vector<int>{state_dim, 64, 128, 64, action_dim}
                    : std::vector<int>{state_dim, 9, 14, 9, action_dim};
      } else {
        dims = full ? std::vector<int>{state_dim + action_dim, 64, 128, 1}
                    : std::vector<int>{state_dim + action_dim, 9, 14, 1};
      }
      Mlp net(dims, Activation::relu, actor ? Activation::tanh : Activation::identity);
      net.initialize(rng, actor ? 0.3 : 0.0);
      const Eigen::MatrixXd x = random_matrix(dims.front(), 3, rng);
      const Eigen::MatrixXd g = random_matrix(dims.back(), 3, rng);
      compare_gradients(net, x, g, rng, full ? 400 : 0, stats);
    }
    r.passed = stats.worst < 1e-4 && stats.checked > 0 && stats.skipped * 100 < stats.checked;
    r.detail = fmt("max relative error %.3g over %.0f derivatives (%.0f skipped at ReLU kinks)", stats.worst,
                   static_cast<double>(stats.checked), static_cast<double>(stats.skipped));
  });
}

CheckResult check_alignment(std::uint64_t seed) {
  return timed(2, "phase-alignment optimum", 1.0, [&](CheckResult& r) {
    RandomStream rng(seed, "verify/alignment");
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const int n = 1 + static_cast<int>(rng.uniform_index(8));
      ChannelSnapshot s;
      s.h_ru = random_cvec(n, rng);
      s.h_br = random_cvec(n, rng);
      s.h_jr = ComplexVector::Zero(n);
      double bound = 0.0;
      for (int i = 0; i < n; ++i) bound += std::abs(s.h_ru[i]) * std::abs(s.h_br[i]);
      bound *= bound;
      DinkelbachOptions opts;
      opts.seed = seed + static_cast<std::uint64_t>(k);
      const auto dk = dinkelbach_optimize(s, 1.0, 1.0, 1.0, opts);
      const double g_dk = std::norm(effective_gain(0.0, s.h_ru, dk.phases, s.h_br));
      const double g_cf = std::norm(effective_gain(0.0, s.h_ru, alignment_phases(s.h_ru, s.h_br), s.h_br));
      worst = std::max({worst, std::abs(g_dk - bound) / bound, std::abs(g_cf - bound) / bound});
    }
    r.passed = worst <= 1e-6;
    r.detail = fmt("max relative gap to (sum |h_ru||h_br|)^2: %.3g over 50 snapshots", worst);
  });
}

CheckResult check_dinkelbach_grid(std::uint64_t seed) {
  return timed(3, "Dinkelbach vs grid oracle", 30.0, [&](CheckResult& r) {
    RandomStream rng(seed, "verify/dinkelbach");
    double worst = -1.0;
    bool monotone = true;
    const double pt = 1.0, pj = 1.0, noise = 0.1;
    for (int k = 0; k < 20; ++k) {
      const int n = 1 + k % 3;
      const int points = n == 1 ? 360 : n == 2 ? 180 : 64;
      ChannelSnapshot s;
      s.h_bu = 0.5 * rng.complex_normal();
      s.h_ju = 0.5 * rng.complex_normal();
      s.h_ru = random_cvec(n, rng);
      s.h_br = random_cvec(n, rng);
      s.h_jr = random_cvec(n, rng);
      DinkelbachOptions opts;
      opts.seed = seed + static_cast<std::uint64_t>(k);
      const auto dk = dinkelbach_optimize(s, pt, pj, noise, opts);
      const double grid = grid_verify(s, pt, pj, noise, points);
      worst = std::max(worst, (grid - dk.ratio) / grid);
      for (std::size_t i = 1; i < dk.lambdas.size(); ++i)
        if (dk.lambdas[i] < dk.lambdas[i - 1]) monotone = false;
    }
    r.passed = worst <= 1e-3 && monotone;
    r.detail = fmt("worst (grid - dinkelbach)/grid = %.3g; lambda nondecreasing: ", worst) +
               (monotone ? "yes" : "no");
  });
}

CheckResult check_kinematics(const Scenario& scenario, std::uint64_t seed) {
  return timed(4, "kinematic feasibility", 5.0, [&](CheckResult& r) {
    const auto& lim = scenario.kinematics;
    const double dt = scenario.system.slot_length;
    RandomStream rng(seed, "verify/kinematics");
    long bad_state = 0, bad_accel = 0, bad_idem = 0;
    double worst_idem = 0.0;
    for (int k = 0; k < 100000; ++k) {
      UavState st;
      st.position = Vec3(rng.uniform(-500, 500), rng.uniform(-500, 500), rng.uniform(0, 200));
      st.velocity = project(Vec3(rng.normal(0, 20), rng.normal(0, 20), rng.normal(0, 20)), lim).velocity;
      const Vec3 raw(rng.uniform(-3, 3) * lim.max_accel, rng.uniform(-3, 3) * lim.max_accel,
                     rng.uniform(-3, 3) * lim.max_accel);
      const Accel a = clamp_accel(raw, lim);
      if (a.value.cwiseAbs().maxCoeff() > lim.max_accel) ++bad_accel;
      const UavState next = step(st, a, dt, lim);
      if (!velocity_feasible(next.velocity, lim, 1e-12) || !next.position.allFinite()) ++bad_state;
      const Vec3 again = project(next.velocity, lim, st.velocity).velocity;
      const double d = (again - next.velocity).norm() / next.velocity.norm();
      worst_idem = std::max(worst_idem, d);
      if (d > 1e-12) ++bad_idem;
    }
    r.passed = bad_state == 0 && bad_accel == 0 && bad_idem == 0;
    r.detail = fmt("infeasible states %.0f, accel violations %.0f, ", static_cast<double>(bad_state),
                   static_cast<double>(bad_accel)) +
               fmt("projection idempotence max drift %.3g", worst_idem);
  });
}

CheckResult check_telescoping(const Scenario& scenario, std::uint64_t seed) {
  return timed(5, "reward telescoping", 0.0, [&](CheckResult& r) {
    RandomStream actions(seed, "verify/telescoping/actions");
    double worst = 0.0;
    for (RisMode mode : {RisMode::learned, RisMode::none}) {
      for (int ep = 0; ep < 5; ++ep) {
        Environment env(scenario, mode);
        env.reset(rng_stream(seed, "verify/telescoping/" + std::to_string(ep)));
        const double d0 = env.state().prev_distance;
        double reward_sum = 0.0, rate_sum = 0.0, d_end = d0;
        while (!env.done()) {
          Eigen::VectorXd a(env.action_dim());
          for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = actions.uniform(-1.0, 1.0);
          const StepResult s = env.step(a);
          reward_sum += s.reward;
          rate_sum += s.metrics.rate;
          d_end = s.distance;
        }
        const double expected = rate_sum + scenario.hyper.reward_weight * (d0 - d_end);
        worst = std::max(worst, std::abs(reward_sum - expected));
      }
    }
    r.passed = worst <= 1e-9;
    r.detail = fmt("max |sum r - (sum R + zeta (d0 - dT))| = %.3g over 10 episodes", worst);
  });
}

CheckResult check_determinism(const Scenario& scenario, std::uint64_t seed) {
  return timed(7, "determinism", 0.0, [&](CheckResult& r) {
    TrainOptions opts;
    opts.seed = seed;
    opts.episodes = 20;
    std::string text[2];
    for (auto& t : text) {
      const TrainResult run = train(scenario, TrainAlgorithm::td3, opts);
      if (run.aborted) throw std::runtime_error("training aborted: " + run.abort_reason);
      t = metrics_csv({{RISJAM_VERSION, config_hash(scenario), seed, "td3"}, run.episodes});
    }
    r.passed = text[0] == text[1];
    r.detail = r.passed ? "two 20-episode TD3 runs wrote identical metrics (" + std::to_string(text[0].size()) +
                              " bytes)"
                        : "metrics differ between identical runs";
  });
}

CheckResult check_td3_mechanism(const Scenario& scenario, std::uint64_t seed) {
  return timed(8, "TD3 mechanism", 0.0, [&](CheckResult& r) {
    HyperParams hyper = scenario.hyper;
    const int sd = kObservationDim, ad = scenario.system.element_count() + 3;
    RandomStream init(seed, "verify/td3/init");
    Agent agent(Algorithm::td3, sd, ad, hyper, init, NetworkShape{{16, 16}, {16, 16}, 0.5});
    RandomStream data(seed, "verify/td3/data");
    std::vector<Transition> ts;
    for (int i = 0; i < 32; ++i) {
      Eigen::VectorXd s(sd), a(ad), s2(sd);
      for (auto* v : {&s, &a, &s2})
        for (Eigen::Index j = 0; j < v->size(); ++j) (*v)[j] = data.uniform(-1.0, 1.0);
      ts.push_back({s, a, data.normal(), s2, i % 7 == 0});
    }
    const Batch batch = make_batch(ts);
    std::vector<std::string> failures;

    // Min-critic target: replay the noise draws and rebuild y by hand.
    {
      RandomStream noise_rng(seed, "verify/td3/noise");
      RandomStream replay = noise_rng;
      const Eigen::VectorXd y = agent.critic_targets(batch, &noise_rng);
      const Eigen::MatrixXd mu = agent.target_actor().forward(batch.next_states);
      const double sd_noise = std::sqrt(hyper.policy_noise_var);
      Eigen::MatrixXd smoothed = mu;
      long clipped = 0;
      for (Eigen::Index c = 0; c < mu.cols(); ++c) {
        for (Eigen::Index k = 0; k < mu.rows(); ++k) {
          const double e = sd_noise * replay.normal();
          if (std::abs(e) > 0.5) ++clipped;
          smoothed(k, c) = std::clamp(mu(k, c) + std::clamp(e, -0.5, 0.5), -1.0, 1.0);
        }
      }
      Eigen::MatrixXd input(sd + ad, mu.cols());
      input << batch.next_states, smoothed;
      const Eigen::RowVectorXd q1 = agent.target_critic(0).forward(input);
      const Eigen::RowVectorXd q2 = agent.target_critic(1).forward(input);
      double err = 0.0;
      int picked1 = 0, picked2 = 0;
      for (Eigen::Index i = 0; i < batch.size(); ++i) {
        const double q = std::min(q1[i], q2[i]);
        (q1[i] <= q2[i] ? picked1 : picked2) += 1;
        err = std::max(err, std::abs(y[i] - (batch.rewards[i] + hyper.discount * batch.not_terminal[i] * q)));
      }
      if (err > 1e-12) failures.push_back(fmt("target mismatch %.3g", err));
      if (clipped == 0) failures.push_back("no noise draw exceeded the clip; clipping untested");
      if (picked1 == 0 || picked2 == 0) {
        // Force each critic to be the minimum in turn.
        for (std::size_t low : {0u, 1u}) {
          Agent shifted = agent;
          auto& bias = shifted.mutable_target_critic(1 - low).mutable_layer(2).bias;
          bias[0] += 1e3;
          RandomStream rr(seed, "verify/td3/noise");
          const Eigen::VectorXd ys = shifted.critic_targets(batch, &rr);
          const Eigen::RowVectorXd ql = shifted.target_critic(low).forward(input);
          for (Eigen::Index i = 0; i < batch.size(); ++i) {
            if (std::abs(ys[i] - (batch.rewards[i] + hyper.discount * batch.not_terminal[i] * ql[i])) > 1e-9)
              failures.push_back("min target ignored the lower critic");
          }
        }
      }
    }

    // Noise clipping on fixed inputs.
    {
      Eigen::MatrixXd mu(2, 3), noise(2, 3);
      mu << 0.0, 0.0, 0.8, -0.9, 0.2, 0.0;
      noise << 5.0, -5.0, 0.4, -0.3, 0.3, 0.49;
      Eigen::MatrixXd expect(2, 3);
      expect << 0.5, -0.5, 1.0, -1.0, 0.5, 0.49;
      if ((smooth_target_actions(mu, noise, 0.5) - expect).cwiseAbs().maxCoeff() > 1e-15)
        failures.push_back("smooth_target_actions clipping wrong");
    }

    // Delayed policy updates: actor and targets move only on every second critic update.
    {
      RandomStream rng(seed, "verify/td3/updates");
      for (int k = 1; k <= 10; ++k) {
        const Eigen::MatrixXd actor_before = agent.actor().layer(0).weight;
        const Eigen::MatrixXd target_before = agent.target_critic(0).layer(0).weight;
        const auto diag = agent.td3_update(batch, rng);
        const bool actor_moved = agent.actor().layer(0).weight != actor_before;
        const bool target_moved = agent.target_critic(0).layer(0).weight != target_before;
        const bool due = k % hyper.policy_delay == 0;
        if (diag.actor_updated != due || actor_moved != due || target_moved != due)
          failures.push_back("update " + std::to_string(k) + " broke the delay schedule");
      }
      if (agent.critic_updates() != 10 || agent.actor_updates() != 5)
        failures.push_back("counts " + std::to_string(agent.critic_updates()) + "/" +
                           std::to_string(agent.actor_updates()));
    }

    r.passed = failures.empty();
    r.detail = r.passed ? "min-critic target, 0.5 noise clip and actor update every 2nd critic update all hold"
                        : failures.front();
  });
}

std::vector<CheckResult> run_oracle_suite(const Scenario& scenario, std::uint64_t seed) {
  return {check_gradients(seed),          check_alignment(seed),          check_dinkelbach_grid(seed),
          check_kinematics(scenario, seed), check_telescoping(scenario, seed), check_determinism(scenario, seed),
          check_td3_mechanism(scenario, seed)};
}

}  // namespace risjam
