#include "risjam/ris_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "risjam/kernels.hpp"
#include "risjam/rng.hpp"

namespace risjam {

LinkMetrics no_ris_metrics(const ChannelSnapshot& snapshot, double tx_power, double jammer_power,
                           double noise_power) {
  LinkMetrics m;
  m.desired_power = tx_power * std::norm(snapshot.h_bu);
  m.interference_power = jammer_power * std::norm(snapshot.h_ju);
  m.sinr = m.desired_power / (m.interference_power + noise_power);
  m.rate = rate_from_sinr(m.sinr);
  return m;
}

RisPhaseVector alignment_phases(const ComplexVector& h_ru, const ComplexVector& h_x) {
  std::vector<double> theta(static_cast<std::size_t>(h_ru.size()));
  for (Eigen::Index n = 0; n < h_ru.size(); ++n) {
    theta[static_cast<std::size_t>(n)] = -std::arg(std::conj(h_ru[n]) * h_x[n]);
  }
  return RisPhaseVector(std::move(theta));
}

namespace {

// f(u) = wf |a + b.u|^2 and g(u) = wg |c + d.u|^2 + w0 with u_n = e^{j theta_n},
// all weights pre-divided by a common scale.
struct FractionalProblem {
  Complex a;
  ComplexVector b;
  Complex c;
  ComplexVector d;
  double wf = 0.0;
  double wg = 0.0;
  double w0 = 0.0;

  Eigen::Index size() const { return b.size(); }

  void sums(const Eigen::VectorXd& theta, ComplexVector& u, Complex& sb, Complex& sj) const {
    u.resize(size());
    sb = a;
    sj = c;
    for (Eigen::Index n = 0; n < size(); ++n) {
      u[n] = std::polar(1.0, theta[n]);
      sb += b[n] * u[n];
      sj += d[n] * u[n];
    }
  }
  double f(const Eigen::VectorXd& theta) const {
    ComplexVector u;
    Complex sb, sj;
    sums(theta, u, sb, sj);
    return wf * std::norm(sb);
  }
  double g(const Eigen::VectorXd& theta) const {
    ComplexVector u;
    Complex sb, sj;
    sums(theta, u, sb, sj);
    return wg * std::norm(sj) + w0;
  }
  // Parametric objective and its gradient in phase coordinates; u is scratch.
  double surrogate(const Eigen::VectorXd& theta, double lambda, Eigen::VectorXd* grad, ComplexVector& u) const {
    Complex sb, sj;
    sums(theta, u, sb, sj);
    if (grad) {
      grad->resize(size());
      for (Eigen::Index n = 0; n < size(); ++n) {
        // d|s|^2/d theta_n = -2 Im(conj(s) coeff_n u_n)
        const double df = -2.0 * wf * std::imag(std::conj(sb) * b[n] * u[n]);
        const double dg = -2.0 * wg * std::imag(std::conj(sj) * d[n] * u[n]);
        (*grad)[n] = df - lambda * dg;
      }
    }
    return wf * std::norm(sb) - lambda * (wg * std::norm(sj) + w0);
  }
  double surrogate(const Eigen::VectorXd& theta, double lambda) const {
    ComplexVector u;
    return surrogate(theta, lambda, nullptr, u);
  }
};

FractionalProblem make_problem(const ChannelSnapshot& s, double tx_power, double jammer_power, double noise_power,
                               bool snr_only) {
  if (!(noise_power > 0.0)) throw std::invalid_argument("dinkelbach_optimize: noise power must be positive");
  if (s.h_ru.size() != s.h_br.size() || s.h_ru.size() != s.h_jr.size()) {
    throw std::invalid_argument("dinkelbach_optimize: channel vector lengths differ");
  }
  FractionalProblem p;
  p.a = s.h_bu;
  p.c = s.h_ju;
  p.b = s.h_ru.conjugate().cwiseProduct(s.h_br);
  p.d = s.h_ru.conjugate().cwiseProduct(s.h_jr);
  const double pj = snr_only ? 0.0 : jammer_power;
  // Normalise by an upper bound of g so the iteration works on O(1) numbers.
  const double jam_bound = std::abs(p.c) + p.d.cwiseAbs().sum();
  const double scale = pj * jam_bound * jam_bound + noise_power;
  p.wf = tx_power / scale;
  p.wg = pj / scale;
  p.w0 = noise_power / scale;
  return p;
}

// Armijo gradient ascent on the torus; the retraction is the phase wrap. Each
// line search opens with a Barzilai-Borwein step, which copes with the narrow
// valleys that appear once lambda is large (jammer nulling).
Eigen::VectorXd ascend(const FractionalProblem& p, double lambda, Eigen::VectorXd theta, int max_iters) {
  constexpr double armijo = 1e-4;
  const Eigen::Index n = p.size();
  ComplexVector u(n);
  Eigen::VectorXd grad(n), trial(n), trial_grad(n);
  double value = p.surrogate(theta, lambda, &grad, u);
  // Curvature bound of |a + b.u|^2 along a phase direction gives the first trial step.
  const double lip = 2.0 * p.wf * p.b.cwiseAbs().sum() * (std::abs(p.a) + p.b.cwiseAbs().sum()) +
                     2.0 * lambda * p.wg * p.d.cwiseAbs().sum() * (std::abs(p.c) + p.d.cwiseAbs().sum());
  double step = lip > 0.0 ? 1.0 / lip : 1.0;
  for (int it = 0; it < max_iters; ++it) {
    const double g2 = grad.squaredNorm();
    if (g2 <= 1e-30 || !std::isfinite(g2)) break;
    bool accepted = false;
    double taken = step;
    while (taken > 1e-14) {
      for (Eigen::Index k = 0; k < n; ++k) trial[k] = wrap_phase(theta[k] + taken * grad[k]);
      const double trial_value = p.surrogate(trial, lambda, &trial_grad, u);
      if (trial_value >= value + armijo * taken * g2) {
        value = trial_value;
        accepted = true;
        break;
      }
      taken *= 0.5;
    }
    if (!accepted) break;
    // s = taken * grad (before wrapping), y = grad change.
    const double sy = taken * grad.dot(trial_grad - grad);
    const double ss = taken * taken * g2;
    theta.swap(trial);
    grad.swap(trial_grad);
    step = sy < 0.0 ? ss / -sy : 2.0 * taken;
    if (taken * taken * g2 <= 1e-30) break;
  }
  return theta;
}

}  // namespace

DinkelbachResult dinkelbach_optimize(const ChannelSnapshot& snapshot, double tx_power, double jammer_power,
                                     double noise_power, const DinkelbachOptions& options) {
  const FractionalProblem p = make_problem(snapshot, tx_power, jammer_power, noise_power, options.snr_only);
  const Eigen::Index n = p.size();
  RandomStream rng = rng_stream(options.seed, "dinkelbach-restarts");

  DinkelbachResult result;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  double lambda = p.f(theta) / p.g(theta);
  result.lambdas.push_back(lambda);
  Eigen::VectorXd best = theta;
  double best_ratio = lambda;

  if (n == 0) {
    result.phases = RisPhaseVector(0);
    result.ratio = lambda;
    result.converged = true;
    return result;
  }

  // Start co-phasing the reflections with the direct BS path.
  Eigen::VectorXd align(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    align[k] = wrap_phase(std::arg(p.a == Complex(0.0, 0.0) ? Complex(1.0, 0.0) : p.a) - std::arg(p.b[k]));
  }

  for (int outer = 0; outer < options.max_outer_iterations; ++outer) {
    std::vector<Eigen::VectorXd> starts{theta, align};
    for (int r = 0; r < options.random_restarts; ++r) {
      Eigen::VectorXd s(n);
      for (Eigen::Index k = 0; k < n; ++k) s[k] = rng.uniform(-std::numbers::pi, std::numbers::pi);
      starts.push_back(std::move(s));
    }
    Eigen::VectorXd chosen = theta;
    double chosen_value = p.surrogate(theta, lambda);
    for (auto& start : starts) {
      Eigen::VectorXd candidate = ascend(p, lambda, start, options.max_inner_iterations);
      const double value = p.surrogate(candidate, lambda);
      if (value > chosen_value) {
        chosen_value = value;
        chosen = std::move(candidate);
      }
    }
    theta = chosen;
    const double g = p.g(theta);
    const double next_lambda = p.f(theta) / g;
    result.outer_iterations = outer + 1;
    // The warm start keeps F >= 0, hence next_lambda >= lambda.
    lambda = next_lambda;
    result.lambdas.push_back(lambda);
    if (next_lambda > best_ratio) {
      best_ratio = next_lambda;
      best = theta;
    }
    if (chosen_value < options.tolerance * g) {
      result.converged = true;
      break;
    }
  }

  std::vector<double> angles(best.data(), best.data() + n);
  result.phases = RisPhaseVector(std::move(angles));
  result.ratio = best_ratio;
  return result;
}

double grid_verify(const ChannelSnapshot& snapshot, double tx_power, double jammer_power, double noise_power,
                   int points_per_dim) {
  return kernels::grid_search_parallel(snapshot, tx_power, jammer_power, noise_power, points_per_dim).sinr;
}

}  // namespace risjam
