#include "risjam/radio_link.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace risjam {

double wrap_phase(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(angle + std::numbers::pi, two_pi);
  if (w < 0.0) w += two_pi;
  w -= std::numbers::pi;
  // fmod rounding can land exactly on +pi.
  return w >= std::numbers::pi ? -std::numbers::pi : w;
}

RisPhaseVector::RisPhaseVector(std::vector<double> angles) : theta_(std::move(angles)) {
  for (double& a : theta_) a = wrap_phase(a);
}

void RisPhaseVector::set(std::size_t i, double angle) { theta_.at(i) = wrap_phase(angle); }

ComplexVector RisPhaseVector::coefficients() const {
  ComplexVector out(static_cast<Eigen::Index>(theta_.size()));
  for (std::size_t n = 0; n < theta_.size(); ++n) out[static_cast<Eigen::Index>(n)] = std::polar(1.0, theta_[n]);
  return out;
}

Complex effective_gain(Complex h_direct, const ComplexVector& h_ru, const RisPhaseVector& theta,
                       const ComplexVector& h_x) {
  if (h_ru.size() != h_x.size() || static_cast<std::size_t>(h_ru.size()) != theta.size()) {
    throw std::invalid_argument("effective_gain: length mismatch between channel vectors and phases");
  }
  Complex sum = h_direct;
  for (Eigen::Index n = 0; n < h_ru.size(); ++n) {
    sum += std::conj(h_ru[n]) * std::polar(1.0, theta[static_cast<std::size_t>(n)]) * h_x[n];
  }
  return sum;
}

double rate_from_sinr(double sinr) { return std::log2(1.0 + sinr); }

LinkMetrics sinr(const ChannelSnapshot& snapshot, const RisPhaseVector& theta, double tx_power,
                 double jammer_power, double noise_power) {
  const Complex g_b = effective_gain(snapshot.h_bu, snapshot.h_ru, theta, snapshot.h_br);
  const Complex g_j = effective_gain(snapshot.h_ju, snapshot.h_ru, theta, snapshot.h_jr);
  LinkMetrics m;
  m.desired_power = tx_power * std::norm(g_b);
  m.interference_power = jammer_power * std::norm(g_j);
  m.sinr = m.desired_power / (m.interference_power + noise_power);
  m.rate = rate_from_sinr(m.sinr);
  return m;
}

double step_reward(double rate, double d_prev, double d_curr, double weight) {
  return rate + weight * (d_prev - d_curr);
}

}  // namespace risjam
