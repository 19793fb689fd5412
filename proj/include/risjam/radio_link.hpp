#pragma once

#include <span>
#include <vector>

#include "risjam/channel.hpp"

namespace risjam {

/// RIS phase angles, one per element, kept wrapped into [-pi, pi).
class RisPhaseVector {
 public:
  RisPhaseVector() = default;
  explicit RisPhaseVector(std::size_t n) : theta_(n, 0.0) {}
  explicit RisPhaseVector(std::vector<double> angles);

  std::size_t size() const { return theta_.size(); }
  double operator[](std::size_t i) const { return theta_[i]; }
  void set(std::size_t i, double angle);
  std::span<const double> angles() const { return theta_; }
  /// e^{j theta_n}.
  ComplexVector coefficients() const;

 private:
  std::vector<double> theta_;
};

/// Maps any angle into [-pi, pi).
double wrap_phase(double angle);

struct LinkMetrics {
  double sinr = 0.0;
  double rate = 0.0;  // bits/s/Hz
  double desired_power = 0.0;
  double interference_power = 0.0;
};

/// h_direct + sum_n conj(h_ru[n]) e^{j theta_n} h_x[n].
Complex effective_gain(Complex h_direct, const ComplexVector& h_ru, const RisPhaseVector& theta,
                       const ComplexVector& h_x);

LinkMetrics sinr(const ChannelSnapshot& snapshot, const RisPhaseVector& theta, double tx_power,
                 double jammer_power, double noise_power);

/// log2(1 + sinr).
double rate_from_sinr(double sinr);

/// Rate plus weighted progress toward the goal.
double step_reward(double rate, double d_prev, double d_curr, double weight);

}  // namespace risjam
