#pragma once

#include <cstdint>
#include <vector>

#include "risjam/channel.hpp"
#include "risjam/radio_link.hpp"

namespace risjam {

/// SINR with every reflected path removed.
LinkMetrics no_ris_metrics(const ChannelSnapshot& snapshot, double tx_power, double jammer_power,
                           double noise_power);

struct DinkelbachOptions {
  double tolerance = 1e-10;    // outer stop: F(theta; lambda) < tolerance * g(theta)
  int max_outer_iterations = 60;
  int max_inner_iterations = 2000;
  int random_restarts = 3;
  /// Maximise the SNR (jammer term dropped from the denominator).
  bool snr_only = false;
  std::uint64_t seed = 0;
};

struct DinkelbachResult {
  RisPhaseVector phases;
  double ratio = 0.0;               // f/g at `phases` (SINR, or SNR with snr_only)
  std::vector<double> lambdas;      // lambda_0 (theta = 0) then one entry per outer iteration
  int outer_iterations = 0;
  bool converged = false;           // false: best iterate returned after max_outer_iterations
};

/// Perfect-CSI RIS configuration: Dinkelbach iterations on f - lambda g,
/// each parametric subproblem solved by gradient ascent on the phase torus
/// (unit-modulus manifold) with Armijo backtracking, warm-started from the
/// previous iterate plus a direct-path alignment start and random restarts.
DinkelbachResult dinkelbach_optimize(const ChannelSnapshot& snapshot, double tx_power, double jammer_power,
                                     double noise_power, const DinkelbachOptions& options = {});

/// Exhaustive SINR maximum over a uniform phase grid of `points_per_dim`
/// values per element. Requires N <= 3.
double grid_verify(const ChannelSnapshot& snapshot, double tx_power, double jammer_power, double noise_power,
                   int points_per_dim);

/// Closed-form phases that co-phase every reflected term conj(h_ru) h_x.
RisPhaseVector alignment_phases(const ComplexVector& h_ru, const ComplexVector& h_x);

}  // namespace risjam
