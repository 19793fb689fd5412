#pragma once

// Data-parallel kernels. Each has a serial reference (`*_serial`) kept for
// testing and benchmarking; the OpenMP variant (`*_parallel`) must return
// bit-identical results for any thread count.

#include <cstdint>
#include <span>
#include <vector>

#include "risjam/channel.hpp"
#include "risjam/ris_oracle.hpp"

namespace risjam::kernels {

int max_threads();

struct GridResult {
  double sinr = 0.0;
  std::vector<int> indices;  // grid index per element; phase = -pi + 2 pi k / points
};

/// Exhaustive phase-grid SINR maximisation (N <= 3). Ties resolve to the
/// lowest flat index.
GridResult grid_search_serial(const ChannelSnapshot& snapshot, double tx_power, double jammer_power,
                              double noise_power, int points_per_dim);
GridResult grid_search_parallel(const ChannelSnapshot& snapshot, double tx_power, double jammer_power,
                                double noise_power, int points_per_dim);

/// Per-slot Dinkelbach over a sequence of snapshots.
std::vector<DinkelbachResult> dinkelbach_batch_serial(std::span<const ChannelSnapshot> snapshots, double tx_power,
                                                      double jammer_power, double noise_power,
                                                      const DinkelbachOptions& options);
std::vector<DinkelbachResult> dinkelbach_batch_parallel(std::span<const ChannelSnapshot> snapshots,
                                                        double tx_power, double jammer_power, double noise_power,
                                                        const DinkelbachOptions& options);

/// Monte-Carlo mean of |h|^2 for a ground-to-air link, split into `chunks`
/// independent streams (seed, "mc/<chunk>") summed in chunk order.
double direct_power_mc_serial(double d, double rician, double exponent, double ref_path_loss,
                              std::uint64_t seed, long draws, int chunks);
double direct_power_mc_parallel(double d, double rician, double exponent, double ref_path_loss,
                                std::uint64_t seed, long draws, int chunks);

}  // namespace risjam::kernels
