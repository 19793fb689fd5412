#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "risjam/config.hpp"

namespace risjam {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;  // 0: unbounded
};

/// "PASS [3] name (1.23 s): detail".
std::string format_check(const CheckResult& r);

/// Backprop vs central differences on 100 random actor- and critic-shaped
/// networks, every parameter and the input gradient.
CheckResult check_gradients(std::uint64_t seed);
/// Jammer-free, direct-free snapshots: Dinkelbach and the closed-form phases
/// reach (sum |h_ru||h_br|)^2.
CheckResult check_alignment(std::uint64_t seed);
/// Dinkelbach against an exhaustive phase grid for N in {1, 2, 3}, with a
/// nondecreasing lambda sequence.
CheckResult check_dinkelbach_grid(std::uint64_t seed);
/// Random (state, action) steps stay feasible; projection is idempotent.
CheckResult check_kinematics(const Scenario& scenario, std::uint64_t seed);
/// Episode reward equals cumulative rate plus weighted net progress.
CheckResult check_telescoping(const Scenario& scenario, std::uint64_t seed);
/// Two identical 20-episode runs write byte-identical metrics.
CheckResult check_determinism(const Scenario& scenario, std::uint64_t seed);
/// Min-critic targets, target-noise clipping and delayed actor updates.
CheckResult check_td3_mechanism(const Scenario& scenario, std::uint64_t seed);

/// Everything above, in order.
std::vector<CheckResult> run_oracle_suite(const Scenario& scenario, std::uint64_t seed);

}  // namespace risjam
