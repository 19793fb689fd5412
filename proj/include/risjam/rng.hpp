#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace risjam {

/// Seeded random source. Uniform and Gaussian draws are derived from the raw
/// 64-bit engine output by hand (not via <random> distributions, whose
/// algorithms differ between standard libraries), so a given (seed, label)
/// pair yields the same sequence on every platform.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::string_view label);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  /// Zero-mean circularly-symmetric complex Gaussian with E|z|^2 = 1.
  std::complex<double> complex_normal();

  const std::string& label() const { return label_; }

 private:
  std::mt19937_64 engine_;
  std::string label_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Independent, reproducible stream for (master_seed, label).
RandomStream rng_stream(std::uint64_t master_seed, std::string_view label);

}  // namespace risjam
