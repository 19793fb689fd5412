#include "risjam/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <omp.h>

#include "risjam/rng.hpp"

namespace risjam::kernels {

int max_threads() { return omp_get_max_threads(); }

namespace {

struct GridTables {
  int elements = 0;
  int points = 0;
  long total = 0;
  Complex direct_b, direct_j;
  std::vector<Complex> refl_b;  // [n * points + k]
  std::vector<Complex> refl_j;
  double tx = 0.0, jam = 0.0, noise = 0.0;

  double sinr_at(long flat) const {
    Complex sb = direct_b;
    Complex sj = direct_j;
    for (int n = 0; n < elements; ++n) {
      const int k = static_cast<int>(flat % points);
      flat /= points;
      sb += refl_b[static_cast<std::size_t>(n * points + k)];
      sj += refl_j[static_cast<std::size_t>(n * points + k)];
    }
    return tx * std::norm(sb) / (jam * std::norm(sj) + noise);
  }
};

GridTables make_tables(const ChannelSnapshot& s, double tx, double jam, double noise, int points) {
  const int n = s.element_count();
  if (n > 3) throw std::invalid_argument("grid search supports at most 3 elements, got " + std::to_string(n));
  if (points < 1) throw std::invalid_argument("grid search needs at least one point per dimension");
  GridTables t;
  t.elements = n;
  t.points = points;
  t.total = 1;
  for (int i = 0; i < n; ++i) t.total *= points;
  t.direct_b = s.h_bu;
  t.direct_j = s.h_ju;
  t.tx = tx;
  t.jam = jam;
  t.noise = noise;
  t.refl_b.resize(static_cast<std::size_t>(n * points));
  t.refl_j.resize(static_cast<std::size_t>(n * points));
  for (int e = 0; e < n; ++e) {
    for (int k = 0; k < points; ++k) {
      const Complex u = std::polar(1.0, -std::numbers::pi + 2.0 * std::numbers::pi * k / points);
      t.refl_b[static_cast<std::size_t>(e * points + k)] = std::conj(s.h_ru[e]) * u * s.h_br[e];
      t.refl_j[static_cast<std::size_t>(e * points + k)] = std::conj(s.h_ru[e]) * u * s.h_jr[e];
    }
  }
  return t;
}

GridResult decode(const GridTables& t, double best, long flat) {
  GridResult r;
  r.sinr = best;
  for (int n = 0; n < t.elements; ++n) {
    r.indices.push_back(static_cast<int>(flat % t.points));
    flat /= t.points;
  }
  return r;
}

}  // namespace

GridResult grid_search_serial(const ChannelSnapshot& snapshot, double tx_power, double jammer_power,
                              double noise_power, int points_per_dim) {
  const GridTables t = make_tables(snapshot, tx_power, jammer_power, noise_power, points_per_dim);
  double best = -1.0;
  long best_flat = 0;
  for (long flat = 0; flat < t.total; ++flat) {
    const double v = t.sinr_at(flat);
    if (v > best) {
      best = v;
      best_flat = flat;
    }
  }
  return decode(t, best, best_flat);
}

GridResult grid_search_parallel(const ChannelSnapshot& snapshot, double tx_power, double jammer_power,
                                double noise_power, int points_per_dim) {
  const GridTables t = make_tables(snapshot, tx_power, jammer_power, noise_power, points_per_dim);
  double best = -1.0;
  long best_flat = 0;
#pragma omp parallel
  {
    double local_best = -1.0;
    long local_flat = 0;
#pragma omp for schedule(static) nowait
    for (long flat = 0; flat < t.total; ++flat) {
      const double v = t.sinr_at(flat);
      if (v > local_best) {
        local_best = v;
        local_flat = flat;
      }
    }
#pragma omp critical(risjam_grid_best)
    {
      if (local_best > best || (local_best == best && local_flat < best_flat)) {
        best = local_best;
        best_flat = local_flat;
      }
    }
  }
  return decode(t, best, best_flat);
}

std::vector<DinkelbachResult> dinkelbach_batch_serial(std::span<const ChannelSnapshot> snapshots, double tx_power,
                                                      double jammer_power, double noise_power,
                                                      const DinkelbachOptions& options) {
  std::vector<DinkelbachResult> out;
  out.reserve(snapshots.size());
  for (const auto& s : snapshots) out.push_back(dinkelbach_optimize(s, tx_power, jammer_power, noise_power, options));
  return out;
}

std::vector<DinkelbachResult> dinkelbach_batch_parallel(std::span<const ChannelSnapshot> snapshots,
                                                        double tx_power, double jammer_power, double noise_power,
                                                        const DinkelbachOptions& options) {
  std::vector<DinkelbachResult> out(snapshots.size());
  const auto n = static_cast<long>(snapshots.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        dinkelbach_optimize(snapshots[static_cast<std::size_t>(i)], tx_power, jammer_power, noise_power, options);
  }
  return out;
}

namespace {

double chunk_power_sum(double d, double rician, double exponent, double rho, std::uint64_t seed, long draws,
                       int chunks, int chunk) {
  const long begin = draws * chunk / chunks;
  const long end = draws * (chunk + 1) / chunks;
  RandomStream rng = rng_stream(seed, "mc/" + std::to_string(chunk));
  double sum = 0.0;
  for (long i = begin; i < end; ++i) sum += std::norm(sample_direct(d, rician, exponent, rho, rng));
  return sum;
}

}  // namespace

double direct_power_mc_serial(double d, double rician, double exponent, double ref_path_loss, std::uint64_t seed,
                              long draws, int chunks) {
  if (draws < 1 || chunks < 1) throw std::invalid_argument("direct_power_mc: draws and chunks must be positive");
  double total = 0.0;
  for (int c = 0; c < chunks; ++c) total += chunk_power_sum(d, rician, exponent, ref_path_loss, seed, draws, chunks, c);
  return total / static_cast<double>(draws);
}

double direct_power_mc_parallel(double d, double rician, double exponent, double ref_path_loss, std::uint64_t seed,
                                long draws, int chunks) {
  if (draws < 1 || chunks < 1) throw std::invalid_argument("direct_power_mc: draws and chunks must be positive");
  std::vector<double> partial(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(static)
  for (int c = 0; c < chunks; ++c) {
    partial[static_cast<std::size_t>(c)] = chunk_power_sum(d, rician, exponent, ref_path_loss, seed, draws, chunks, c);
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total / static_cast<double>(draws);
}

}  // namespace risjam::kernels
