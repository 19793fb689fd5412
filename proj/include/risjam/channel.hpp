#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Core>

#include "risjam/config.hpp"
#include "risjam/rng.hpp"

namespace risjam {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;

/// Raised when a link distance is zero (UAV on top of the BS or the RIS).
class DegenerateGeometry : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Direction cosines of an arrival/departure direction along the array axes.
struct SpatialFrequencies {
  double phi_x = 0.0;
  double phi_y = 0.0;
};

struct LinkDistances {
  double bs_uav = 0.0;
  double bs_ris = 0.0;
  double jammer_ris = 0.0;
  double jammer_uav = 0.0;
  double ris_uav = 0.0;
};

/// All complex gains of one time slot.
struct ChannelSnapshot {
  Complex h_bu{0.0, 0.0};
  Complex h_ju{0.0, 0.0};
  ComplexVector h_br;
  ComplexVector h_jr;
  ComplexVector h_ru;
  int slot = 0;

  int element_count() const { return static_cast<int>(h_ru.size()); }
};

/// Quasi-static B-R and J-R gains.
struct RisLinks {
  ComplexVector h_br;
  ComplexVector h_jr;
};

LinkDistances distances(const Vec3& uav, const ScenarioConfig& cfg);

/// Elevation-dependent Rician factor of the ground-to-air links.
double rician_factor_bu(double altitude, double d_bu, const ChannelParams& params);

/// URA response, element (col kx, row ky) at flat index kx * n_y + ky:
/// exp(-j 2 pi (d/lambda) (kx phi_x + ky phi_y)).
ComplexVector steering_vector(int n_x, int n_y, SpatialFrequencies phi,
                              double spacing_ratio = 0.5);

/// Ground-to-air Rician gain with a unit LoS phasor `los`.
Complex sample_direct(double d, double rician, double exponent, double ref_path_loss,
                      RandomStream& rng, Complex los = {1.0, 0.0});

SpatialFrequencies bs_ris_frequencies(const ScenarioConfig& cfg);
SpatialFrequencies jammer_ris_frequencies(const ScenarioConfig& cfg);

RisLinks sample_ris_links(const ScenarioConfig& cfg, const ChannelParams& params, RandomStream& rng);

/// Deterministic LoS RIS-to-UAV gain with a free-space exponent of 2.
ComplexVector ris_uav_link(const Vec3& uav, const ScenarioConfig& cfg, const ChannelParams& params);

/// Draws the per-slot ground-to-air gains at `uav` and combines them with
/// the given RIS links.
ChannelSnapshot sample_snapshot(const Vec3& uav, int slot, const RisLinks& ris,
                                const ScenarioConfig& cfg, const ChannelParams& params,
                                RandomStream& rng);

}  // namespace risjam
