#include "risjam/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace risjam {

LinkDistances distances(const Vec3& uav, const ScenarioConfig& cfg) {
  const Vec3& bs = cfg.bs_position;
  const Vec3& ris = cfg.ris_reference;
  const Vec3& jam = cfg.jammer_position;
  return LinkDistances{(uav - bs).norm(), (ris - bs).norm(), (jam - ris).norm(),
                       (uav - jam).norm(), (uav - ris).norm()};
}

double rician_factor_bu(double altitude, double d_bu, const ChannelParams& params) {
  if (!(d_bu > 0.0)) throw DegenerateGeometry("rician_factor_bu: BS-UAV distance is zero");
  const double ratio = std::clamp(altitude / d_bu, -1.0, 1.0);
  return params.rician_xi1 * std::exp(params.rician_xi2 * std::asin(ratio));
}

ComplexVector steering_vector(int n_x, int n_y, SpatialFrequencies phi, double spacing_ratio) {
  ComplexVector out(static_cast<Eigen::Index>(n_x) * n_y);
  const double step = 2.0 * std::numbers::pi * spacing_ratio;
  for (int kx = 0; kx < n_x; ++kx) {
    for (int ky = 0; ky < n_y; ++ky) {
      out[kx * n_y + ky] = std::polar(1.0, -step * (kx * phi.phi_x + ky * phi.phi_y));
    }
  }
  return out;
}

Complex sample_direct(double d, double rician, double exponent, double ref_path_loss,
                      RandomStream& rng, Complex los) {
  if (!(d > 0.0)) throw DegenerateGeometry("sample_direct: link distance is zero");
  const double amplitude = std::sqrt(ref_path_loss * std::pow(d, -exponent));
  const Complex scatter = rng.complex_normal();
  if (std::isinf(rician)) return amplitude * los;
  return amplitude * (std::sqrt(rician / (1.0 + rician)) * los +
                      std::sqrt(1.0 / (1.0 + rician)) * scatter);
}

SpatialFrequencies bs_ris_frequencies(const ScenarioConfig& cfg) {
  const Vec3 d = cfg.ris_reference - cfg.bs_position;
  const double n = d.norm();
  if (!(n > 0.0)) throw DegenerateGeometry("RIS coincides with the BS");
  return {d.x() / n, d.y() / n};
}

SpatialFrequencies jammer_ris_frequencies(const ScenarioConfig& cfg) {
  const Vec3 d = cfg.jammer_position - cfg.ris_reference;
  const double n = d.norm();
  if (!(n > 0.0)) throw DegenerateGeometry("RIS coincides with the jammer");
  return {d.x() / n, d.y() / n};
}

namespace {

ComplexVector rician_array(const ComplexVector& los, double distance, const ChannelParams& params,
                           RandomStream& rng) {
  const double beta = params.rician_ris;
  const double amplitude = std::sqrt(params.ref_path_loss * std::pow(distance, -params.exponent_ris));
  const double w_los = std::isinf(beta) ? 1.0 : std::sqrt(beta / (1.0 + beta));
  const double w_nlos = std::isinf(beta) ? 0.0 : std::sqrt(1.0 / (1.0 + beta));
  ComplexVector out(los.size());
  for (Eigen::Index n = 0; n < los.size(); ++n) {
    out[n] = amplitude * (w_los * los[n] + w_nlos * rng.complex_normal());
  }
  return out;
}

}  // namespace

RisLinks sample_ris_links(const ScenarioConfig& cfg, const ChannelParams& params, RandomStream& rng) {
  const LinkDistances d = distances(cfg.ris_reference, cfg);
  const ComplexVector los_br = steering_vector(cfg.ris_cols, cfg.ris_rows, bs_ris_frequencies(cfg),
                                               cfg.element_spacing_ratio);
  const ComplexVector los_jr = steering_vector(cfg.ris_cols, cfg.ris_rows, jammer_ris_frequencies(cfg),
                                               cfg.element_spacing_ratio);
  RisLinks links;
  links.h_br = rician_array(los_br, d.bs_ris, params, rng);
  links.h_jr = rician_array(los_jr, d.jammer_ris, params, rng);
  return links;
}

ComplexVector ris_uav_link(const Vec3& uav, const ScenarioConfig& cfg, const ChannelParams& params) {
  const Vec3 d = uav - cfg.ris_reference;
  const double n = d.norm();
  if (!(n > 0.0)) throw DegenerateGeometry("ris_uav_link: UAV coincides with the RIS reference point");
  const ComplexVector g = steering_vector(cfg.ris_cols, cfg.ris_rows, {d.x() / n, d.y() / n},
                                          cfg.element_spacing_ratio);
  return std::sqrt(params.ref_path_loss / (n * n)) * g;
}

ChannelSnapshot sample_snapshot(const Vec3& uav, int slot, const RisLinks& ris,
                                const ScenarioConfig& cfg, const ChannelParams& params,
                                RandomStream& rng) {
  const LinkDistances d = distances(uav, cfg);
  const double beta_t = rician_factor_bu(uav.z() - cfg.bs_position.z(), d.bs_uav, params);
  ChannelSnapshot snap;
  snap.slot = slot;
  snap.h_bu = sample_direct(d.bs_uav, beta_t, params.exponent_direct, params.ref_path_loss, rng);
  snap.h_ju = sample_direct(d.jammer_uav, beta_t, params.exponent_direct, params.ref_path_loss, rng);
  snap.h_br = ris.h_br;
  snap.h_jr = ris.h_jr;
  snap.h_ru = ris_uav_link(uav, cfg, params);
  return snap;
}

}  // namespace risjam
