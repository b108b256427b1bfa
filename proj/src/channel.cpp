#include "wirecons/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wirecons::channel {

void SignalProfile::validate() const {
  if (!(transmit_power_w > 0.0))
    throw std::domain_error("SignalProfile: transmit power must be > 0");
  if (!(noise_power_w > 0.0))
    throw std::domain_error("SignalProfile: noise power must be > 0");
  if (!(bandwidth_hz > 0.0))
    throw std::domain_error("SignalProfile: bandwidth must be > 0");
  if (!(rate_bps > 0.0))
    throw std::domain_error("SignalProfile: rate must be > 0");
  if (!(capacity_bps > rate_bps))
    throw std::domain_error("SignalProfile: capacity must exceed rate");
  if (!(path_loss_exponent > 0.0))
    throw std::domain_error("SignalProfile: path-loss exponent must be > 0");
  if (subcarriers < 1)
    throw std::domain_error("SignalProfile: subcarriers must be >= 1");
}

SignalProfile thz_profile() {
  return {"thz", 1.0, 0.2, 10e9, 80e9, 40e9, 2.229, 1};
}

SignalProfile mmwave_profile() {
  return {"mmwave", 1.0, 0.2, 800e6, 8e9, 4e9, 1.7, 1};
}

double NetworkConfig::radius_m() const {
  return std::sqrt(node_count / (std::numbers::pi * node_density));
}

double NetworkConfig::snr_threshold_linear() const {
  return threshold_mode == ThresholdMode::db_to_linear
             ? std::pow(10.0, snr_threshold_db / 10.0)
             : snr_threshold_db;
}

void NetworkConfig::validate() const {
  if (node_count < 2)
    throw std::domain_error("NetworkConfig: node count must be >= 2");
  if (!(node_density > 0.0))
    throw std::domain_error("NetworkConfig: node density must be > 0");
  if (!std::isfinite(snr_threshold_db))
    throw std::domain_error("NetworkConfig: SNR threshold must be finite");
  if (threshold_mode == ThresholdMode::linear_as_given &&
      !(snr_threshold_db >= 0.0))
    throw std::domain_error(
        "NetworkConfig: a linear SNR threshold must be >= 0");
  if (!std::isfinite(radius_m()) || !(radius_m() > 0.0))
    throw std::domain_error("NetworkConfig: derived radius is not positive");
}

void PathLossParams::validate() const {
  if (!(reference_distance_m > 0.0))
    throw std::domain_error("PathLossParams: reference distance must be > 0");
  if (!(shadowing_sigma_db >= 0.0))
    throw std::domain_error("PathLossParams: shadowing sigma must be >= 0");
}

double snr(const SignalProfile& profile, double fading_gain,
           double distance_m) {
  profile.validate();
  if (!(fading_gain >= 0.0))
    throw std::domain_error("snr: fading gain must be >= 0");
  if (!(distance_m > 0.0))
    throw std::domain_error("snr: distance must be > 0");
  return profile.transmit_power_w * fading_gain *
         std::pow(distance_m, -profile.path_loss_exponent) /
         profile.noise_power_w;
}

double path_loss_db(const PathLossParams& params, double path_loss_exponent,
                    double distance_m, double shadowing_draw_db) {
  params.validate();
  if (!(path_loss_exponent > 0.0))
    throw std::domain_error("path_loss_db: exponent must be > 0");
  if (!(distance_m >= params.reference_distance_m))
    throw std::domain_error(
        "path_loss_db: distance must be >= the reference distance");
  return params.reference_loss_db +
         10.0 * path_loss_exponent *
             std::log10(distance_m / params.reference_distance_m) +
         shadowing_draw_db;
}

double transmission_success_probability(const SignalProfile& profile,
                                        const NetworkConfig& net,
                                        const numerics::QuadratureSpec& quad) {
  profile.validate();
  net.validate();
  const double z = net.snr_threshold_linear();
  const double radius = net.radius_m();
  const double decay =
      profile.noise_power_w * z / profile.transmit_power_w;
  const double alpha = profile.path_loss_exponent;
  const double integral = numerics::integrate(
      [decay, alpha](double r) {
        return std::exp(-decay * std::pow(r, alpha)) * r;
      },
      0.0, radius, quad);
  const double normalization =
      2.0 * std::numbers::pi * net.node_density / net.node_count;
  return std::clamp(normalization * integral, 0.0, 1.0);
}

double active_distance(const SignalProfile& profile, double z_linear,
                       double fading_gain) {
  profile.validate();
  if (!(fading_gain > 0.0))
    throw std::domain_error("active_distance: fading gain must be > 0");
  if (!(z_linear > 0.0))
    throw std::domain_error("active_distance: linear threshold must be > 0");
  const double base = profile.transmit_power_w * fading_gain /
                      (z_linear * profile.noise_power_w);
  return std::pow(base, 1.0 / profile.path_loss_exponent);
}

}  // namespace wirecons::channel
