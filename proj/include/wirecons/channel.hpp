#pragma once

#include <string>

#include "wirecons/numerics.hpp"
#include "wirecons/protocol.hpp"

namespace wirecons::channel {

/// Physical-layer parameter bundle for one signal class. Units are plain SI:
/// watts, hertz, bits per second.
struct SignalProfile {
  std::string name;            // "thz", "mmwave", or "custom"
  double transmit_power_w;     // P_T
  double noise_power_w;        // P_N
  double bandwidth_hz;         // B
  double capacity_bps;         // C
  double rate_bps;             // R
  double path_loss_exponent;   // alpha
  int subcarriers = 1;         // N

  void validate() const;
};

/// Built-in 0.22 THz profile: P_T = 1 W, P_N = 0.2 W, B = 10 GHz,
/// C = 80 Gbps, R = 40 Gbps, alpha = 2.229.
SignalProfile thz_profile();

/// Built-in 28 GHz mmWave profile: same powers, B = 800 MHz, C = 8 Gbps,
/// R = 4 Gbps, alpha = 1.7.
SignalProfile mmwave_profile();

enum class ThresholdMode {
  db_to_linear,     // snr_threshold_db holds decibels, z = 10^(db/10)
  linear_as_given,  // snr_threshold_db already holds the linear ratio
};

/// Consensus-network geometry: n nodes drawn from a planar Poisson process of
/// density gamma, receivers inside radius R_a = sqrt(n / (pi * gamma)).
struct NetworkConfig {
  int node_count;             // n
  double node_density;        // gamma, nodes per square meter
  double snr_threshold_db;    // z (interpretation set by threshold_mode)
  ThresholdMode threshold_mode = ThresholdMode::db_to_linear;
  Protocol protocol = Protocol::pbft;

  double radius_m() const;
  double snr_threshold_linear() const;
  void validate() const;
};

struct PathLossParams {
  double reference_distance_m;  // r0
  double reference_loss_db;     // PL(r0)
  double shadowing_sigma_db = 0.0;

  void validate() const;
};

/// Instantaneous SNR at distance r with fading power gain h:
/// P_T * h * r^(-alpha) / P_N.
double snr(const SignalProfile& profile, double fading_gain, double distance_m);

/// Log-distance path loss PL(r0) + 10 * alpha * log10(r / r0) + shadowing_draw,
/// in dB. The shadowing draw is supplied by the caller; the analytic pipeline
/// always passes 0.
double path_loss_db(const PathLossParams& params, double path_loss_exponent,
                    double distance_m, double shadowing_draw_db = 0.0);

/// Average transmission success probability P_s over the random node distance
/// and the exponential fading gain:
/// (2*pi*gamma/n) * integral_0^R_a exp(-P_N * r^alpha * z / P_T) * r dr,
/// clamped to [0, 1].
double transmission_success_probability(const SignalProfile& profile,
                                        const NetworkConfig& net,
                                        const numerics::QuadratureSpec& quad = {});

/// Largest distance at which the SNR threshold is met with certainty for the
/// given fading gain: (P_T * h / (z * P_N))^(1/alpha). Substituting the result
/// back into snr() reproduces z exactly.
double active_distance(const SignalProfile& profile, double z_linear,
                       double fading_gain = 1.0);

}  // namespace wirecons::channel
