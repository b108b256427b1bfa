#include "wirecons/perf.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wirecons/numerics.hpp"

namespace wirecons::perf {
namespace {

void check_node_count(const char* where, int n) {
  if (n < 2)
    throw std::domain_error(std::string(where) + ": node count must be >= 2");
}

void check_positive(const char* where, const char* what, double v) {
  if (!(v > 0.0))
    throw std::domain_error(std::string(where) + ": " + what +
                            " must be > 0");
}

}  // namespace

double per_message_latency(const channel::SignalProfile& profile, double p_s) {
  profile.validate();
  if (!(p_s > 0.0 && p_s < 1.0))
    throw std::domain_error(
        "per_message_latency: p_s must lie strictly in (0, 1)");

  const double rate_gap = profile.capacity_bps - profile.rate_bps;
  const double samples_per_second =
      profile.bandwidth_hz * profile.subcarriers;
  const double target = numerics::q_inverse(1.0 - p_s);

  // Monotone increasing in the blocklength u, so the root is unique.
  const auto margin = [rate_gap, target](double u) {
    return (u * rate_gap + 0.5 * std::log2(u)) /
               (std::numbers::log2e * std::sqrt(u)) -
           target;
  };

  double lo = 1e-300;
  double hi = 1e-299;
  while (margin(hi) < 0.0) {
    lo = hi;
    hi *= 10.0;
    if (hi > 1e300)
      throw numerics::NumericalError(
          "per_message_latency: failed to bracket the blocklength root");
  }
  const double blocklength =
      numerics::find_root(margin, {lo, hi}, 1e-15);
  return blocklength / samples_per_second;
}

LatencyBreakdown pbft_latency(int node_count, double per_message_s) {
  check_node_count("pbft_latency", node_count);
  check_positive("pbft_latency", "per-message latency", per_message_s);
  const double t1 = (node_count - 1) * per_message_s;
  const double t2 = per_message_s;
  return {per_message_s, t1, t2, 3.0 * t1 + t2};
}

LatencyBreakdown raft_latency(int node_count, double per_message_s) {
  check_node_count("raft_latency", node_count);
  check_positive("raft_latency", "per-message latency", per_message_s);
  const double t1 = (node_count - 1) * per_message_s;
  const double t2 = per_message_s;
  return {per_message_s, t1, t2, t1 + t2};
}

double throughput(double total_latency_s) {
  check_positive("throughput", "total latency", total_latency_s);
  return 1.0 / total_latency_s;
}

EnergyBreakdown pbft_energy(int node_count, double t1_s, double t2_s,
                            double transmit_power_w) {
  check_node_count("pbft_energy", node_count);
  check_positive("pbft_energy", "t1", t1_s);
  check_positive("pbft_energy", "t2", t2_s);
  check_positive("pbft_energy", "transmit power", transmit_power_w);
  const double x = t1_s * transmit_power_w;
  const double y = t2_s * transmit_power_w;
  const double m = node_count - 1.0;
  EnergyBreakdown out;
  out.stages_j = {{"pre-prepare", m * x},
                  {"prepare", m * m * x},
                  {"commit", node_count * m * x},
                  {"reply", node_count * y}};
  out.total_j = 0.0;
  for (const auto& [label, joules] : out.stages_j) out.total_j += joules;
  return out;
}

EnergyBreakdown raft_energy(int node_count, double t1_s, double t2_s,
                            double transmit_power_w) {
  check_node_count("raft_energy", node_count);
  check_positive("raft_energy", "t1", t1_s);
  check_positive("raft_energy", "t2", t2_s);
  check_positive("raft_energy", "transmit power", transmit_power_w);
  const double m = node_count - 1.0;
  EnergyBreakdown out;
  out.stages_j = {{"downlink", m * t1_s * transmit_power_w},
                  {"uplink", m * t2_s * transmit_power_w}};
  out.total_j = 0.0;
  for (const auto& [label, joules] : out.stages_j) out.total_j += joules;
  return out;
}

double pbft_energy_closed_form(int node_count, double t1_s, double t2_s,
                               double transmit_power_w) {
  const double n = node_count;
  return (2.0 * n * n - 2.0 * n) * t1_s * transmit_power_w +
         n * t2_s * transmit_power_w;
}

double raft_energy_closed_form(int node_count, double t1_s, double t2_s,
                               double transmit_power_w) {
  return (node_count - 1.0) * (t1_s + t2_s) * transmit_power_w;
}

PerfReport evaluate(Protocol protocol, const channel::SignalProfile& profile,
                    int node_count, double p_s) {
  const double per_message = per_message_latency(profile, p_s);
  const LatencyBreakdown lat = protocol == Protocol::pbft
                                   ? pbft_latency(node_count, per_message)
                                   : raft_latency(node_count, per_message);
  const EnergyBreakdown energy =
      protocol == Protocol::pbft
          ? pbft_energy(node_count, lat.t1_s, lat.t2_s,
                        profile.transmit_power_w)
          : raft_energy(node_count, lat.t1_s, lat.t2_s,
                        profile.transmit_power_w);
  return {protocol,        node_count,
          lat.per_message_s, lat.t1_s,
          lat.t2_s,        lat.total_s,
          throughput(lat.total_s), energy.total_j};
}

}  // namespace wirecons::perf
