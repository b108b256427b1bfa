#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wirecons/channel.hpp"
#include "wirecons/protocol.hpp"

namespace wirecons::perf {

struct LatencyBreakdown {
  double per_message_s;  // T
  double t1_s;           // (n-1)*T, broadcast stages
  double t2_s;           // T, single-message stage
  double total_s;
};

/// Per-stage energy in joules. total_j is the ordered sum of the stage
/// entries, so the breakdown always adds up to it bit for bit.
struct EnergyBreakdown {
  std::vector<std::pair<std::string, double>> stages_j;
  double total_j;
};

struct PerfReport {
  Protocol protocol;
  int node_count;
  double per_message_s;
  double t1_s;
  double t2_s;
  double total_latency_s;
  double throughput_tps;
  double energy_j;
};

/// Solves the finite-blocklength relation
///   1 - p_s = Q((u*(C-R) + 0.5*log2(u)) / (log2(e) * sqrt(u))),  u = T*B*N,
/// for the per-message latency T. The blocklength u is treated as continuous;
/// the bracket grows geometrically from a machine-small value until the
/// objective changes sign.
double per_message_latency(const channel::SignalProfile& profile, double p_s);

/// PBFT round latency: three broadcast stages plus one reply,
/// total = 3*(n-1)*T + T = (3n-2)*T.
LatencyBreakdown pbft_latency(int node_count, double per_message_s);

/// RAFT round latency: one broadcast plus one reply, total = n*T.
LatencyBreakdown raft_latency(int node_count, double per_message_s);

/// Transactions per second as the reciprocal of the round latency.
double throughput(double total_latency_s);

/// PBFT energy: (n-1)*t1*P_T + (n-1)^2*t1*P_T + n*(n-1)*t1*P_T + n*t2*P_T.
EnergyBreakdown pbft_energy(int node_count, double t1_s, double t2_s,
                            double transmit_power_w);
/// RAFT energy: (n-1)*t1*P_T + (n-1)*t2*P_T.
EnergyBreakdown raft_energy(int node_count, double t1_s, double t2_s,
                            double transmit_power_w);

/// Closed-form totals of the two energy models, for cross-checking the
/// breakdowns.
double pbft_energy_closed_form(int node_count, double t1_s, double t2_s,
                               double transmit_power_w);
double raft_energy_closed_form(int node_count, double t1_s, double t2_s,
                               double transmit_power_w);

/// Full latency/throughput/energy chain for one protocol at a given link
/// success probability.
PerfReport evaluate(Protocol protocol, const channel::SignalProfile& profile,
                    int node_count, double p_s);

}  // namespace wirecons::perf
