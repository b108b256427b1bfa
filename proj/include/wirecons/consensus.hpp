#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wirecons/protocol.hpp"

namespace wirecons::consensus {

struct FaultBudget {
  Protocol protocol;
  int node_count;
  int budget;          // b for PBFT, f for RAFT
  bool optimal_size;   // n == 3b+1 (PBFT) or n == 2f+1 (RAFT)
};

/// Tolerated failure count: floor((n-1)/3) for PBFT, floor((n-1)/2) for RAFT.
FaultBudget fault_budget(Protocol protocol, int node_count);

/// Round-robin primary selection: view mod |S|.
int primary_index(std::uint64_t view, int node_set_size);

/// Stage-by-stage success probabilities of one consensus evaluation.
///
/// per_stage lists the stages in protocol order. The first entry is the
/// marginal probability that the first stage stays within the fault budget;
/// each later entry is conditional on all earlier stages having done so, so
/// the product of the entries equals `total`. stage_geometric_mean() is the
/// alternative single-number summary total^(1/#stages).
struct ConsensusBreakdown {
  Protocol protocol;
  std::vector<std::pair<std::string, double>> per_stage;
  double total;

  double stage_geometric_mean() const;
};

/// Success probability of the four-stage PBFT round (pre-prepare, prepare,
/// commit, reply) when each node independently completes a stage with
/// probability p and at most b = floor((n-1)/3) cumulative failures are
/// tolerated.
ConsensusBreakdown pbft_success(int node_count, double p);

/// Two-stage RAFT analogue (downlink, uplink) with budget f = floor((n-1)/2).
ConsensusBreakdown raft_success(int node_count, double p);

}  // namespace wirecons::consensus
