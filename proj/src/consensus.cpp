#include "wirecons/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wirecons::consensus {
namespace {

// Below this population the binomial coefficient stays within (or near) the
// exactly representable integer range of a double; above it the term is
// assembled in log space to avoid overflow on large sweeps.
constexpr int kLogSpaceThreshold = 60;

double choose(int m, int k) {
  if (k < 0 || k > m) return 0.0;
  k = std::min(k, m - k);
  double c = 1.0;
  for (int t = 1; t <= k; ++t) c = c * double(m - k + t) / double(t);
  return c;
}

double log_choose(int m, int k) {
  return std::lgamma(m + 1.0) - std::lgamma(k + 1.0) -
         std::lgamma(m - k + 1.0);
}

// P(exactly k failures among m nodes), failure probability q per node.
double failure_pmf(int m, int k, double q) {
  if (k < 0 || k > m) return 0.0;
  if (q == 0.0) return k == 0 ? 1.0 : 0.0;
  if (q == 1.0) return k == m ? 1.0 : 0.0;
  if (m <= kLogSpaceThreshold)
    return choose(m, k) * std::pow(q, k) * std::pow(1.0 - q, m - k);
  return std::exp(log_choose(m, k) + k * std::log(q) +
                  (m - k) * std::log1p(-q));
}

// P(at most c failures among m nodes).
double failure_cdf(int m, int c, double q) {
  double sum = 0.0;
  for (int k = 0; k <= std::min(c, m); ++k) sum += failure_pmf(m, k, q);
  return std::min(sum, 1.0);
}

double unit_clamp(double x) { return std::clamp(x, 0.0, 1.0); }

// Conditional stage probability; the chain is empty-by-zero when the
// preceding stages are unreachable.
double conditional(double joint, double prior) {
  if (prior <= 0.0) return 0.0;
  return unit_clamp(joint / prior);
}

void check_success_probability(const char* where, double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error(std::string(where) + ": p must lie in [0, 1]");
}

}  // namespace

FaultBudget fault_budget(Protocol protocol, int node_count) {
  if (node_count < 2)
    throw std::domain_error("fault_budget: node count must be >= 2");
  if (protocol == Protocol::pbft) {
    const int b = (node_count - 1) / 3;
    return {protocol, node_count, b, node_count == 3 * b + 1};
  }
  const int f = (node_count - 1) / 2;
  return {protocol, node_count, f, node_count == 2 * f + 1};
}

int primary_index(std::uint64_t view, int node_set_size) {
  if (node_set_size < 1)
    throw std::domain_error("primary_index: node set must be non-empty");
  return static_cast<int>(view % static_cast<std::uint64_t>(node_set_size));
}

double ConsensusBreakdown::stage_geometric_mean() const {
  if (per_stage.empty()) return total;
  return std::pow(total, 1.0 / double(per_stage.size()));
}

ConsensusBreakdown pbft_success(int node_count, double p) {
  check_success_probability("pbft_success", p);
  const int n = node_count;
  const int b = fault_budget(Protocol::pbft, n).budget;
  const double q = 1.0 - p;

  // With c failures still allowed, the stage populations are fixed:
  // n-1-b+c nodes in the prepare stage and n-b+c in the commit and reply
  // stages (population minus spent budget is constant down the chain), so
  // every layer collapses to a one-dimensional table over c.
  std::vector<double> reply_cdf(b + 1), prepare_cdf(b + 1);
  for (int c = 0; c <= b; ++c) {
    reply_cdf[c] = failure_cdf(n - b + c, c, q);      // also the commit layer
    prepare_cdf[c] = failure_cdf(n - 1 - b + c, c, q);
  }

  std::vector<double> commit_reply(b + 1);  // stages 3..4 given budget c
  for (int c = 0; c <= b; ++c) {
    double sum = 0.0;
    for (int k = 0; k <= c; ++k)
      sum += failure_pmf(n - b + c, k, q) * reply_cdf[c - k];
    commit_reply[c] = sum;
  }

  std::vector<double> from_prepare2(b + 1);  // stages 2..3 given budget c
  std::vector<double> from_prepare3(b + 1);  // stages 2..4 given budget c
  for (int c = 0; c <= b; ++c) {
    double sum2 = 0.0, sum3 = 0.0;
    for (int j = 0; j <= c; ++j) {
      const double term = failure_pmf(n - 1 - b + c, j, q);
      sum2 += term * reply_cdf[c - j];  // commit cdf; same population per c
      sum3 += term * commit_reply[c - j];
    }
    from_prepare2[c] = sum2;
    from_prepare3[c] = sum3;
  }

  double joint1 = 0.0, joint2 = 0.0, joint3 = 0.0, joint4 = 0.0;
  for (int i = 0; i <= b; ++i) {
    const double term = failure_pmf(n - 1, i, q);
    joint1 += term;
    joint2 += term * prepare_cdf[b - i];
    joint3 += term * from_prepare2[b - i];
    joint4 += term * from_prepare3[b - i];
  }
  joint1 = unit_clamp(joint1);
  joint2 = unit_clamp(joint2);
  joint3 = unit_clamp(joint3);
  joint4 = unit_clamp(joint4);

  ConsensusBreakdown out;
  out.protocol = Protocol::pbft;
  out.per_stage = {{"pre-prepare", joint1},
                   {"prepare", conditional(joint2, joint1)},
                   {"commit", conditional(joint3, joint2)},
                   {"reply", conditional(joint4, joint3)}};
  out.total = joint4;
  return out;
}

ConsensusBreakdown raft_success(int node_count, double p) {
  check_success_probability("raft_success", p);
  const int n = node_count;
  const int f = fault_budget(Protocol::raft, n).budget;
  const double q = 1.0 - p;

  std::vector<double> uplink_cdf(f + 1);
  for (int c = 0; c <= f; ++c) uplink_cdf[c] = failure_cdf(n - 1 - f + c, c, q);

  double joint1 = 0.0, joint2 = 0.0;
  for (int i = 0; i <= f; ++i) {
    const double term = failure_pmf(n - 1, i, q);
    joint1 += term;
    joint2 += term * uplink_cdf[f - i];
  }
  joint1 = unit_clamp(joint1);
  joint2 = unit_clamp(joint2);

  ConsensusBreakdown out;
  out.protocol = Protocol::raft;
  out.per_stage = {{"downlink", joint1},
                   {"uplink", conditional(joint2, joint1)}};
  out.total = joint2;
  return out;
}

}  // namespace wirecons::consensus
