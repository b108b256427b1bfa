#pragma once

#include <cmath>
#include <cstdint>

#include "wirecons/channel.hpp"

namespace wirecons::montecarlo {

/// Identifies one reproducible random stream. Identical (seed, stream_id)
/// reproduce identical draws; distinct stream_ids select statistically
/// independent sequences. Estimators fan one caller-level stream_id out over
/// a fixed number of internal sub-streams (see kChunksPerEstimate), so
/// consecutive caller stream_ids never collide.
struct RngSeed {
  std::uint64_t seed = 42;
  std::uint64_t stream_id = 0;
};

/// Number of independent sub-streams each estimator splits its trials over.
/// The split is fixed, so results are bit-identical no matter how many
/// threads execute the chunks.
inline constexpr int kChunksPerEstimate = 16;

/// Minimal PCG-XSH-RR 64/32 generator with stream selection.
class Pcg32 {
 public:
  Pcg32() : Pcg32(RngSeed{}) {}
  explicit Pcg32(RngSeed s) : state_(0), inc_((s.stream_id << 1u) | 1u) {
    next_u32();
    state_ += s.seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const auto xorshifted =
        static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform draw strictly inside (0, 1): bin centers on a 2^52 grid, so
  /// neither endpoint can occur.
  double uniform_open01() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1p-52;
  }

  /// Exp(1) by inverse transform; strictly positive because the uniform draw
  /// is strictly below 1.
  double exponential() { return -std::log1p(-uniform_open01()); }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

struct McEstimate {
  double mean;
  double std_error;  // sqrt(mean * (1 - mean) / samples)
  std::uint64_t samples;
};

McEstimate make_estimate(std::uint64_t successes, std::uint64_t samples);

/// Inverse-transform sampling of the planar-Poisson nearest-area distance
/// density 2r/R_a^2 on [0, R_a]: r = R_a * sqrt(u).
double distance_from_uniform(const channel::NetworkConfig& net, double u);
double sample_distance(const channel::NetworkConfig& net, Pcg32& rng);

/// Failure count among `population` independent nodes, one Bernoulli draw
/// per node. Exact at failure_prob 0 and 1.
inline int binomial_failures(int population, double failure_prob, Pcg32& rng) {
  int failures = 0;
  for (int t = 0; t < population; ++t)
    failures += rng.uniform_open01() < failure_prob ? 1 : 0;
  return failures;
}

/// Monte Carlo estimate of the average transmission success probability:
/// draws (r, h) and counts SNR > z. This is the independent oracle for the
/// closed-form channel average.
McEstimate estimate_ps(const channel::SignalProfile& profile,
                       const channel::NetworkConfig& net,
                       std::uint64_t samples, RngSeed seed);

/// Stage-level simulation of the four-stage PBFT failure process with the
/// cumulative fault budget b = floor((n-1)/3).
McEstimate simulate_pbft(int node_count, double p, std::uint64_t trials,
                         RngSeed seed);

/// Two-stage RAFT analogue with budget f = floor((n-1)/2).
McEstimate simulate_raft(int node_count, double p, std::uint64_t trials,
                         RngSeed seed);

}  // namespace wirecons::montecarlo
