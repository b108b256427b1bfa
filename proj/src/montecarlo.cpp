#include "wirecons/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace wirecons::montecarlo {
namespace {

using BlockFn = std::function<std::uint64_t(Pcg32&, std::uint64_t)>;

// Runs `total` trials split over kChunksPerEstimate fixed sub-streams and
// sums the per-chunk success counts in chunk order. Thread count affects
// wall time only, never the result.
McEstimate run_chunked(std::uint64_t total, RngSeed seed,
                       const BlockFn& block) {
  std::array<std::uint64_t, kChunksPerEstimate> successes{};
  std::array<std::uint64_t, kChunksPerEstimate> counts{};
  const std::uint64_t base = total / kChunksPerEstimate;
  const std::uint64_t rem = total % kChunksPerEstimate;
  for (int c = 0; c < kChunksPerEstimate; ++c)
    counts[c] = base + (static_cast<std::uint64_t>(c) < rem ? 1 : 0);

  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int c = next.fetch_add(1); c < kChunksPerEstimate;
         c = next.fetch_add(1)) {
      Pcg32 rng(RngSeed{seed.seed,
                        seed.stream_id * kChunksPerEstimate +
                            static_cast<std::uint64_t>(c)});
      successes[c] = block(rng, counts[c]);
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      std::min<unsigned>(hw, static_cast<unsigned>(kChunksPerEstimate));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::uint64_t hits = 0;
  for (const auto s : successes) hits += s;
  return make_estimate(hits, total);
}

void check_trial_count(const char* where, std::uint64_t trials) {
  if (trials < 1000)
    throw std::domain_error(std::string(where) +
                            ": needs at least 1000 trials");
}

void check_success_probability(const char* where, double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error(std::string(where) + ": p must lie in [0, 1]");
}

}  // namespace

McEstimate make_estimate(std::uint64_t successes, std::uint64_t samples) {
  if (samples < 1)
    throw std::domain_error("make_estimate: needs at least one sample");
  const double mean =
      static_cast<double>(successes) / static_cast<double>(samples);
  const double std_error =
      std::sqrt(mean * (1.0 - mean) / static_cast<double>(samples));
  return {mean, std_error, samples};
}

double distance_from_uniform(const channel::NetworkConfig& net, double u) {
  if (!(u >= 0.0 && u <= 1.0))
    throw std::domain_error("distance_from_uniform: u must lie in [0, 1]");
  return net.radius_m() * std::sqrt(u);
}

double sample_distance(const channel::NetworkConfig& net, Pcg32& rng) {
  return distance_from_uniform(net, rng.uniform_open01());
}

McEstimate estimate_ps(const channel::SignalProfile& profile,
                       const channel::NetworkConfig& net,
                       std::uint64_t samples, RngSeed seed) {
  profile.validate();
  net.validate();
  check_trial_count("estimate_ps", samples);
  const double z = net.snr_threshold_linear();
  const double transmit = profile.transmit_power_w;
  const double noise = profile.noise_power_w;
  const double alpha = profile.path_loss_exponent;
  return run_chunked(
      samples, seed,
      [=](Pcg32& rng, std::uint64_t count) -> std::uint64_t {
        std::uint64_t hits = 0;
        for (std::uint64_t t = 0; t < count; ++t) {
          const double r = sample_distance(net, rng);
          const double h = rng.exponential();
          const double snr = transmit * h * std::pow(r, -alpha) / noise;
          hits += snr > z ? 1 : 0;
        }
        return hits;
      });
}

McEstimate simulate_pbft(int node_count, double p, std::uint64_t trials,
                         RngSeed seed) {
  if (node_count < 2)
    throw std::domain_error("simulate_pbft: node count must be >= 2");
  check_success_probability("simulate_pbft", p);
  check_trial_count("simulate_pbft", trials);
  const int n = node_count;
  const int b = (n - 1) / 3;
  const double q = 1.0 - p;
  return run_chunked(
      trials, seed, [=](Pcg32& rng, std::uint64_t count) -> std::uint64_t {
        std::uint64_t ok = 0;
        for (std::uint64_t t = 0; t < count; ++t) {
          const int i = binomial_failures(n - 1, q, rng);
          if (i > b) continue;
          const int j = binomial_failures(n - 1 - i, q, rng);
          if (j > b - i) continue;
          const int k = binomial_failures(n - i - j, q, rng);
          if (k > b - i - j) continue;
          const int l = binomial_failures(n - i - j - k, q, rng);
          if (l > b - i - j - k) continue;
          ++ok;
        }
        return ok;
      });
}

McEstimate simulate_raft(int node_count, double p, std::uint64_t trials,
                         RngSeed seed) {
  if (node_count < 2)
    throw std::domain_error("simulate_raft: node count must be >= 2");
  check_success_probability("simulate_raft", p);
  check_trial_count("simulate_raft", trials);
  const int n = node_count;
  const int f = (n - 1) / 2;
  const double q = 1.0 - p;
  return run_chunked(
      trials, seed, [=](Pcg32& rng, std::uint64_t count) -> std::uint64_t {
        std::uint64_t ok = 0;
        for (std::uint64_t t = 0; t < count; ++t) {
          const int i = binomial_failures(n - 1, q, rng);
          if (i > f) continue;
          const int j = binomial_failures(n - 1 - i, q, rng);
          if (j > f - i) continue;
          ++ok;
        }
        return ok;
      });
}

}  // namespace wirecons::montecarlo
