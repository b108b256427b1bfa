#include <doctest.h>

#include <cmath>

#include "wirecons/consensus.hpp"
#include "wirecons/montecarlo.hpp"

using namespace wirecons;
using namespace wirecons::montecarlo;

namespace {

double null_se(double p, std::uint64_t samples) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
}

}  // namespace

TEST_CASE("pcg streams are reproducible and distinct") {
  Pcg32 a({123, 7});
  Pcg32 b({123, 7});
  Pcg32 c({123, 8});
  bool all_equal = true;
  bool stream_differs = false;
  for (int i = 0; i < 1000; ++i) {
    const std::uint32_t va = a.next_u32();
    all_equal = all_equal && va == b.next_u32();
    stream_differs = stream_differs || va != c.next_u32();
  }
  CHECK(all_equal);
  CHECK(stream_differs);
}

TEST_CASE("uniform draws stay strictly inside the unit interval") {
  Pcg32 rng({1, 1});
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform_open01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
  Pcg32 rng2({1, 2});
  for (int i = 0; i < 1000; ++i) CHECK(rng2.exponential() > 0.0);
}

TEST_CASE("estimate bookkeeping matches the binomial formula") {
  const McEstimate e = make_estimate(300, 1000);
  CHECK(e.mean == 0.3);
  CHECK(e.std_error == doctest::Approx(std::sqrt(0.3 * 0.7 / 1000.0)).epsilon(1e-15));
  CHECK(e.samples == 1000);
  CHECK_THROWS_AS(make_estimate(0, 0), std::domain_error);
}

TEST_CASE("distance sampling inverts the quadratic cdf") {
  const channel::NetworkConfig net{10, 5.0, 4.0};
  CHECK(distance_from_uniform(net, 0.0) == 0.0);
  CHECK(distance_from_uniform(net, 1.0) == net.radius_m());
  CHECK_THROWS_AS(distance_from_uniform(net, -0.1), std::domain_error);
  CHECK_THROWS_AS(distance_from_uniform(net, 1.5), std::domain_error);

  // E[r] = 2*R/3 and Var[r] = R^2/18 under the density 2r/R^2.
  Pcg32 rng({99, 0});
  const std::uint64_t draws = 1000000;
  double sum = 0.0;
  for (std::uint64_t i = 0; i < draws; ++i) sum += sample_distance(net, rng);
  const double mean = sum / static_cast<double>(draws);
  const double radius = net.radius_m();
  const double se = radius / std::sqrt(18.0 * static_cast<double>(draws));
  CHECK(std::abs(mean - 2.0 * radius / 3.0) <= 3.0 * se);
}

TEST_CASE("binomial sampler hits its mean") {
  Pcg32 rng({5, 3});
  const int population = 17;
  const double q = 0.3;
  const std::uint64_t draws = 100000;
  double sum = 0.0;
  for (std::uint64_t i = 0; i < draws; ++i)
    sum += binomial_failures(population, q, rng);
  const double mean = sum / static_cast<double>(draws);
  const double se = std::sqrt(population * q * (1.0 - q) /
                              static_cast<double>(draws));
  CHECK(std::abs(mean - population * q) <= 3.0 * se);
}

TEST_CASE("channel estimate hits the degenerate endpoints") {
  const channel::SignalProfile profile = channel::thz_profile();
  const channel::NetworkConfig zero_threshold{
      10, 5.0, 0.0, channel::ThresholdMode::linear_as_given};
  CHECK(estimate_ps(profile, zero_threshold, 10000, {42, 0}).mean == 1.0);

  channel::SignalProfile feeble = profile;
  feeble.transmit_power_w = 1e-300;
  const channel::NetworkConfig net{10, 5.0, 4.0};
  CHECK(estimate_ps(feeble, net, 10000, {42, 0}).mean == 0.0);
}

TEST_CASE("channel estimate is deterministic per seed and stream") {
  const channel::SignalProfile profile = channel::thz_profile();
  const channel::NetworkConfig net{10, 5.0, 4.0};
  const McEstimate a = estimate_ps(profile, net, 50000, {42, 3});
  const McEstimate b = estimate_ps(profile, net, 50000, {42, 3});
  const McEstimate c = estimate_ps(profile, net, 50000, {42, 4});
  const McEstimate d = estimate_ps(profile, net, 50000, {43, 3});
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.mean != c.mean);
  CHECK(a.mean != d.mean);
}

TEST_CASE("stage simulators hit the degenerate endpoints exactly") {
  CHECK(simulate_pbft(4, 1.0, 10000, {1, 0}).mean == 1.0);
  CHECK(simulate_pbft(4, 0.0, 10000, {1, 1}).mean == 0.0);
  CHECK(simulate_raft(3, 1.0, 10000, {1, 2}).mean == 1.0);
  CHECK(simulate_raft(3, 0.0, 10000, {1, 3}).mean == 0.0);
}

TEST_CASE("pbft simulator agrees with the closed form") {
  const double analytic = consensus::pbft_success(7, 0.9).total;
  const McEstimate mc = simulate_pbft(7, 0.9, 1000000, {42, 11});
  const double se = std::max(mc.std_error, null_se(analytic, mc.samples));
  CHECK(std::abs(analytic - mc.mean) <= 3.0 * se);
}

TEST_CASE("raft simulator agrees with the closed form") {
  const double analytic = consensus::raft_success(13, 0.8).total;
  const McEstimate mc = simulate_raft(13, 0.8, 1000000, {42, 12});
  const double se = std::max(mc.std_error, null_se(analytic, mc.samples));
  CHECK(std::abs(analytic - mc.mean) <= 3.0 * se);
}

TEST_CASE("simulators are bit-reproducible") {
  const McEstimate a = simulate_pbft(10, 0.85, 50000, {7, 5});
  const McEstimate b = simulate_pbft(10, 0.85, 50000, {7, 5});
  CHECK(a.mean == b.mean);
  const McEstimate c = simulate_raft(9, 0.75, 50000, {7, 6});
  const McEstimate d = simulate_raft(9, 0.75, 50000, {7, 6});
  CHECK(c.mean == d.mean);
}

TEST_CASE("simulators validate their inputs") {
  CHECK_THROWS_AS(simulate_pbft(1, 0.5, 10000, {1, 0}), std::domain_error);
  CHECK_THROWS_AS(simulate_pbft(4, 1.5, 10000, {1, 0}), std::domain_error);
  CHECK_THROWS_AS(simulate_pbft(4, 0.5, 10, {1, 0}), std::domain_error);
  CHECK_THROWS_AS(
      estimate_ps(channel::thz_profile(), {10, 5.0, 4.0}, 10, {1, 0}),
      std::domain_error);
}
