#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "wirecons/config.hpp"
#include "wirecons/sweep.hpp"

using namespace wirecons;
using namespace wirecons::cli;

namespace {

Config parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.ini");
}

std::string error_text(const std::string& config_text) {
  try {
    parse_text(config_text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults carry the built-in profile parameters and regimes") {
  const Config config = default_config();
  const auto& thz = config.profile("thz");
  CHECK(thz.noise_power_w == 0.2);
  CHECK(thz.transmit_power_w == 1.0);
  CHECK(thz.bandwidth_hz == 10e9);
  CHECK(thz.capacity_bps == 80e9);
  CHECK(thz.rate_bps == 40e9);
  CHECK(thz.path_loss_exponent == 2.229);
  const auto& mm = config.profile("mmwave");
  CHECK(mm.bandwidth_hz == 800e6);
  CHECK(mm.path_loss_exponent == 1.7);

  REQUIRE(config.sweep.regimes.size() == 3);
  CHECK(config.sweep.regimes[0].z_db == 6.0);
  CHECK(config.sweep.regimes[0].gamma == 2.0);
  CHECK(config.sweep.regimes[1].z_db == 6.0);
  CHECK(config.sweep.regimes[1].gamma == 5.0);
  CHECK(config.sweep.regimes[2].z_db == 4.0);
  CHECK(config.sweep.regimes[2].gamma == 5.0);

  CHECK(config.sweep.n_pbft.size() == 17);  // 4, 7, ..., 52
  CHECK(config.sweep.n_pbft.front() == 4);
  CHECK(config.sweep.n_pbft.back() == 52);
  CHECK(config.sweep.n_raft.size() == 25);  // 3, 5, ..., 51
  CHECK(config.sweep.n_raft.front() == 3);
  CHECK(config.sweep.n_raft.back() == 51);
  CHECK(config.sweep.metrics.size() == 6);
}

TEST_CASE("an empty file yields the full defaults") {
  CHECK(render_config(parse_text("")) == render_config(default_config()));
}

TEST_CASE("restating a default is the identity") {
  const Config config = parse_text("[signal.mmwave]\nalpha = 1.7\n");
  CHECK(render_config(config) == render_config(default_config()));
}

TEST_CASE("the rendered configuration parses back to itself") {
  const std::string rendered = render_config(default_config());
  CHECK(render_config(parse_text(rendered)) == rendered);
}

TEST_CASE("validation failures carry the offending value") {
  const std::string gamma = error_text("[sweep]\ngamma = -1\n");
  CHECK(gamma.find("gamma") != std::string::npos);
  CHECK(error_text("[signal.thz]\nP_T = -2\n").find("signal.thz") !=
        std::string::npos);
  CHECK(error_text("[sweep]\nmc_samples = 500\n").find("mc_samples") !=
        std::string::npos);
  CHECK(error_text("[sweep]\nn_pbft = 1:4:1\n").find("n") !=
        std::string::npos);
}

TEST_CASE("unknown keys and sections are named") {
  CHECK(error_text("[sweep]\nfizz = 1\n").find("fizz") != std::string::npos);
  CHECK(error_text("[signal.thz]\nbogus = 3\n").find("bogus") !=
        std::string::npos);
  CHECK(error_text("[nothing]\n").find("nothing") != std::string::npos);
}

TEST_CASE("syntax errors report the line number") {
  const std::string msg = error_text("[sweep]\n# fine\nnot a pair\n");
  CHECK(msg.find("test.ini:3") != std::string::npos);
}

TEST_CASE("regimes and single-point keys are mutually exclusive") {
  CHECK(error_text("[sweep]\nregimes = 6:2\nz_db = 4\n").find("regimes") !=
        std::string::npos);
  const Config single = parse_text("[sweep]\nz_db = 4\ngamma = 5\n");
  REQUIRE(single.sweep.regimes.size() == 1);
  CHECK(single.sweep.regimes[0].z_db == 4.0);
  CHECK(single.sweep.regimes[0].gamma == 5.0);
}

TEST_CASE("grid syntax accepts ranges and lists") {
  const Config ranged = parse_text("[sweep]\nn_pbft = 4:10:3\n");
  CHECK(ranged.sweep.n_pbft == std::vector<int>{4, 7, 10});
  const Config listed = parse_text("[sweep]\nn_raft = 5, 9, 13\n");
  CHECK(listed.sweep.n_raft == std::vector<int>{5, 9, 13});
  const Config shared = parse_text("[sweep]\nn_values = 4:8:2\n");
  CHECK(shared.sweep.n_pbft == std::vector<int>{4, 6, 8});
  CHECK(shared.sweep.n_raft == shared.sweep.n_pbft);
}

TEST_CASE("custom profiles start from thz and accept overrides") {
  const Config config =
      parse_text("[signal.custom]\nalpha = 3.0\nB = 5e9\n[sweep]\nsignals = custom\n");
  const auto& custom = config.profile("custom");
  CHECK(custom.path_loss_exponent == 3.0);
  CHECK(custom.bandwidth_hz == 5e9);
  CHECK(custom.transmit_power_w == 1.0);
  CHECK_THROWS_AS(default_config().profile("custom"), ConfigError);
}

TEST_CASE("sweep rows are ordered and p_s decreases with n") {
  const Config config = parse_text(
      "[sweep]\nsignals = thz\nprotocols = pbft\nmetrics = ps\n");
  const SweepResult result = run_sweep(config);
  CHECK(result.rows.size() == 3 * config.sweep.n_pbft.size());
  std::size_t index = 0;
  for (const auto& regime : config.sweep.regimes) {
    double previous = 2.0;
    for (const int n : config.sweep.n_pbft) {
      const RunRecord& row = result.rows[index++];
      CHECK(row.n == n);
      CHECK(row.z_db == regime.z_db);
      CHECK(row.gamma == regime.gamma);
      REQUIRE(row.p_s.has_value());
      CHECK(*row.p_s < previous);
      CHECK(!row.p_consensus);
      CHECK(!row.tps);
      previous = *row.p_s;
    }
  }
}

TEST_CASE("latency-only sweeps keep thz in the attosecond band") {
  const Config config = parse_text(
      "[sweep]\nsignals = thz\nmetrics = latency\n");
  const SweepResult result = run_sweep(config);
  CHECK(!result.rows.empty());
  for (const auto& row : result.rows) {
    REQUIRE(row.t2_s.has_value());
    CHECK(*row.t2_s >= 0.038e-18);
    CHECK(*row.t2_s <= 0.040e-18);
    CHECK(!row.p_s);
    CHECK(!row.energy_j);
  }
}

TEST_CASE("csv schema: header, field count, empty optionals") {
  CHECK(csv_header() ==
        "signal,protocol,n,z_db,gamma,p_s,p_consensus,T_s,t1_s,t2_s,"
        "t_total_s,tps,energy_j,gain,mc_mean,mc_stderr");
  RunRecord row;
  row.signal = "thz";
  row.protocol = Protocol::pbft;
  row.n = 4;
  row.z_db = 6.0;
  row.gamma = 2.0;
  row.p_s = 0.25;
  const std::string text = to_csv_row(row);
  CHECK(text == "thz,pbft,4,6,2,0.25,,,,,,,,,,");
  std::size_t commas = 0;
  for (const char ch : text) commas += ch == ',' ? 1 : 0;
  CHECK(commas == 15);
}

TEST_CASE("sweeps with monte carlo columns are byte-deterministic") {
  const Config config = parse_text(
      "[sweep]\nsignals = thz\nprotocols = pbft, raft\nz_db = 6\ngamma = 2\n"
      "n_values = 4, 7\nmc_samples = 2000\nmc_seed = 7\n");
  const SweepResult first = run_sweep(config);
  const SweepResult second = run_sweep(config);
  std::ostringstream a, b;
  write_csv(first.rows, a);
  write_csv(second.rows, b);
  CHECK(a.str() == b.str());
  CHECK(!first.rows.empty());
  for (const auto& row : first.rows) CHECK(row.mc_mean.has_value());
}

TEST_CASE("linear threshold mode bypasses the db conversion") {
  // z = 6 dB in db mode must equal z = 10^0.6 given directly as a ratio.
  const Config db_mode = parse_text(
      "[sweep]\nsignals = thz\nprotocols = pbft\nmetrics = ps\n"
      "n_values = 10\nz_db = 6\ngamma = 2\n");
  const Config linear_mode = parse_text(
      "[sweep]\nsignals = thz\nprotocols = pbft\nmetrics = ps\n"
      "n_values = 10\nthreshold_mode = linear\nz_db = 3.981071705535\n"
      "gamma = 2\n");
  const double ps_db = *run_sweep(db_mode).rows.front().p_s;
  const double ps_linear = *run_sweep(linear_mode).rows.front().p_s;
  CHECK(ps_db == doctest::Approx(ps_linear).epsilon(1e-9));

  CHECK(error_text("[sweep]\nthreshold_mode = linear\nz_db = -3\ngamma = 2\n")
            .find("linear") != std::string::npos);
}

TEST_CASE("verify accepts consistent rows and flags corrupted ones") {
  const Config config = parse_text(
      "[sweep]\nsignals = thz\nz_db = 6\ngamma = 2\nn_values = 4, 7\n"
      "mc_samples = 5000\n");
  const SweepResult result = run_sweep(config);
  for (const auto& row : result.rows) verify_record(row, config);

  RunRecord corrupted = result.rows.front();
  corrupted.tps = *corrupted.tps * 1.5;
  CHECK_THROWS_AS(verify_record(corrupted, config), std::domain_error);

  RunRecord wrong_gain = result.rows.front();
  wrong_gain.gain = 123.0;
  CHECK_THROWS_AS(verify_record(wrong_gain, config), std::domain_error);
}
