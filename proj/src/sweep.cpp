#include "wirecons/sweep.hpp"

#include <cmath>
#include <cstdio>

#include "wirecons/consensus.hpp"
#include "wirecons/montecarlo.hpp"
#include "wirecons/perf.hpp"

namespace wirecons::cli {
namespace {

constexpr const char* kCsvColumns =
    "signal,protocol,n,z_db,gamma,p_s,p_consensus,T_s,t1_s,t2_s,t_total_s,"
    "tps,energy_j,gain,mc_mean,mc_stderr";

void append_field(std::string& row, const std::optional<double>& value) {
  row.push_back(',');
  if (value) row += format_number(*value);
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string csv_header() { return kCsvColumns; }

std::string to_csv_row(const RunRecord& r) {
  std::string row = r.signal;
  row.push_back(',');
  row += std::string(to_string(r.protocol));
  row.push_back(',');
  row += std::to_string(r.n);
  row.push_back(',');
  row += format_number(r.z_db);
  row.push_back(',');
  row += format_number(r.gamma);
  append_field(row, r.p_s);
  append_field(row, r.p_consensus);
  append_field(row, r.latency_T_s);
  append_field(row, r.t1_s);
  append_field(row, r.t2_s);
  append_field(row, r.t_total_s);
  append_field(row, r.tps);
  append_field(row, r.energy_j);
  append_field(row, r.gain);
  append_field(row, r.mc_mean);
  append_field(row, r.mc_stderr);
  return row;
}

void write_csv(const std::vector<RunRecord>& rows, std::ostream& out) {
  out << csv_header() << "\n";
  for (const auto& row : rows) out << to_csv_row(row) << "\n";
}

namespace {

// Re-throws a module error with the identity of the offending row attached,
// preserving the domain/numerical distinction the exit codes rely on.
[[noreturn]] void rethrow_with_row(const RunRecord& record) {
  const std::string prefix = "row (" + record.signal + ", " +
                             std::string(to_string(record.protocol)) +
                             ", n=" + std::to_string(record.n) +
                             ", z_db=" + format_number(record.z_db) +
                             ", gamma=" + format_number(record.gamma) + "): ";
  try {
    throw;
  } catch (const numerics::NumericalError& e) {
    throw numerics::NumericalError(prefix + e.what());
  } catch (const std::domain_error& e) {
    throw std::domain_error(prefix + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(prefix + e.what());
  }
}

}  // namespace

namespace {

void compute_row(const Config& config, const channel::SignalProfile& profile,
                 std::uint64_t row_index, RunRecord& record,
                 std::vector<std::string>& warnings) {
  const SweepSpec& sweep = config.sweep;
  const bool mc_on = sweep.mc_samples > 0;
  const bool want_consensus =
      sweep.wants(Metric::consensus) || sweep.wants(Metric::gain) || mc_on;
  const bool want_latency = sweep.wants(Metric::latency) ||
                            sweep.wants(Metric::throughput) ||
                            sweep.wants(Metric::energy);

  const channel::NetworkConfig net{record.n, record.gamma, record.z_db,
                                   sweep.threshold_mode, record.protocol};
  const double p_s = channel::transmission_success_probability(profile, net);
  if (sweep.wants(Metric::ps)) record.p_s = p_s;

  double p_consensus = 0.0;
  if (want_consensus) {
    p_consensus = (record.protocol == Protocol::pbft
                       ? consensus::pbft_success(record.n, p_s)
                       : consensus::raft_success(record.n, p_s))
                      .total;
    if (sweep.wants(Metric::consensus)) record.p_consensus = p_consensus;
  }

  if (want_latency) {
    const perf::PerfReport report =
        perf::evaluate(record.protocol, profile, record.n, p_s);
    if (sweep.wants(Metric::latency)) {
      record.latency_T_s = report.per_message_s;
      record.t1_s = report.t1_s;
      record.t2_s = report.t2_s;
      record.t_total_s = report.total_latency_s;
    }
    if (sweep.wants(Metric::throughput)) record.tps = report.throughput_tps;
    if (sweep.wants(Metric::energy)) record.energy_j = report.energy_j;
  }

  if (sweep.wants(Metric::gain)) {
    if (p_consensus > 0.0 && p_consensus < 1.0) {
      record.gain =
          sweep.gain_transform == fitting::GainTransform::log10_of_failure
              ? std::log10(1.0 - p_consensus)
              : std::log10(p_consensus);
    } else {
      warnings.push_back("gain dropped for (" + record.signal + ", " +
                         std::string(to_string(record.protocol)) +
                         ", n=" + std::to_string(record.n) +
                         "): consensus probability " +
                         format_number(p_consensus) + " outside (0, 1)");
    }
  }

  if (mc_on) {
    const montecarlo::RngSeed seed{sweep.mc_seed, row_index};
    const montecarlo::McEstimate estimate =
        record.protocol == Protocol::pbft
            ? montecarlo::simulate_pbft(record.n, p_s, sweep.mc_samples, seed)
            : montecarlo::simulate_raft(record.n, p_s, sweep.mc_samples, seed);
    record.mc_mean = estimate.mean;
    record.mc_stderr = estimate.std_error;
  }
}

}  // namespace

SweepResult run_sweep(const Config& config) {
  const SweepSpec& sweep = config.sweep;
  SweepResult result;
  std::uint64_t row_index = 0;

  for (const auto& signal_name : sweep.signals) {
    const channel::SignalProfile& profile = config.profile(signal_name);
    for (const Protocol protocol : sweep.protocols) {
      for (const auto& regime : sweep.regimes) {
        for (const int n : sweep.grid_for(protocol)) {
          RunRecord record;
          record.signal = signal_name;
          record.protocol = protocol;
          record.n = n;
          record.z_db = regime.z_db;
          record.gamma = regime.gamma;
          try {
            compute_row(config, profile, row_index, record, result.warnings);
          } catch (...) {
            rethrow_with_row(record);
          }
          result.rows.push_back(std::move(record));
          ++row_index;
        }
      }
    }
  }
  return result;
}

void verify_record(const RunRecord& record, const Config& config) {
  const auto fail = [&](const std::string& msg) {
    throw std::domain_error("verify failed for (" + record.signal + ", " +
                            std::string(to_string(record.protocol)) +
                            ", n=" + std::to_string(record.n) +
                            ", z_db=" + format_number(record.z_db) +
                            ", gamma=" + format_number(record.gamma) +
                            "): " + msg);
  };
  const auto close_rel = [](double a, double b, double tol) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= tol * std::max(scale, 1e-300);
  };

  if (record.p_s && !(*record.p_s >= 0.0 && *record.p_s <= 1.0))
    fail("p_s outside [0, 1]");
  if (record.p_consensus &&
      !(*record.p_consensus >= 0.0 && *record.p_consensus <= 1.0))
    fail("p_consensus outside [0, 1]");

  if (record.latency_T_s) {
    const double T = *record.latency_T_s;
    if (!(T > 0.0)) fail("per-message latency not positive");
    if (record.t1_s && *record.t1_s != (record.n - 1) * T)
      fail("t1 != (n-1)*T");
    if (record.t2_s && *record.t2_s != T) fail("t2 != T");
    if (record.t_total_s && record.t1_s && record.t2_s) {
      const double expected = record.protocol == Protocol::pbft
                                  ? 3.0 * *record.t1_s + *record.t2_s
                                  : *record.t1_s + *record.t2_s;
      if (!close_rel(*record.t_total_s, expected, 1e-15))
        fail("total latency does not match the stage sum");
    }
  }
  if (record.tps && record.t_total_s &&
      std::abs(*record.tps * *record.t_total_s - 1.0) > 1e-12)
    fail("throughput * latency != 1");

  if (record.energy_j && record.t1_s && record.t2_s) {
    const channel::SignalProfile& profile = config.profile(record.signal);
    const double closed =
        record.protocol == Protocol::pbft
            ? perf::pbft_energy_closed_form(record.n, *record.t1_s,
                                            *record.t2_s,
                                            profile.transmit_power_w)
            : perf::raft_energy_closed_form(record.n, *record.t1_s,
                                            *record.t2_s,
                                            profile.transmit_power_w);
    if (!close_rel(*record.energy_j, closed, 1e-12))
      fail("energy total does not match the closed form");
  }

  if (record.gain && record.p_consensus) {
    const double expected =
        config.sweep.gain_transform == fitting::GainTransform::log10_of_failure
            ? std::log10(1.0 - *record.p_consensus)
            : std::log10(*record.p_consensus);
    if (*record.gain != expected) fail("gain does not match its transform");
  }

  if (record.mc_mean && record.p_consensus && config.sweep.mc_samples > 0) {
    // Standard error under the analytic hypothesis; the empirical one
    // degenerates to zero when no trial succeeds.
    const double p = *record.p_consensus;
    const double null_se =
        std::sqrt(p * (1.0 - p) /
                  static_cast<double>(config.sweep.mc_samples));
    const double se = std::max(null_se, record.mc_stderr.value_or(0.0));
    if (std::abs(p - *record.mc_mean) > 3.0 * se)
      fail("analytic consensus probability is more than 3 standard errors "
           "from the Monte Carlo estimate");
  }
}

}  // namespace wirecons::cli
