#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wirecons/config.hpp"
#include "wirecons/protocol.hpp"

namespace wirecons::cli {

/// One CSV row of a sweep. Metrics that were not requested stay empty.
struct RunRecord {
  std::string signal;
  Protocol protocol;
  int n;
  double z_db;
  double gamma;
  std::optional<double> p_s;
  std::optional<double> p_consensus;
  std::optional<double> latency_T_s;
  std::optional<double> t1_s;
  std::optional<double> t2_s;
  std::optional<double> t_total_s;
  std::optional<double> tps;
  std::optional<double> energy_j;
  std::optional<double> gain;
  std::optional<double> mc_mean;
  std::optional<double> mc_stderr;
};

struct SweepResult {
  std::vector<RunRecord> rows;
  std::vector<std::string> warnings;
};

/// Evaluates every (signal, protocol, regime, n) combination of the
/// configuration in a fixed order. Deterministic for a given configuration
/// and Monte Carlo seed.
SweepResult run_sweep(const Config& config);

/// Fixed CSV schema; numbers carry 12 significant digits.
std::string csv_header();
std::string to_csv_row(const RunRecord& record);
void write_csv(const std::vector<RunRecord>& rows, std::ostream& out);

/// Re-derives every per-row identity (latency structure, throughput
/// reciprocal, energy closed forms, gain transform, Monte Carlo agreement)
/// and throws std::domain_error on the first violation.
void verify_record(const RunRecord& record, const Config& config);

std::string format_number(double value);

}  // namespace wirecons::cli
