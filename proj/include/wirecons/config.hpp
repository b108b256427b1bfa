#pragma once

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wirecons/channel.hpp"
#include "wirecons/fitting.hpp"
#include "wirecons/protocol.hpp"

namespace wirecons::cli {

/// One (SNR threshold, node density) operating point of a sweep.
struct Regime {
  double z_db;
  double gamma;
};

enum class Metric { ps, consensus, latency, throughput, energy, gain };

std::string to_string(Metric m);
Metric metric_from_string(const std::string& s);

struct SweepSpec {
  std::vector<std::string> signals;
  std::vector<Protocol> protocols;
  std::vector<int> n_pbft;
  std::vector<int> n_raft;
  std::vector<Regime> regimes;
  std::vector<Metric> metrics;
  channel::ThresholdMode threshold_mode = channel::ThresholdMode::db_to_linear;
  fitting::GainTransform gain_transform =
      fitting::GainTransform::log10_of_failure;
  std::uint64_t mc_samples = 0;  // 0 disables the per-row Monte Carlo columns
  std::uint64_t mc_seed = 42;

  bool wants(Metric m) const;
  const std::vector<int>& grid_for(Protocol p) const;
};

struct Config {
  // Ordered so that sweeps and rendered output are reproducible.
  std::vector<std::pair<std::string, channel::SignalProfile>> profiles;
  SweepSpec sweep;

  const channel::SignalProfile& profile(const std::string& name) const;
};

/// Configuration file problem: syntax (reported with the line number),
/// an unknown key or section, or a failed validation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Built-in defaults: the thz and mmwave profiles, both protocols, the three
/// standard (z, gamma) regimes, all metrics, the n grids 4:52:3 (PBFT) and
/// 3:51:2 (RAFT).
Config default_config();

/// Parses the flat key=value format with [signal.thz] / [signal.mmwave] /
/// [signal.custom] / [sweep] sections and '#' comments. Unknown keys and
/// sections are rejected by name; values start from the defaults.
Config parse_config(std::istream& in, const std::string& source_name);
Config load_config(const std::string& path);

/// Renders the effective configuration back into the parseable format.
std::string render_config(const Config& config);

}  // namespace wirecons::cli
