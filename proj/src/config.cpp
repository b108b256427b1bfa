#include "wirecons/config.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

namespace wirecons::cli {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string current;
  std::istringstream in(s);
  while (std::getline(in, current, sep)) {
    const std::string item = trim(current);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct LineContext {
  const std::string& source;
  int line;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
  }
};

double parse_double(const LineContext& ctx, const std::string& key,
                    const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0')
    ctx.fail("value of '" + key + "' is not a number: '" + value + "'");
  return v;
}

std::uint64_t parse_u64(const LineContext& ctx, const std::string& key,
                        const std::string& value) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || value.find('-') != std::string::npos)
    ctx.fail("value of '" + key + "' is not an unsigned integer: '" + value +
             "'");
  return v;
}

int parse_int(const LineContext& ctx, const std::string& key,
              const std::string& value) {
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0')
    ctx.fail("value of '" + key + "' is not an integer: '" + value + "'");
  return static_cast<int>(v);
}

// Node grids accept either "first:last:step" or a comma-separated list.
std::vector<int> parse_grid(const LineContext& ctx, const std::string& key,
                            const std::string& value) {
  std::vector<int> out;
  if (value.find(':') != std::string::npos) {
    const auto parts = split_list(value, ':');
    if (parts.size() != 2 && parts.size() != 3)
      ctx.fail("grid '" + key + "' must look like first:last[:step]");
    const int first = parse_int(ctx, key, parts[0]);
    const int last = parse_int(ctx, key, parts[1]);
    const int step = parts.size() == 3 ? parse_int(ctx, key, parts[2]) : 1;
    if (step < 1) ctx.fail("grid '" + key + "' needs a step >= 1");
    if (last < first) ctx.fail("grid '" + key + "' needs last >= first");
    for (int n = first; n <= last; n += step) out.push_back(n);
    return out;
  }
  for (const auto& item : split_list(value, ','))
    out.push_back(parse_int(ctx, key, item));
  return out;
}

void apply_signal_key(const LineContext& ctx, channel::SignalProfile& profile,
                      const std::string& key, const std::string& value) {
  if (key == "P_T")
    profile.transmit_power_w = parse_double(ctx, key, value);
  else if (key == "P_N")
    profile.noise_power_w = parse_double(ctx, key, value);
  else if (key == "B")
    profile.bandwidth_hz = parse_double(ctx, key, value);
  else if (key == "C")
    profile.capacity_bps = parse_double(ctx, key, value);
  else if (key == "R")
    profile.rate_bps = parse_double(ctx, key, value);
  else if (key == "alpha")
    profile.path_loss_exponent = parse_double(ctx, key, value);
  else if (key == "N")
    profile.subcarriers = parse_int(ctx, key, value);
  else
    ctx.fail("unknown key '" + key + "' in section [signal." + profile.name +
             "]");
}

struct SweepParseState {
  std::optional<double> z_db;
  std::optional<double> gamma;
  bool regimes_key_seen = false;
};

void apply_sweep_key(const LineContext& ctx, SweepSpec& sweep,
                     SweepParseState& state, const std::string& key,
                     const std::string& value) {
  if (key == "signals") {
    sweep.signals = split_list(value, ',');
  } else if (key == "protocols") {
    sweep.protocols.clear();
    if (value == "both") {
      sweep.protocols = {Protocol::pbft, Protocol::raft};
    } else {
      for (const auto& item : split_list(value, ',')) {
        try {
          sweep.protocols.push_back(protocol_from_string(item));
        } catch (const std::invalid_argument& e) {
          ctx.fail(e.what());
        }
      }
    }
  } else if (key == "n_values") {
    sweep.n_pbft = parse_grid(ctx, key, value);
    sweep.n_raft = sweep.n_pbft;
  } else if (key == "n_pbft") {
    sweep.n_pbft = parse_grid(ctx, key, value);
  } else if (key == "n_raft") {
    sweep.n_raft = parse_grid(ctx, key, value);
  } else if (key == "regimes") {
    state.regimes_key_seen = true;
    sweep.regimes.clear();
    for (const auto& item : split_list(value, ',')) {
      const auto parts = split_list(item, ':');
      if (parts.size() != 2)
        ctx.fail("each regime must look like z_db:gamma, got '" + item + "'");
      sweep.regimes.push_back({parse_double(ctx, key, parts[0]),
                               parse_double(ctx, key, parts[1])});
    }
  } else if (key == "z_db") {
    state.z_db = parse_double(ctx, key, value);
  } else if (key == "gamma") {
    state.gamma = parse_double(ctx, key, value);
  } else if (key == "metrics") {
    sweep.metrics.clear();
    for (const auto& item : split_list(value, ',')) {
      try {
        sweep.metrics.push_back(metric_from_string(item));
      } catch (const std::invalid_argument& e) {
        ctx.fail(e.what());
      }
    }
  } else if (key == "threshold_mode") {
    if (value == "db")
      sweep.threshold_mode = channel::ThresholdMode::db_to_linear;
    else if (value == "linear")
      sweep.threshold_mode = channel::ThresholdMode::linear_as_given;
    else
      ctx.fail("threshold_mode must be 'db' or 'linear', got '" + value + "'");
  } else if (key == "gain_transform") {
    if (value == "failure")
      sweep.gain_transform = fitting::GainTransform::log10_of_failure;
    else if (value == "success")
      sweep.gain_transform = fitting::GainTransform::log10_of_success;
    else
      ctx.fail("gain_transform must be 'failure' or 'success', got '" + value +
               "'");
  } else if (key == "mc_samples") {
    sweep.mc_samples = parse_u64(ctx, key, value);
  } else if (key == "mc_seed") {
    sweep.mc_seed = parse_u64(ctx, key, value);
  } else {
    ctx.fail("unknown key '" + key + "' in section [sweep]");
  }
}

void validate_config(const Config& config) {
  for (const auto& [name, profile] : config.profiles) {
    try {
      profile.validate();
    } catch (const std::domain_error& e) {
      throw ConfigError("signal." + name + ": " + e.what());
    }
  }
  const SweepSpec& sweep = config.sweep;
  if (sweep.signals.empty()) throw ConfigError("sweep: signals must not be empty");
  for (const auto& name : sweep.signals) config.profile(name);
  if (sweep.protocols.empty())
    throw ConfigError("sweep: protocols must not be empty");
  if (sweep.metrics.empty()) throw ConfigError("sweep: metrics must not be empty");
  if (sweep.n_pbft.empty() || sweep.n_raft.empty())
    throw ConfigError("sweep: node grids must not be empty");
  for (const int n : sweep.n_pbft)
    if (n < 2) throw ConfigError("sweep: every n must be >= 2");
  for (const int n : sweep.n_raft)
    if (n < 2) throw ConfigError("sweep: every n must be >= 2");
  if (sweep.regimes.empty()) throw ConfigError("sweep: regimes must not be empty");
  for (const auto& regime : sweep.regimes) {
    if (!(regime.gamma > 0.0))
      throw ConfigError("sweep: gamma must be > 0 (got " +
                        format_value(regime.gamma) + ")");
    if (sweep.threshold_mode == channel::ThresholdMode::linear_as_given &&
        !(regime.z_db >= 0.0))
      throw ConfigError("sweep: a linear threshold must be >= 0 (got " +
                        format_value(regime.z_db) + ")");
  }
  if (sweep.mc_samples != 0 && sweep.mc_samples < 1000)
    throw ConfigError("sweep: mc_samples must be 0 (off) or >= 1000");
}

}  // namespace

std::string to_string(Metric m) {
  switch (m) {
    case Metric::ps: return "ps";
    case Metric::consensus: return "consensus";
    case Metric::latency: return "latency";
    case Metric::throughput: return "throughput";
    case Metric::energy: return "energy";
    case Metric::gain: return "gain";
  }
  return "?";
}

Metric metric_from_string(const std::string& s) {
  if (s == "ps") return Metric::ps;
  if (s == "consensus") return Metric::consensus;
  if (s == "latency") return Metric::latency;
  if (s == "throughput") return Metric::throughput;
  if (s == "energy") return Metric::energy;
  if (s == "gain") return Metric::gain;
  throw std::invalid_argument("unknown metric '" + s + "'");
}

bool SweepSpec::wants(Metric m) const {
  return std::find(metrics.begin(), metrics.end(), m) != metrics.end();
}

const std::vector<int>& SweepSpec::grid_for(Protocol p) const {
  return p == Protocol::pbft ? n_pbft : n_raft;
}

const channel::SignalProfile& Config::profile(const std::string& name) const {
  for (const auto& [profile_name, profile] : profiles)
    if (profile_name == name) return profile;
  throw ConfigError("unknown signal profile '" + name + "'");
}

Config default_config() {
  Config config;
  config.profiles.emplace_back("thz", channel::thz_profile());
  config.profiles.emplace_back("mmwave", channel::mmwave_profile());
  SweepSpec& sweep = config.sweep;
  sweep.signals = {"thz", "mmwave"};
  sweep.protocols = {Protocol::pbft, Protocol::raft};
  for (int n = 4; n <= 52; n += 3) sweep.n_pbft.push_back(n);   // n = 3b + 1
  for (int n = 3; n <= 51; n += 2) sweep.n_raft.push_back(n);   // n = 2f + 1
  sweep.regimes = {{6.0, 2.0}, {6.0, 5.0}, {4.0, 5.0}};
  sweep.metrics = {Metric::ps,         Metric::consensus, Metric::latency,
                   Metric::throughput, Metric::energy,    Metric::gain};
  return config;
}

Config parse_config(std::istream& in, const std::string& source_name) {
  Config config = default_config();
  SweepParseState state;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const LineContext ctx{source_name, line_no};
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') ctx.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section == "sweep") continue;
      if (section == "signal.thz" || section == "signal.mmwave") continue;
      if (section == "signal.custom") {
        bool present = false;
        for (const auto& [name, profile] : config.profiles)
          present = present || name == "custom";
        if (!present) {
          channel::SignalProfile custom = channel::thz_profile();
          custom.name = "custom";
          config.profiles.emplace_back("custom", custom);
        }
        continue;
      }
      ctx.fail("unknown section [" + section + "]");
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) ctx.fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) ctx.fail("expected 'key = value'");
    if (section.empty()) ctx.fail("key '" + key + "' appears outside a section");

    if (section == "sweep") {
      apply_sweep_key(ctx, config.sweep, state, key, value);
    } else {
      const std::string profile_name = section.substr(std::string("signal.").size());
      for (auto& [name, profile] : config.profiles) {
        if (name == profile_name) {
          apply_signal_key(ctx, profile, key, value);
          break;
        }
      }
    }
  }

  if (state.z_db || state.gamma) {
    if (state.regimes_key_seen)
      throw ConfigError(source_name +
                        ": use either 'regimes' or 'z_db'/'gamma', not both");
    config.sweep.regimes = {
        {state.z_db.value_or(6.0), state.gamma.value_or(2.0)}};
  }

  validate_config(config);
  return config;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

std::string render_config(const Config& config) {
  std::ostringstream out;
  for (const auto& [name, profile] : config.profiles) {
    out << "[signal." << name << "]\n";
    out << "P_T = " << format_value(profile.transmit_power_w) << "\n";
    out << "P_N = " << format_value(profile.noise_power_w) << "\n";
    out << "B = " << format_value(profile.bandwidth_hz) << "\n";
    out << "C = " << format_value(profile.capacity_bps) << "\n";
    out << "R = " << format_value(profile.rate_bps) << "\n";
    out << "alpha = " << format_value(profile.path_loss_exponent) << "\n";
    out << "N = " << profile.subcarriers << "\n\n";
  }
  const SweepSpec& sweep = config.sweep;
  out << "[sweep]\n";
  out << "signals = ";
  for (std::size_t i = 0; i < sweep.signals.size(); ++i)
    out << (i ? ", " : "") << sweep.signals[i];
  out << "\nprotocols = ";
  for (std::size_t i = 0; i < sweep.protocols.size(); ++i)
    out << (i ? ", " : "") << wirecons::to_string(sweep.protocols[i]);
  out << "\nn_pbft = ";
  for (std::size_t i = 0; i < sweep.n_pbft.size(); ++i)
    out << (i ? ", " : "") << sweep.n_pbft[i];
  out << "\nn_raft = ";
  for (std::size_t i = 0; i < sweep.n_raft.size(); ++i)
    out << (i ? ", " : "") << sweep.n_raft[i];
  out << "\nregimes = ";
  for (std::size_t i = 0; i < sweep.regimes.size(); ++i)
    out << (i ? ", " : "") << format_value(sweep.regimes[i].z_db) << ":"
        << format_value(sweep.regimes[i].gamma);
  out << "\nmetrics = ";
  for (std::size_t i = 0; i < sweep.metrics.size(); ++i)
    out << (i ? ", " : "") << to_string(sweep.metrics[i]);
  out << "\nthreshold_mode = "
      << (sweep.threshold_mode == channel::ThresholdMode::db_to_linear
              ? "db"
              : "linear");
  out << "\ngain_transform = "
      << (sweep.gain_transform == fitting::GainTransform::log10_of_failure
              ? "failure"
              : "success");
  out << "\nmc_samples = " << sweep.mc_samples;
  out << "\nmc_seed = " << sweep.mc_seed << "\n";
  return out.str();
}

}  // namespace wirecons::cli
