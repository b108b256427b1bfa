// Command-line front end: parameter sweeps, Monte Carlo validation, Gaussian
// reliability-gain fits, and the active-distance calculator, all emitting CSV.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wirecons/channel.hpp"
#include "wirecons/config.hpp"
#include "wirecons/consensus.hpp"
#include "wirecons/fitting.hpp"
#include "wirecons/montecarlo.hpp"
#include "wirecons/numerics.hpp"
#include "wirecons/sweep.hpp"

namespace {

using namespace wirecons;

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

cli::Config make_config(const std::string& config_path) {
  return config_path.empty() ? cli::default_config()
                             : cli::load_config(config_path);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

struct FitSeries {
  std::string label;
  fitting::GainSeries series;
};

struct FitFilters {
  std::optional<std::string> signal;
  std::optional<std::string> protocol;
  std::optional<double> z_db;
  std::optional<double> gamma;
};

int column_of(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

double parse_field(const std::string& path, int line_no,
                   const std::string& column, const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0')
    throw cli::ConfigError(path + ":" + std::to_string(line_no) +
                           ": cannot parse '" + text + "' in column '" +
                           column + "'");
  return v;
}

// Accepts either a bare series ("n,gain" or "n,p") or a sweep CSV, in which
// case the filters must narrow the rows down to one
// (signal, protocol, z_db, gamma) combination.
FitSeries read_fit_series(const std::string& path,
                          fitting::GainTransform transform,
                          const FitFilters& filters) {
  std::ifstream in(path);
  if (!in) throw cli::ConfigError("cannot open input CSV '" + path + "'");
  std::string line;
  if (!std::getline(in, line))
    throw cli::ConfigError("input CSV '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);

  const int col_n = column_of(header, "n");
  if (col_n < 0)
    throw cli::ConfigError("input CSV '" + path + "' has no 'n' column");
  const int col_gain = column_of(header, "gain");
  const int col_p = column_of(header, "p") >= 0
                        ? column_of(header, "p")
                        : column_of(header, "p_consensus");
  const int col_signal = column_of(header, "signal");
  const int col_protocol = column_of(header, "protocol");
  const int col_z = column_of(header, "z_db");
  const int col_gamma = column_of(header, "gamma");
  if (col_gain < 0 && col_p < 0)
    throw cli::ConfigError("input CSV '" + path +
                           "' needs a 'gain', 'p', or 'p_consensus' column");
  if (filters.signal && col_signal < 0)
    throw cli::ConfigError("--signal filter needs a 'signal' column in " + path);
  if (filters.protocol && col_protocol < 0)
    throw cli::ConfigError("--protocol filter needs a 'protocol' column in " +
                           path);
  if (filters.z_db && col_z < 0)
    throw cli::ConfigError("--z-db filter needs a 'z_db' column in " + path);
  if (filters.gamma && col_gamma < 0)
    throw cli::ConfigError("--gamma filter needs a 'gamma' column in " + path);

  std::vector<std::pair<double, double>> probabilities;
  fitting::GainSeries gains;
  gains.transform = transform;
  std::map<std::string, int> combos;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const auto get = [&](int col) -> std::string {
      return col >= 0 && col < static_cast<int>(fields.size())
                 ? fields[static_cast<std::size_t>(col)]
                 : std::string();
    };
    if (filters.signal && get(col_signal) != *filters.signal) continue;
    if (filters.protocol && get(col_protocol) != *filters.protocol) continue;
    if (filters.z_db &&
        parse_field(path, line_no, "z_db", get(col_z)) != *filters.z_db)
      continue;
    if (filters.gamma &&
        parse_field(path, line_no, "gamma", get(col_gamma)) != *filters.gamma)
      continue;

    const double n = parse_field(path, line_no, "n", get(col_n));

    if (col_signal >= 0) {
      std::string combo = get(col_signal) + "/" + get(col_protocol);
      if (col_z >= 0) combo += "/z=" + get(col_z);
      if (col_gamma >= 0) combo += "/gamma=" + get(col_gamma);
      combos[combo] += 1;
    }

    const std::string gain_text = get(col_gain);
    if (col_gain >= 0 && !gain_text.empty()) {
      gains.points.push_back({n, parse_field(path, line_no, "gain", gain_text)});
    } else if (col_p >= 0 && !get(col_p).empty()) {
      probabilities.emplace_back(
          n, parse_field(path, line_no, "p", get(col_p)));
    }
  }
  if (combos.size() > 1) {
    std::string msg = "input CSV mixes several series; narrow it down with "
                      "--signal/--protocol/--z-db/--gamma. Found:";
    for (const auto& [combo, count] : combos)
      msg += "\n  " + combo + " (" + std::to_string(count) + " rows)";
    throw cli::ConfigError(msg);
  }

  FitSeries out;
  out.label = combos.empty() ? path : combos.begin()->first;
  if (!gains.points.empty()) {
    out.series = std::move(gains);
  } else {
    out.series = fitting::reliability_gain(probabilities, transform);
  }
  return out;
}

void report_dropped(const fitting::GainSeries& series) {
  for (const auto& dropped : series.dropped)
    std::cerr << "note: dropped point n=" << cli::format_number(dropped.node_count)
              << " P=" << cli::format_number(dropped.probability) << ": "
              << dropped.reason << "\n";
}

void print_fit(const std::string& label, const fitting::GaussianFit& fit,
               std::size_t points) {
  std::cout << label << ": a=" << cli::format_number(fit.amplitude)
            << " b=" << cli::format_number(fit.center)
            << " c=" << cli::format_number(fit.width)
            << " r_squared=" << cli::format_number(fit.r_squared)
            << " points=" << points << "\n";
}

int run_sweep_command(const std::string& config_path, const std::string& out,
                      std::optional<std::uint64_t> seed,
                      std::optional<std::uint64_t> samples, bool verify) {
  cli::Config config = make_config(config_path);
  if (seed) config.sweep.mc_seed = *seed;
  if (samples) config.sweep.mc_samples = *samples;

  const cli::SweepResult result = cli::run_sweep(config);
  for (const auto& warning : result.warnings)
    std::cerr << "note: " << warning << "\n";
  if (verify)
    for (const auto& row : result.rows) cli::verify_record(row, config);

  if (out == "-") {
    cli::write_csv(result.rows, std::cout);
  } else {
    std::ofstream file(out, std::ios::binary);
    if (!file) throw cli::ConfigError("cannot open output file '" + out + "'");
    cli::write_csv(result.rows, file);
    std::cout << "wrote " << result.rows.size() << " rows to " << out << "\n";
  }
  std::cout << "signals=" << config.sweep.signals.size()
            << " protocols=" << config.sweep.protocols.size()
            << " regimes=" << config.sweep.regimes.size()
            << (verify ? " verify=ok" : "") << "\n";
  return 0;
}

int run_fit_command(const std::string& config_path, const std::string& in_path,
                    const std::string& out_path, const std::string& transform_name,
                    const FitFilters& filters, double inline_z_db,
                    double inline_gamma) {
  const fitting::GainTransform transform =
      transform_name == "success" ? fitting::GainTransform::log10_of_success
                                  : fitting::GainTransform::log10_of_failure;

  // The curve CSV is buffered so a failed fit never leaves a partial file.
  std::ostringstream out;

  if (!in_path.empty()) {
    const FitSeries input = read_fit_series(in_path, transform, filters);
    report_dropped(input.series);
    const fitting::GaussianFit fit = fitting::fit_gaussian(input.series);
    print_fit(input.label, fit, input.series.points.size());
    out << "n,gain,fit\n";
    for (const auto& pt : input.series.points)
      out << cli::format_number(pt.node_count) << ","
          << cli::format_number(pt.gain) << ","
          << cli::format_number(fit.model(pt.node_count)) << "\n";
  } else {
    // Inline mode: evaluate the consensus curves at one regime and fit each
    // (signal, protocol) combination.
    cli::Config config = make_config(config_path);
    out << "signal,protocol,n,gain,fit\n";
    for (const auto& signal_name : config.sweep.signals) {
      const channel::SignalProfile& profile = config.profile(signal_name);
      for (const Protocol protocol : config.sweep.protocols) {
        std::vector<std::pair<double, double>> probabilities;
        for (const int n : config.sweep.grid_for(protocol)) {
          const channel::NetworkConfig net{n, inline_gamma, inline_z_db,
                                           config.sweep.threshold_mode,
                                           protocol};
          const double p_s =
              channel::transmission_success_probability(profile, net);
          const double total = (protocol == Protocol::pbft
                                    ? consensus::pbft_success(n, p_s)
                                    : consensus::raft_success(n, p_s))
                                   .total;
          probabilities.emplace_back(n, total);
        }
        const fitting::GainSeries series =
            fitting::reliability_gain(probabilities, transform);
        report_dropped(series);
        const fitting::GaussianFit fit = fitting::fit_gaussian(series);
        print_fit(signal_name + " " + std::string(to_string(protocol)), fit,
                  series.points.size());
        for (const auto& pt : series.points)
          out << signal_name << "," << to_string(protocol) << ","
              << cli::format_number(pt.node_count) << ","
              << cli::format_number(pt.gain) << ","
              << cli::format_number(fit.model(pt.node_count)) << "\n";
      }
    }
  }

  std::ofstream file(out_path, std::ios::binary);
  if (!file)
    throw cli::ConfigError("cannot open output file '" + out_path + "'");
  file << out.str();
  std::cout << "wrote fitted curve to " << out_path << "\n";
  return 0;
}

int run_active_distance_command(const std::string& config_path,
                                const std::string& signal, double z_db,
                                double fading_gain) {
  const cli::Config config = make_config(config_path);
  const channel::SignalProfile& profile = config.profile(signal);
  const double z_linear = std::pow(10.0, z_db / 10.0);
  const double distance =
      channel::active_distance(profile, z_linear, fading_gain);
  const double snr_at = channel::snr(profile, fading_gain, distance);
  const double residual = std::abs(snr_at - z_linear) / z_linear;
  std::cout << "signal=" << signal << " z_db=" << cli::format_number(z_db)
            << " z_linear=" << cli::format_number(z_linear)
            << " h=" << cli::format_number(fading_gain) << "\n";
  std::cout << "active_distance_m=" << cli::format_number(distance) << "\n";
  std::cout << "snr_at_active_distance=" << cli::format_number(snr_at)
            << " relative_residual=" << cli::format_number(residual) << "\n";
  return 0;
}

int run_validate_command(const std::string& config_path,
                         std::uint64_t samples, std::uint64_t seed) {
  const cli::Config config = make_config(config_path);
  const std::uint64_t trials = samples * 10;
  const std::vector<int> grid = {4, 10, 19, 31};

  std::uint64_t stream = 0;
  int checks = 0;
  int failures = 0;
  double worst_sigma = 0.0;

  const auto check = [&](const std::string& context, const std::string& what,
                         double analytic, const montecarlo::McEstimate& mc) {
    const double null_se =
        std::sqrt(analytic * (1.0 - analytic) /
                  static_cast<double>(mc.samples));
    const double se = std::max(null_se, mc.std_error);
    const double sigma =
        se > 0.0 ? std::abs(analytic - mc.mean) / se
                 : (analytic == mc.mean ? 0.0 : HUGE_VAL);
    const bool ok = sigma <= 3.0;
    worst_sigma = std::max(worst_sigma, sigma);
    ++checks;
    failures += ok ? 0 : 1;
    std::cout << context << " " << what
              << " analytic=" << cli::format_number(analytic)
              << " mc=" << cli::format_number(mc.mean)
              << " stderr=" << cli::format_number(se)
              << " sigma=" << cli::format_number(sigma)
              << (ok ? " PASS" : " FAIL") << "\n";
  };

  for (const auto& signal_name : config.sweep.signals) {
    const channel::SignalProfile& profile = config.profile(signal_name);
    for (const auto& regime : config.sweep.regimes) {
      for (const int n : grid) {
        const channel::NetworkConfig net{n, regime.gamma, regime.z_db,
                                         config.sweep.threshold_mode,
                                         Protocol::pbft};
        const std::string context =
            "signal=" + signal_name + " z_db=" + cli::format_number(regime.z_db) +
            " gamma=" + cli::format_number(regime.gamma) +
            " n=" + std::to_string(n);
        const double p_s =
            channel::transmission_success_probability(profile, net);
        check(context, "p_s", p_s,
              montecarlo::estimate_ps(profile, net, samples, {seed, stream++}));
        check(context, "p_pbft", consensus::pbft_success(n, p_s).total,
              montecarlo::simulate_pbft(n, p_s, trials, {seed, stream++}));
        check(context, "p_raft", consensus::raft_success(n, p_s).total,
              montecarlo::simulate_raft(n, p_s, trials, {seed, stream++}));
      }
    }
  }
  std::cout << "checks=" << checks << " failures=" << failures
            << " worst_sigma=" << cli::format_number(worst_sigma) << "\n";
  if (failures > 0)
    throw std::domain_error("Monte Carlo concordance failed for " +
                            std::to_string(failures) + " of " +
                            std::to_string(checks) + " checks");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Performance models for PBFT and RAFT consensus over non-ideal "
               "wireless channels"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path = "sweep.csv";
  std::uint64_t seed_value = 42;
  std::uint64_t samples_value = 0;
  bool verify = false;

  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Run the configured parameter sweep and write a CSV");
  sweep_cmd->add_option("--config", config_path, "Configuration file");
  sweep_cmd->add_option("--out", out_path, "Output CSV path ('-' for stdout)");
  auto* sweep_seed = sweep_cmd->add_option(
      "--seed", seed_value, "Seed for the per-row Monte Carlo columns");
  auto* sweep_samples = sweep_cmd->add_option(
      "--samples", samples_value,
      "Per-row Monte Carlo trials (0 disables the mc columns)");
  sweep_cmd->add_flag("--verify", verify,
                      "Re-check every emitted row against the model identities");

  std::string fit_in;
  std::string fit_out = "fit.csv";
  std::string transform_name = "failure";
  std::string filter_signal;
  std::string filter_protocol;
  double fit_z_db = 4.0;
  double fit_gamma = 5.0;
  auto* fit_cmd = app.add_subcommand(
      "fit", "Fit a Gaussian to a reliability-gain series");
  fit_cmd->add_option("--config", config_path, "Configuration file");
  fit_cmd->add_option("--in", fit_in,
                      "Input CSV (columns n + gain/p/p_consensus); omit to "
                      "evaluate the model inline");
  fit_cmd->add_option("--out", fit_out, "Fitted-curve CSV path");
  fit_cmd->add_option("--transform", transform_name,
                      "Gain transform: failure (log10(1-P)) or success "
                      "(log10(P))")
      ->check(CLI::IsMember({"failure", "success"}));
  auto* fit_filter_signal =
      fit_cmd->add_option("--signal", filter_signal, "Filter sweep-CSV rows");
  auto* fit_filter_protocol = fit_cmd->add_option(
      "--protocol", filter_protocol, "Filter sweep-CSV rows");
  auto* fit_filter_z =
      fit_cmd->add_option("--z-db", fit_z_db,
                          "Regime threshold: filters sweep-CSV rows, or sets "
                          "the inline regime (default 4)");
  auto* fit_filter_gamma =
      fit_cmd->add_option("--gamma", fit_gamma,
                          "Regime density: filters sweep-CSV rows, or sets "
                          "the inline regime (default 5)");

  std::string ad_signal = "thz";
  double ad_z_db = 6.0;
  double ad_gain = 1.0;
  auto* ad_cmd = app.add_subcommand(
      "active-distance",
      "Distance below which the SNR threshold is met with certainty");
  ad_cmd->set_help_flag("--help", "Print this help message and exit");
  ad_cmd->add_option("--config", config_path, "Configuration file");
  ad_cmd->add_option("--signal", ad_signal, "Signal profile name");
  ad_cmd->add_option("--z-db", ad_z_db, "SNR threshold in dB");
  ad_cmd->add_option("--h", ad_gain, "Fading power gain");

  std::uint64_t validate_samples = 1000000;
  auto* validate_cmd = app.add_subcommand(
      "validate",
      "Monte Carlo concordance suite: analytic values vs the stage-level "
      "and channel-level simulators");
  validate_cmd->add_option("--config", config_path, "Configuration file");
  validate_cmd->add_option("--samples", validate_samples,
                           "Channel samples per cell (stage simulators use "
                           "10x this)");
  validate_cmd->add_option("--seed", seed_value, "Monte Carlo seed");

  auto* show_cmd =
      app.add_subcommand("show-config", "Print the effective configuration");
  show_cmd->add_option("--config", config_path, "Configuration file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (sweep_cmd->parsed()) {
      return run_sweep_command(
          config_path, out_path,
          sweep_seed->count() ? std::optional<std::uint64_t>(seed_value)
                              : std::nullopt,
          sweep_samples->count() ? std::optional<std::uint64_t>(samples_value)
                                 : std::nullopt,
          verify);
    }
    if (fit_cmd->parsed()) {
      FitFilters filters;
      if (fit_filter_signal->count()) filters.signal = filter_signal;
      if (fit_filter_protocol->count()) filters.protocol = filter_protocol;
      if (fit_filter_z->count()) filters.z_db = fit_z_db;
      if (fit_filter_gamma->count()) filters.gamma = fit_gamma;
      return run_fit_command(config_path, fit_in, fit_out, transform_name,
                             filters, fit_z_db, fit_gamma);
    }
    if (ad_cmd->parsed())
      return run_active_distance_command(config_path, ad_signal, ad_z_db,
                                         ad_gain);
    if (validate_cmd->parsed())
      return run_validate_command(config_path, validate_samples, seed_value);
    if (show_cmd->parsed()) {
      std::cout << cli::render_config(make_config(config_path));
      return 0;
    }
  } catch (const cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const numerics::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fitting::FitError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    if (e.best_iterate()) {
      const auto& best = *e.best_iterate();
      std::cerr << "best iterate: a=" << cli::format_number(best.amplitude)
                << " b=" << cli::format_number(best.center)
                << " c=" << cli::format_number(best.width)
                << " r_squared=" << cli::format_number(best.r_squared) << "\n";
    }
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
