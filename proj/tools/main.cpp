// Command-line front end. Every subcommand prints one record to stdout (JSON
// by default, CSV with --format csv) and diagnostics to stderr.
//
// Exit status: 0 on success, 2 for invalid input, 3 when a numerical check
// misses its tolerance or a cutoff turns out too small.

#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twomode/cli.hpp"
#include "twomode/experiment.hpp"
#include "twomode/fock.hpp"

namespace {

using twomode::cli::ExitCode;
using twomode::cli::OutputRecord;

struct GainOptions {
  std::optional<double> gain;
  std::optional<double> squeezing;
  std::optional<double> db;

  void attach(CLI::App* cmd) {
    auto* g = cmd->add_option("--gain,-g", gain, "Amplifier gain g >= 1");
    auto* r = cmd->add_option("--squeezing,-r", squeezing, "Squeezing parameter r, with g = cosh^2 r");
    auto* d = cmd->add_option("--db", db, "Squeezing in dB, 10 log10(e^{2r})");
    g->excludes(r)->excludes(d);
    r->excludes(d);
  }

  double resolve(double fallback) const {
    using twomode::cli::Unit;
    if (gain) return twomode::cli::to_native(Unit::Gain, *gain);
    if (squeezing) return twomode::cli::to_native(Unit::Squeezing, *squeezing);
    if (db) return twomode::cli::to_native(Unit::Decibel, *db);
    return fallback;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-mode Fock-space simulations of beam-splitter and amplifier interference"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "json";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  // dip-scan
  auto* dip = app.add_subcommand("dip-scan", "Coincidence probability across a range of couplers");
  std::string coupler = "bs";
  std::string unit;
  double from = NAN;
  double to = NAN;
  int steps = 101;
  double s = 1.0;
  dip->add_option("--coupler", coupler, "bs or pdc")->check(CLI::IsMember({"bs", "pdc"}));
  dip->add_option("--unit", unit, "Scan variable: eta or theta (bs); gain, r or db (pdc)");
  dip->add_option("--from", from, "Start of the range (default: eta 0 or gain 1)");
  dip->add_option("--to", to, "End of the range (default: eta 1 or gain 4)");
  dip->add_option("--steps", steps, "Number of points");
  dip->add_option("--s", s, "Indistinguishability of the two paths, in [0, 1]");

  // pair-dist
  auto* pairs = app.add_subcommand("pair-dist", "Pair-number distribution after an amplifier fed with |1,1>");
  GainOptions pair_gain;
  pair_gain.attach(pairs);
  int n_max = 20;
  pairs->add_option("--n-max", n_max, "Largest pair number listed");

  // duality-check
  auto* duality = app.add_subcommand("duality-check", "Verify the amplifier / beam-splitter element duality");
  int max_photons = 10;
  std::vector<double> gains{1.25, 1.5, 2.0, std::numbers::e, 4.0};
  bool table = false;
  duality->add_option("--max-photons", max_photons, "Largest photon count in each index");
  duality->add_option("--gains", gains, "Gains to sweep");
  duality->add_flag("--table", table, "Print the few-photon element pairs instead of a sweep");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Monte Carlo of the heralded fourfold-coincidence experiment");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> shots;
  exp->add_option("config", config_path, "Config file of key = value lines")->required();
  exp->add_option("--seed", seed, "Override the seed from the config");
  exp->add_option("--shots", shots, "Override the shot count from the config");

  // retro-check
  auto* retro = app.add_subcommand("retro-check", "Compare Bayes and intermediate-picture probabilities");
  GainOptions retro_gain;
  retro_gain.attach(retro);
  int retro_photons = 3;
  int cutoff = 24;
  retro->add_option("--max-photons", retro_photons, "Largest preparation and outcome index checked");
  retro->add_option("--cutoff", cutoff, "Photon-number box per mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ExitCode::kSuccess : ExitCode::kValidationFailure;
  }

  try {
    OutputRecord record;
    if (*dip) {
      const auto scan_unit = twomode::cli::parse_unit(unit.empty() ? (coupler == "bs" ? "eta" : "gain") : unit);
      if (twomode::cli::is_passive(scan_unit) != (coupler == "bs")) {
        throw std::invalid_argument("unit '" + unit + "' does not describe a " + coupler);
      }
      const bool passive = coupler == "bs";
      if (std::isnan(from)) from = passive ? 0.0 : 1.0;
      if (std::isnan(to)) to = passive ? (scan_unit == twomode::cli::Unit::Angle ? std::numbers::pi / 2 : 1.0) : 4.0;
      record = twomode::cli::dip_scan(scan_unit, from, to, steps, s);
    } else if (*pairs) {
      record = twomode::cli::pair_dist(pair_gain.resolve(2.0), n_max);
    } else if (*duality) {
      record = table ? twomode::cli::duality_table(gains) : twomode::cli::duality_check(max_photons, gains);
    } else if (*exp) {
      auto config = twomode::load_config(config_path);
      if (seed) config.seed = *seed;
      if (shots) config.shots = *shots;
      twomode::validate(config);
      record = twomode::cli::experiment(config, config_path);
    } else if (*retro) {
      record = twomode::cli::retro_check(retro_gain.resolve(2.0), retro_photons, cutoff);
    }
    std::cout << (format == "csv" ? record.to_csv() : record.to_json());
    if (!record.within_tolerance) {
      std::cerr << record.command << ": residual exceeds tolerance\n";
      return ExitCode::kToleranceFailure;
    }
    return ExitCode::kSuccess;
  } catch (const twomode::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return ExitCode::kValidationFailure;
  } catch (const twomode::TruncationError& e) {
    std::cerr << "truncation: " << e.what() << "\n";
    return ExitCode::kToleranceFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return ExitCode::kValidationFailure;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return ExitCode::kValidationFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
