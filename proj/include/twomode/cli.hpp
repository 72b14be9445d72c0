#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "twomode/experiment.hpp"

namespace twomode::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidationFailure = 2,
  kToleranceFailure = 3,
};

/// One command's result: parameters echoed back, a table of rows, and
/// metadata such as cutoffs, tails and seeds.
struct OutputRecord {
  std::string command;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  std::vector<std::string> columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
  /// False when a checked residual exceeded its tolerance.
  bool within_tolerance = true;

  /// Throws std::domain_error if any number is NaN or infinite.
  void require_finite() const;
  std::string to_json() const;
  /// Comment lines ("# key: value") for command, parameters and metadata,
  /// then a header row and the data rows. Floats use 17 significant digits.
  std::string to_csv() const;
};

enum class Unit { Transmittance, Angle, Gain, Squeezing, Decibel };

/// Unit parsed from eta, theta, gain, r or db.
Unit parse_unit(const std::string& name);
bool is_passive(Unit unit);
/// Transmittance for passive units, gain for the others.
double to_native(Unit unit, double value);

/// Scan `steps` evenly spaced points of [from, to] in `unit`. Rows hold the
/// transmittance or gain, the coincidence probability with indistinguishable
/// paths, the classical baseline and the value at indistinguishability s.
OutputRecord dip_scan(Unit unit, double from, double to, int steps, double s);

/// Rows (n, P_n) for n = 0..n_max; the tail goes to the metadata.
OutputRecord pair_dist(double gain, int n_max);

/// Largest closed-form duality residual over all counts <= max_photons, one
/// row per gain. Tolerance 1e-9.
OutputRecord duality_check(int max_photons, const std::vector<double>& gains);

/// The five BS/PDC element pairs of the few-photon illustration, computed
/// from the closed forms and from formulas, one block of rows per gain.
OutputRecord duality_table(const std::vector<double>& gains);

/// Tally rows (trigger_a, trigger_b, out_a, out_b, count) and the analysis.
OutputRecord experiment(const ExperimentConfig& config, const std::string& source);

/// Largest |bayes - ptr| per (i, m) for i, m <= max_photons with Fock
/// ensembles on the box 0..cutoff. Tolerance 1e-8.
OutputRecord retro_check(double gain, int max_photons, int cutoff);

}  // namespace twomode::cli
