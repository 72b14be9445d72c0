#pragma once

#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>

namespace twomode {

/// Transmissivity of each optical path: the two heralded photons on their way
/// into the amplifier, and the two amplifier outputs on their way to the
/// detectors.
struct PathTransmissivity {
  double input_a = 1.0;
  double input_b = 1.0;
  double output_a = 1.0;
  double output_b = 1.0;
};

struct ExperimentConfig {
  double gain = 2.0;
  /// Gain of the two weak source amplifiers whose idler photons herald.
  double herald_gain = 1.05;
  PathTransmissivity transmissivity;
  double detector_efficiency = 1.0;
  /// Counts above this are reported as pnr_max. Applies to all four detectors.
  int pnr_max = 10;
  std::uint64_t shots = 1'000'000;
  std::uint64_t seed = 1;
  /// 1 samples the amplifier quantum mechanically; 0 adds the two paths to
  /// |1,1> in probability; values in between interpolate.
  double indistinguishability = 1.0;
};

/// Throws std::invalid_argument describing the first bad field.
void validate(const ExperimentConfig& config);

struct DetectionTuple {
  int trigger_a;
  int trigger_b;
  int out_a;
  int out_b;

  auto operator<=>(const DetectionTuple&) const = default;
};

struct ExperimentTally {
  std::map<DetectionTuple, std::uint64_t> counts;
  std::uint64_t shots_run = 0;
  /// Largest photon number per mode that the amplifier tables reached.
  int cutoff = 0;
  /// Largest probability dropped when truncating an amplifier table.
  double max_tail = 0.0;

  /// Adds another tally (a commutative, associative merge).
  void merge(const ExperimentTally& other);
};

/// Runs shots [first, first + count). Each shot draws from its own stream
/// seeded by (seed, shot index), so any split into batches merges to the same
/// tally as one run.
ExperimentTally run_shots(const ExperimentConfig& config, std::uint64_t first, std::uint64_t count);

ExperimentTally run_experiment(const ExperimentConfig& config);

enum class Verdict { Quantum, Inconclusive };

struct ExperimentReport {
  std::uint64_t heralded = 0;
  std::uint64_t coincidences = 0;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double z = 0.0;
  /// Coincidence probability with fully distinguishable paths at g = 2.
  double classical_bound = 0.25;
  double quantum_prediction = 0.0;
  double classical_prediction = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

/// Conditional probability of (out_a, out_b) = (1, 1) given triggers (1, 1),
/// with a Wilson score interval at z standard deviations. The verdict is
/// Quantum when the upper bound is below classical_bound. Throws
/// std::domain_error if no shot was heralded.
ExperimentReport analyze(const ExperimentTally& tally, const ExperimentConfig& config, double z = 3.0);

std::string to_string(Verdict verdict);

/// 10 log10(e^{2r}) with g = cosh^2 r.
double squeezing_db(double gain);

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line) : std::runtime_error(what), line_(line) {}
  /// 1-based line of the offending entry, 0 when not tied to a line.
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Reads `key = value` lines; '#' starts a comment. Keys: gain, squeezing,
/// squeezing_db (at most one of these three), herald_gain,
/// transmissivity_input_a, transmissivity_input_b, transmissivity_output_a,
/// transmissivity_output_b, detector_efficiency, pnr_max, shots, seed,
/// indistinguishability. Unset keys keep their defaults.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

}  // namespace twomode
