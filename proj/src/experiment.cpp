#include "twomode/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "twomode/gaussian.hpp"
#include "twomode/interference.hpp"

namespace twomode {

namespace {

constexpr double kTableTail = 1e-10;
constexpr int kMaxTableLength = 100'000;

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class ShotStream {
 public:
  ShotStream(std::uint64_t seed, std::uint64_t shot) : engine_(mix64(mix64(seed) ^ shot)) {}

  // 53 random bits in [0, 1); independent of the standard library's distributions.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

// Index of the first cumulative weight exceeding u; the last index absorbs rounding.
std::size_t pick(const std::vector<double>& cumulative, double u) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u * cumulative.back());
  return it == cumulative.end() ? cumulative.size() - 1 : static_cast<std::size_t>(it - cumulative.begin());
}

// Pure-loss channel: a beam splitter of transmittance t mixes the k photons
// with vacuum and the reflected port is discarded.
int transmit(int k, double t, ShotStream& rng) {
  if (k == 0 || t == 1.0) return k;
  if (t == 0.0) return 0;
  std::vector<double> cumulative;
  double sum = 0.0;
  for (int kept = 0; kept <= k; ++kept) {
    const double amp = bs_element(kept, k - kept, k, 0, t);
    sum += amp * amp;
    cumulative.push_back(sum);
  }
  return static_cast<int>(pick(cumulative, rng.uniform()));
}

int detect(int k, const ExperimentConfig& config, ShotStream& rng) {
  return std::min(transmit(k, config.detector_efficiency, rng), config.pnr_max);
}

// Pair number of a two-mode squeezed vacuum, P(k) = (1 - lambda) lambda^k.
int sample_tmsv(double lambda, ShotStream& rng) {
  const double u = rng.uniform();
  double p = 1.0 - lambda;
  double cumulative = p;
  int k = 0;
  while (u >= cumulative && p > 0.0) {
    p *= lambda;
    cumulative += p;
    ++k;
  }
  return k;
}

// Output distribution of the amplifier for Fock input |i,j>, over outcomes
// |n, n - i + j> with n counted from max(0, i - j).
struct OutputTable {
  int first;
  std::vector<double> cumulative;
  double tail;
};

OutputTable build_table(int i, int j, double gain, double s) {
  OutputTable table{std::max(0, i - j), {}, 0.0};
  std::vector<double> quantum;
  std::vector<double> incoherent;
  double total = 0.0;
  for (int n = table.first;; ++n) {
    const int m = n - i + j;
    double coherent = 0.0;
    double separate = 0.0;
    for (const auto& term : pdc_path_terms(n, m, i, j, gain)) {
      coherent += term.amplitude;
      separate += term.amplitude * term.amplitude;
    }
    quantum.push_back(coherent * coherent);
    incoherent.push_back(separate);
    total += coherent * coherent;
    if (1.0 - total <= kTableTail) break;
    if (static_cast<int>(quantum.size()) >= kMaxTableLength) {
      throw TruncationError("amplifier output table for |" + std::to_string(i) + "," + std::to_string(j) +
                                "> did not converge",
                            1.0 - total);
    }
  }
  table.tail = std::max(0.0, 1.0 - total);

  std::vector<double> weights = quantum;
  if (s < 1.0) {
    // Outcome |i,j> mixes coherent and incoherent path sums; the other
    // outcomes share the remaining probability in their quantum proportions.
    const auto same = static_cast<std::size_t>(i - table.first);
    if (same < weights.size()) {
      const double p_same = s * quantum[same] + (1.0 - s) * incoherent[same];
      const double rest = total - quantum[same];
      for (std::size_t k = 0; k < weights.size(); ++k) {
        if (k == same) {
          weights[k] = p_same;
        } else if (rest > 0.0) {
          weights[k] = quantum[k] * (total - p_same) / rest;
        }
      }
    }
  }
  double sum = 0.0;
  for (const double w : weights) {
    sum += w;
    table.cumulative.push_back(sum);
  }
  return table;
}

class Simulator {
 public:
  explicit Simulator(const ExperimentConfig& config)
      : config_(config), lambda_((config.herald_gain - 1.0) / config.herald_gain) {}

  DetectionTuple shot(std::uint64_t index, ExperimentTally& tally) {
    ShotStream rng(config_.seed, index);
    const int pairs_a = sample_tmsv(lambda_, rng);
    const int pairs_b = sample_tmsv(lambda_, rng);
    const int trigger_a = detect(pairs_a, config_, rng);
    const int trigger_b = detect(pairs_b, config_, rng);
    const int in_a = transmit(pairs_a, config_.transmissivity.input_a, rng);
    const int in_b = transmit(pairs_b, config_.transmissivity.input_b, rng);

    const OutputTable& table = lookup(in_a, in_b, tally);
    const int n = table.first + static_cast<int>(pick(table.cumulative, rng.uniform()));
    const int m = n - in_a + in_b;

    const int out_a = detect(transmit(n, config_.transmissivity.output_a, rng), config_, rng);
    const int out_b = detect(transmit(m, config_.transmissivity.output_b, rng), config_, rng);
    return {trigger_a, trigger_b, out_a, out_b};
  }

 private:
  const OutputTable& lookup(int i, int j, ExperimentTally& tally) {
    auto it = tables_.find({i, j});
    if (it == tables_.end()) {
      it = tables_.emplace(std::pair{i, j}, build_table(i, j, config_.gain, config_.indistinguishability)).first;
      const OutputTable& t = it->second;
      const int top_a = t.first + static_cast<int>(t.cumulative.size()) - 1;
      tally.cutoff = std::max({tally.cutoff, top_a, top_a - i + j});
      tally.max_tail = std::max(tally.max_tail, t.tail);
    }
    return it->second;
  }

  ExperimentConfig config_;
  double lambda_;
  std::map<std::pair<int, int>, OutputTable> tables_;
};

void require_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

void validate(const ExperimentConfig& config) {
  if (!(config.gain >= 1.0) || !std::isfinite(config.gain)) throw std::invalid_argument("gain must be finite and >= 1");
  if (!(config.herald_gain >= 1.0) || !std::isfinite(config.herald_gain)) {
    throw std::invalid_argument("herald_gain must be finite and >= 1");
  }
  require_unit(config.transmissivity.input_a, "transmissivity_input_a");
  require_unit(config.transmissivity.input_b, "transmissivity_input_b");
  require_unit(config.transmissivity.output_a, "transmissivity_output_a");
  require_unit(config.transmissivity.output_b, "transmissivity_output_b");
  require_unit(config.detector_efficiency, "detector_efficiency");
  require_unit(config.indistinguishability, "indistinguishability");
  if (config.pnr_max < 1) throw std::invalid_argument("pnr_max must be at least 1");
  if (config.shots < 1) throw std::invalid_argument("shots must be at least 1");
}

void ExperimentTally::merge(const ExperimentTally& other) {
  for (const auto& [tuple, count] : other.counts) counts[tuple] += count;
  shots_run += other.shots_run;
  cutoff = std::max(cutoff, other.cutoff);
  max_tail = std::max(max_tail, other.max_tail);
}

ExperimentTally run_shots(const ExperimentConfig& config, std::uint64_t first, std::uint64_t count) {
  validate(config);
  ExperimentTally tally;
  Simulator sim(config);
  for (std::uint64_t k = 0; k < count; ++k) {
    ++tally.counts[sim.shot(first + k, tally)];
  }
  tally.shots_run = count;
  return tally;
}

ExperimentTally run_experiment(const ExperimentConfig& config) { return run_shots(config, 0, config.shots); }

ExperimentReport analyze(const ExperimentTally& tally, const ExperimentConfig& config, double z) {
  if (!(z > 0.0)) throw std::invalid_argument("z must be positive");
  ExperimentReport report;
  for (const auto& [tuple, count] : tally.counts) {
    if (tuple.trigger_a != 1 || tuple.trigger_b != 1) continue;
    report.heralded += count;
    if (tuple.out_a == 1 && tuple.out_b == 1) report.coincidences += count;
  }
  if (report.heralded == 0) throw std::domain_error("no shot was heralded by triggers (1, 1)");

  const auto n = static_cast<double>(report.heralded);
  const double p = static_cast<double>(report.coincidences) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  report.estimate = p;
  report.lower = std::max(0.0, center - half);
  report.upper = std::min(1.0, center + half);
  report.z = z;
  report.quantum_prediction = coincidence_pdc(config.gain);
  report.classical_prediction = classical_pdc(config.gain);
  report.verdict = report.upper < report.classical_bound ? Verdict::Quantum : Verdict::Inconclusive;
  return report;
}

std::string to_string(Verdict verdict) { return verdict == Verdict::Quantum ? "QUANTUM" : "INCONCLUSIVE"; }

double squeezing_db(double gain) { return db_from_squeezing(squeezing_from_gain(gain)); }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& key, int line) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(value)) {
    throw ConfigError("line " + std::to_string(line) + ": " + key + " expects a number, got '" + text + "'", line);
  }
  return value;
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& key, int line) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("line " + std::to_string(line) + ": " + key + " expects a non-negative integer, got '" + text +
                          "'",
                      line);
  }
  return value;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::string gain_key;
  std::string raw;
  int line = 0;

  using Setter = std::function<void(const std::string&, int)>;
  auto real = [](double& field, const char* key) -> Setter {
    return [&field, key](const std::string& v, int ln) { field = parse_double(v, key, ln); };
  };
  const std::map<std::string, Setter> setters = {
      {"gain", [&](const std::string& v, int ln) { config.gain = parse_double(v, "gain", ln); }},
      {"squeezing",
       [&](const std::string& v, int ln) { config.gain = gain_from_squeezing(parse_double(v, "squeezing", ln)); }},
      {"squeezing_db",
       [&](const std::string& v, int ln) {
         config.gain = gain_from_squeezing(squeezing_from_db(parse_double(v, "squeezing_db", ln)));
       }},
      {"herald_gain", real(config.herald_gain, "herald_gain")},
      {"transmissivity_input_a", real(config.transmissivity.input_a, "transmissivity_input_a")},
      {"transmissivity_input_b", real(config.transmissivity.input_b, "transmissivity_input_b")},
      {"transmissivity_output_a", real(config.transmissivity.output_a, "transmissivity_output_a")},
      {"transmissivity_output_b", real(config.transmissivity.output_b, "transmissivity_output_b")},
      {"detector_efficiency", real(config.detector_efficiency, "detector_efficiency")},
      {"indistinguishability", real(config.indistinguishability, "indistinguishability")},
      {"pnr_max",
       [&](const std::string& v, int ln) {
         const std::uint64_t x = parse_unsigned(v, "pnr_max", ln);
         if (x > 1'000'000) throw ConfigError("line " + std::to_string(ln) + ": pnr_max is too large", ln);
         config.pnr_max = static_cast<int>(x);
       }},
      {"shots", [&](const std::string& v, int ln) { config.shots = parse_unsigned(v, "shots", ln); }},
      {"seed", [&](const std::string& v, int ln) { config.seed = parse_unsigned(v, "seed", ln); }},
  };

  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw.substr(0, raw.find('#')));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line) + ": expected 'key = value', got '" + text + "'", line);
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const auto setter = setters.find(key);
    if (setter == setters.end()) throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'", line);
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'", line);
    }
    if (key == "gain" || key == "squeezing" || key == "squeezing_db") {
      if (!gain_key.empty()) {
        throw ConfigError("line " + std::to_string(line) + ": '" + key + "' conflicts with '" + gain_key + "'", line);
      }
      gain_key = key;
    }
    if (value.empty()) throw ConfigError("line " + std::to_string(line) + ": missing value for '" + key + "'", line);
    try {
      setter->second(value, line);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("line " + std::to_string(line) + ": " + e.what(), line);
    }
  }
  try {
    validate(config);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), 0);
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
  return parse_config(in);
}

}  // namespace twomode
