#include "twomode/cli.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "twomode/gaussian.hpp"
#include "twomode/interference.hpp"
#include "twomode/ptr_duality.hpp"
#include "twomode/retrodiction.hpp"

namespace twomode::cli {

using nlohmann::ordered_json;

namespace {

void check_finite(const ordered_json& value, const std::string& where) {
  if (value.is_number_float() && !std::isfinite(value.get<double>())) {
    throw std::domain_error("non-finite number in " + where);
  }
  if (value.is_structured()) {
    for (const auto& item : value) check_finite(item, where);
  }
}

std::string csv_cell(const ordered_json& value) {
  if (value.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value.get<double>());
    return buf;
  }
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (const char c : s) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    return quoted + "\"";
  }
  return value.dump();
}

std::string unit_name(Unit unit) {
  switch (unit) {
    case Unit::Transmittance: return "eta";
    case Unit::Angle: return "theta";
    case Unit::Gain: return "gain";
    case Unit::Squeezing: return "r";
    case Unit::Decibel: return "db";
  }
  return "";
}

struct Curve {
  double quantum;
  double classical;
  double interpolated;
};

Curve dip_point(bool passive, double native, double s) {
  if (passive) {
    return {coincidence_bs(native), classical_bs(native), partial_coincidence(BeamSplitter{native}, s)};
  }
  return {coincidence_pdc(native), classical_pdc(native), partial_coincidence(Amplifier{native}, s)};
}

// Golden-section search for the minimum of the quantum curve on [lo, hi] in scan units.
double refine_minimum(Unit unit, double lo, double hi) {
  const bool passive = is_passive(unit);
  const auto f = [&](double x) { return dip_point(passive, to_native(unit, x), 1.0).quantum; };
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  for (int k = 0; k < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++k) {
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - ratio * (b - a);
    d = a + ratio * (b - a);
  }
  return 0.5 * (a + b);
}

}  // namespace

void OutputRecord::require_finite() const {
  check_finite(parameters, command + " parameters");
  check_finite(rows, command + " rows");
  check_finite(metadata, command + " metadata");
}

std::string OutputRecord::to_json() const {
  require_finite();
  ordered_json out;
  out["command"] = command;
  out["parameters"] = parameters;
  out["columns"] = columns;
  out["rows"] = rows;
  out["metadata"] = metadata;
  out["within_tolerance"] = within_tolerance;
  return out.dump(2) + "\n";
}

std::string OutputRecord::to_csv() const {
  require_finite();
  std::ostringstream out;
  out << "# command: " << command << "\n";
  for (const auto& [key, value] : parameters.items()) out << "# parameter " << key << ": " << csv_cell(value) << "\n";
  for (const auto& [key, value] : metadata.items()) out << "# metadata " << key << ": " << csv_cell(value) << "\n";
  out << "# within_tolerance: " << (within_tolerance ? "true" : "false") << "\n";
  for (std::size_t k = 0; k < columns.size(); ++k) out << (k ? "," : "") << columns[k];
  out << "\n";
  for (const auto& row : rows) {
    bool first = true;
    for (const auto& cell : row) {
      out << (first ? "" : ",") << csv_cell(cell);
      first = false;
    }
    out << "\n";
  }
  return out.str();
}

Unit parse_unit(const std::string& name) {
  if (name == "eta") return Unit::Transmittance;
  if (name == "theta") return Unit::Angle;
  if (name == "gain" || name == "g") return Unit::Gain;
  if (name == "r") return Unit::Squeezing;
  if (name == "db") return Unit::Decibel;
  throw std::invalid_argument("unknown unit '" + name + "' (expected eta, theta, gain, r or db)");
}

bool is_passive(Unit unit) { return unit == Unit::Transmittance || unit == Unit::Angle; }

double to_native(Unit unit, double value) {
  switch (unit) {
    case Unit::Transmittance: return BeamSplitter::from_transmittance(value).eta;
    case Unit::Angle: return BeamSplitter::from_angle(value).eta;
    case Unit::Gain: return Amplifier::from_gain(value).gain;
    case Unit::Squeezing: return Amplifier::from_squeezing(value).gain;
    case Unit::Decibel: return Amplifier::from_db(value).gain;
  }
  throw std::invalid_argument("unknown unit");
}

OutputRecord dip_scan(Unit unit, double from, double to, int steps, double s) {
  if (steps < 1) throw std::invalid_argument("steps must be at least 1");
  if (!(from <= to)) throw std::invalid_argument("scan range must satisfy from <= to");
  if (steps == 1 && from != to) throw std::invalid_argument("a single step needs from == to");
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("indistinguishability must lie in [0, 1]");
  const bool passive = is_passive(unit);

  OutputRecord rec;
  rec.command = "dip-scan";
  rec.parameters = {{"coupler", passive ? "bs" : "pdc"}, {"unit", unit_name(unit)}, {"from", from},
                    {"to", to},   {"steps", steps},   {"s", s}};
  rec.columns = {"scan_" + unit_name(unit), passive ? "eta" : "gain", "coincidence", "classical", "interpolated"};

  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> xs;
  for (int k = 0; k < steps; ++k) {
    const double x = steps == 1 ? from : from + (to - from) * k / (steps - 1);
    const double native = to_native(unit, x);
    const Curve c = dip_point(passive, native, s);
    rec.rows.push_back({x, native, c.quantum, c.classical, c.interpolated});
    xs.push_back(x);
    if (c.quantum < best_value) {
      best_value = c.quantum;
      best = k;
    }
  }
  const double lo = xs[static_cast<std::size_t>(std::max(0, best - 1))];
  const double hi = xs[static_cast<std::size_t>(std::min(steps - 1, best + 1))];
  const double refined = refine_minimum(unit, lo, hi);
  const double refined_native = to_native(unit, refined);
  rec.metadata = {{"grid_minimum", {{"x", xs[static_cast<std::size_t>(best)]}, {"coincidence", best_value}}},
                  {"refined_minimum",
                   {{"x", refined},
                    {passive ? "eta" : "gain", refined_native},
                    {"coincidence", dip_point(passive, refined_native, 1.0).quantum}}}};
  return rec;
}

OutputRecord pair_dist(double gain, int n_max) {
  const auto dist = pair_distribution(gain, n_max);
  OutputRecord rec;
  rec.command = "pair-dist";
  rec.parameters = {{"gain", gain}, {"n_max", n_max}};
  rec.columns = {"n", "probability"};
  double sum = 0.0;
  for (std::size_t n = 0; n < dist.probs.size(); ++n) {
    rec.rows.push_back({static_cast<int>(n), dist.probs[n]});
    sum += dist.probs[n];
  }
  rec.metadata = {{"cutoff", n_max}, {"tail_mass", dist.tail}, {"sum_with_tail", sum + dist.tail}};
  return rec;
}

OutputRecord duality_check(int max_photons, const std::vector<double>& gains) {
  if (max_photons < 0) throw std::invalid_argument("max photons must be non-negative");
  if (gains.empty()) throw std::invalid_argument("at least one gain is needed");
  constexpr double kTolerance = 1e-9;
  OutputRecord rec;
  rec.command = "duality-check";
  rec.parameters = {{"max_photons", max_photons}, {"gains", gains}};
  rec.columns = {"gain", "max_residual", "nonzero_elements"};
  double worst = 0.0;
  for (const double g : gains) {
    Amplifier::from_gain(g);
    double gain_worst = 0.0;
    int nonzero = 0;
    for (int i = 0; i <= max_photons; ++i) {
      for (int j = 0; j <= max_photons; ++j) {
        for (int n = 0; n <= max_photons; ++n) {
          for (int m = 0; m <= max_photons; ++m) {
            const auto r = check_duality(i, j, n, m, g);
            gain_worst = std::max(gain_worst, r.abs_err);
            if (r.lhs != 0.0) ++nonzero;
          }
        }
      }
    }
    rec.rows.push_back({g, gain_worst, nonzero});
    worst = std::max(worst, gain_worst);
  }
  rec.metadata = {{"max_residual", worst}, {"tolerance", kTolerance}};
  rec.within_tolerance = worst <= kTolerance;
  return rec;
}

OutputRecord duality_table(const std::vector<double>& gains) {
  if (gains.empty()) throw std::invalid_argument("at least one gain is needed");
  struct Row {
    const char* bs_label;
    int bn, bm, bi, bj;
    const char* pdc_label;
    int pn, pm, pi, pj;
  };
  static constexpr Row kRows[] = {
      {"<0,0|U_BS|0,0>", 0, 0, 0, 0, "<0,0|U_PDC|0,0>", 0, 0, 0, 0},
      {"<1,0|U_BS|1,0>", 1, 0, 1, 0, "<1,0|U_PDC|1,0>", 1, 0, 1, 0},
      {"<0,1|U_BS|0,1>", 0, 1, 0, 1, "<0,1|U_PDC|0,1>", 0, 1, 0, 1},
      {"<0,1|U_BS|1,0>", 0, 1, 1, 0, "<0,0|U_PDC|1,1>", 0, 0, 1, 1},
      {"<1,0|U_BS|0,1>", 1, 0, 0, 1, "<1,1|U_PDC|0,0>", 1, 1, 0, 0},
  };
  OutputRecord rec;
  rec.command = "duality-check";
  rec.parameters = {{"table", true}, {"gains", gains}};
  rec.columns = {"gain", "eta", "bs_element", "bs_value", "pdc_element", "pdc_value", "pdc_from_bs"};
  double worst = 0.0;
  for (const double g : gains) {
    const double eta = time_reversal_partner(Amplifier::from_gain(g)).eta;
    for (const auto& row : kRows) {
      const double bs = bs_element(row.bn, row.bm, row.bi, row.bj, eta);
      const double pdc = pdc_element(row.pn, row.pm, row.pi, row.pj, g);
      // Time-reversing mode b swaps its input and output indices.
      const double from_bs = bs_element(row.pn, row.pj, row.pi, row.pm, eta) / std::sqrt(g);
      worst = std::max(worst, std::abs(pdc - from_bs));
      rec.rows.push_back({g, eta, row.bs_label, bs, row.pdc_label, pdc, from_bs});
    }
  }
  rec.metadata = {{"max_residual", worst}, {"tolerance", 1e-9}};
  rec.within_tolerance = worst <= 1e-9;
  return rec;
}

OutputRecord experiment(const ExperimentConfig& config, const std::string& source) {
  const auto tally = run_experiment(config);
  OutputRecord rec;
  rec.command = "experiment";
  rec.parameters = {{"config", source},
                    {"gain", config.gain},
                    {"herald_gain", config.herald_gain},
                    {"transmissivity_input_a", config.transmissivity.input_a},
                    {"transmissivity_input_b", config.transmissivity.input_b},
                    {"transmissivity_output_a", config.transmissivity.output_a},
                    {"transmissivity_output_b", config.transmissivity.output_b},
                    {"detector_efficiency", config.detector_efficiency},
                    {"pnr_max", config.pnr_max},
                    {"shots", config.shots},
                    {"seed", config.seed},
                    {"indistinguishability", config.indistinguishability}};
  rec.columns = {"trigger_a", "trigger_b", "out_a", "out_b", "count"};
  for (const auto& [t, count] : tally.counts) rec.rows.push_back({t.trigger_a, t.trigger_b, t.out_a, t.out_b, count});
  rec.metadata = {{"shots_run", tally.shots_run}, {"cutoff", tally.cutoff}, {"tail_mass", tally.max_tail},
                  {"seed", config.seed}};
  try {
    const auto report = analyze(tally, config);
    rec.metadata["analysis"] = {{"heralded", report.heralded},
                                {"coincidences", report.coincidences},
                                {"estimate", report.estimate},
                                {"lower", report.lower},
                                {"upper", report.upper},
                                {"z", report.z},
                                {"classical_bound", report.classical_bound},
                                {"quantum_prediction", report.quantum_prediction},
                                {"classical_prediction", report.classical_prediction},
                                {"squeezing_db", squeezing_db(config.gain)},
                                {"verdict", to_string(report.verdict)}};
  } catch (const std::domain_error& e) {
    rec.metadata["analysis"] = {{"error", e.what()}};
  }
  return rec;
}

OutputRecord retro_check(double gain, int max_photons, int cutoff) {
  if (max_photons < 0 || max_photons > cutoff) throw std::invalid_argument("max photons must lie in [0, cutoff]");
  constexpr double kTolerance = 1e-8;
  const auto model = RetrodictionModel::fock(gain, Cutoff(cutoff));
  OutputRecord rec;
  rec.command = "retro-check";
  rec.parameters = {{"gain", gain}, {"max_photons", max_photons}, {"cutoff", cutoff}};
  rec.columns = {"i", "m", "max_abs_difference"};
  double worst = 0.0;
  int unreachable = 0;
  for (int i = 0; i <= max_photons; ++i) {
    for (int m = 0; m <= max_photons; ++m) {
      try {
        const double diff = (model.bayes_table(i, m) - model.ptr_table(i, m)).cwiseAbs().maxCoeff();
        worst = std::max(worst, diff);
        rec.rows.push_back({i, m, diff});
      } catch (const UnreachableOutcome&) {
        ++unreachable;
      }
    }
  }
  rec.metadata = {{"cutoff", cutoff}, {"max_abs_difference", worst}, {"tolerance", kTolerance},
                  {"unreachable_omitted", unreachable}};
  rec.within_tolerance = worst <= kTolerance;
  return rec;
}

}  // namespace twomode::cli
