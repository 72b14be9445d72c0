#include "twomode/interference.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace twomode {

namespace {

void require_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("transmittance must lie in [0, 1]");
}

void require_gain(double gain) {
  if (!(gain >= 1.0) || !std::isfinite(gain)) throw std::invalid_argument("gain must be finite and >= 1");
}

}  // namespace

double coincidence_bs(double eta) {
  require_eta(eta);
  const double x = 2.0 * eta - 1.0;
  return x * x;
}

double coincidence_pdc(double gain) {
  require_gain(gain);
  const double x = 2.0 - gain;
  return x * x / (gain * gain * gain);
}

PairCountDistribution pair_distribution(double gain, int n_max) {
  require_gain(gain);
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  PairCountDistribution out{gain, std::vector<double>(static_cast<std::size_t>(n_max) + 1, 0.0), 0.0};
  if (gain == 1.0) {
    if (n_max >= 1) {
      out.probs[1] = 1.0;
    } else {
      out.tail = 1.0;
    }
    return out;
  }

  const double g3 = gain * gain * gain;
  const double q = (gain - 1.0) / gain;
  out.probs[0] = (gain - 1.0) / (gain * gain);
  for (int n = 1; n <= n_max; ++n) {
    const double x = n + 1.0 - gain;
    out.probs[static_cast<std::size_t>(n)] = std::pow(q, n - 1) * x * x / g3;
  }

  // P_n = q^k (k + c)^2 / g^3 with k = n - 1 and c = 2 - g; the remainder is
  // the sum over k >= n_max, evaluated with the moments of a geometric series.
  const double d = n_max + 2.0 - gain;
  const double p = 1.0 - q;
  out.tail = std::pow(q, n_max) * (q * (1.0 + q) / (p * p * p) + 2.0 * d * q / (p * p) + d * d / p) / g3;
  return out;
}

double extended_bs_probability(int n, double eta) {
  if (n < 1) throw std::invalid_argument("extended suppression needs n >= 1");
  require_eta(eta);
  const double x = (n + 1.0) * eta - 1.0;
  return std::pow(1.0 - eta, n - 1) * x * x;
}

double duality_consistency(int n, double gain) {
  require_gain(gain);
  const double p_n = pair_distribution(gain, n).probs.back();
  return std::abs(p_n - extended_bs_probability(n, 1.0 / gain) / gain);
}

double classical_bs(double eta) {
  require_eta(eta);
  return eta * eta + (1.0 - eta) * (1.0 - eta);
}

double classical_pdc(double gain) {
  require_gain(gain);
  const double x = gain - 1.0;
  return (1.0 + x * x) / (gain * gain * gain);
}

PathAmplitudes path_amplitudes(const CouplerSpec& coupler) {
  if (const auto* bs = std::get_if<BeamSplitter>(&coupler)) {
    require_eta(bs->eta);
    return {bs->eta, -(1.0 - bs->eta)};
  }
  const double gain = std::get<Amplifier>(coupler).gain;
  require_gain(gain);
  const auto terms = pdc_path_terms(1, 1, 1, 1, gain);
  return {terms.at(0).amplitude, terms.at(1).amplitude};
}

double partial_coincidence(const CouplerSpec& coupler, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("indistinguishability must lie in [0, 1]");
  const auto [a1, a2] = path_amplitudes(coupler);
  return a1 * a1 + a2 * a2 + 2.0 * s * a1 * a2;
}

double threshold_gain(double target, double tolerance) {
  if (!(target >= 0.0 && target <= 1.0)) {
    throw std::domain_error("no gain in [1, 2] has coincidence probability " + std::to_string(target));
  }
  double lo = 1.0;
  double hi = 2.0;
  if (coincidence_pdc(lo) <= target) return lo;
  // coincidence_pdc falls monotonically from 1 at g = 1 to 0 at g = 2
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (coincidence_pdc(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace twomode
