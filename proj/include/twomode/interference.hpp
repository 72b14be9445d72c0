#pragma once

#include <vector>

#include "twomode/gaussian.hpp"

namespace twomode {

/// Coincidence probability |<1,1|U_BS(eta)|1,1>|^2 = (2 eta - 1)^2.
double coincidence_bs(double eta);

/// Coincidence probability |<1,1|U_PDC(g)|1,1>|^2 = (2 - g)^2 / g^3.
double coincidence_pdc(double gain);

/// Distribution of the pair number n in U_PDC(g)|1,1>, which lives on |n,n>.
struct PairCountDistribution {
  double gain;
  /// probs[n] for n = 0..n_max
  std::vector<double> probs;
  /// Probability of n > n_max.
  double tail;
};

/// P_n = (g-1)^{n-1} (n+1-g)^2 / g^{n+2}; at g = 1 the point mass on n = 1.
/// The tail is the closed-form remainder of the series.
PairCountDistribution pair_distribution(double gain, int n_max);

/// |<n,1|U_BS(eta)|1,n>|^2 = (1-eta)^{n-1} ((n+1) eta - 1)^2.
double extended_bs_probability(int n, double eta);

/// |P_n - extended_bs_probability(n, 1/g) / g|.
double duality_consistency(int n, double gain);

/// Coincidence probability when the two paths to |1,1> are distinguishable.
double classical_bs(double eta);
double classical_pdc(double gain);

/// The two amplitudes to |1,1> from |1,1>. For a beam splitter, first is
/// double transmission and second double reflection; for an amplifier, first
/// is the path without stimulated emission and second the path with one
/// stimulated annihilation and re-creation.
struct PathAmplitudes {
  double first;
  double second;
};

PathAmplitudes path_amplitudes(const CouplerSpec& coupler);

/// A1^2 + A2^2 + 2 s A1 A2 for indistinguishability s in [0, 1].
double partial_coincidence(const CouplerSpec& coupler, double s);

/// Smallest gain in [1, 2] with coincidence_pdc(g) = target, by bisection.
/// Throws std::domain_error unless 0 <= target <= 1.
double threshold_gain(double target, double tolerance = 1e-12);

}  // namespace twomode
