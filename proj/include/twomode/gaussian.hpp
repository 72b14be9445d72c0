#pragma once

#include <variant>
#include <vector>

#include "twomode/fock.hpp"

namespace twomode {

// Parameter conversions. Arguments that leave the valid range by no more than
// 1e-12 (rounding slack) are clamped; anything further out is rejected with
// std::invalid_argument.
double theta_from_eta(double eta);
double eta_from_theta(double theta);
double squeezing_from_gain(double gain);
double gain_from_squeezing(double r);
/// Squeezing in decibels, 10 log10(e^{2r}).
double db_from_squeezing(double r);
double squeezing_from_db(double db);

/// Passive two-mode coupler of transmittance eta = cos^2(theta).
struct BeamSplitter {
  double eta;

  static BeamSplitter from_transmittance(double eta);
  static BeamSplitter from_angle(double theta);
  double theta() const { return theta_from_eta(eta); }
};

/// Non-degenerate parametric amplifier of gain g = cosh^2(r).
struct Amplifier {
  double gain;

  static Amplifier from_gain(double gain);
  static Amplifier from_squeezing(double r);
  static Amplifier from_db(double db);
  double squeezing() const { return squeezing_from_gain(gain); }
};

using CouplerSpec = std::variant<BeamSplitter, Amplifier>;

/// Partner coupler under partial time reversal: BS{eta} <-> PDC{1/eta}.
Amplifier time_reversal_partner(const BeamSplitter& bs);
BeamSplitter time_reversal_partner(const Amplifier& pdc);

/// <n,m| U_BS(eta) |i,j>. Exactly zero unless i + j == n + m.
double bs_element(int n, int m, int i, int j, double eta);

/// <n,m| U_PDC(g) |i,j>. Exactly zero unless i - j == n - m.
double pdc_element(int n, int m, int i, int j, double gain);

/// Per-path contributions to pdc_element, indexed by the number k of input
/// pairs removed by stimulated annihilation (k = 0 is the path in which the
/// input photons cross the crystal). Their sum is pdc_element.
struct PathTerm {
  int annihilated;
  int created;
  double amplitude;
};
std::vector<PathTerm> pdc_path_terms(int n, int m, int i, int j, double gain);

/// Closed-form element of either coupler.
double element(const CouplerSpec& coupler, int n, int m, int i, int j);

struct ApplyResult {
  TwoModeState state;
  /// Mass on the cutoff boundary plus mass that left the truncated space.
  double tail;
};

/// U|x> using the closed-form elements and the conservation law of the
/// coupler. Throws TruncationError when the achieved tail exceeds tail_bound.
ApplyResult apply(const CouplerSpec& coupler, const TwoModeState& x,
                  double tail_bound = kDefaultTailBound);

/// Generator of the coupler built from ladder matrices:
/// theta (a^dag b - a b^dag) or r (a^dag b^dag - a b).
SparseMatrix generator(const CouplerSpec& coupler, const Cutoff& cutoff);

/// exp(generator) on the truncated space, kept block by block. The generator
/// is block diagonal in the conserved quantity (total number na + nb for BS,
/// difference na - nb for PDC), so each sector is exponentiated on its own.
/// Both generators are real, so the blocks are real.
class SectorOracle {
 public:
  /// Exponentiates every sector, or only those with keys in [first, last].
  SectorOracle(const CouplerSpec& coupler, const Cutoff& cutoff);
  SectorOracle(const CouplerSpec& coupler, const Cutoff& cutoff, int first_sector, int last_sector);

  const Cutoff& cutoff() const noexcept { return cutoff_; }
  bool passive() const noexcept { return passive_; }
  int sector_of(int na, int nb) const noexcept { return passive_ ? na + nb : na - nb; }

  /// <n,m|U|i,j>; exactly zero across sectors. Throws std::out_of_range for
  /// counts past the cutoff or sectors that were not computed.
  double element(int n, int m, int i, int j) const;

  FockOperator dense() const;

 private:
  int first_state(int key) const noexcept;

  bool passive_;
  Cutoff cutoff_;
  int first_sector_;
  std::vector<Eigen::MatrixXd> blocks_;
};

FockOperator dense_oracle(const CouplerSpec& coupler, const Cutoff& cutoff);

struct ConvergedBlock {
  FockOperator op;
  /// Internal cutoff at which the box block stopped changing.
  int internal_cutoff;
  /// Max change of the box block over the last cutoff increase.
  double last_change;
};

/// PDC unitary on the box {na, nb <= box.n_max()}, taken from truncated
/// exponentials whose internal cutoff grows until the box block is stable to
/// `tolerance`. Throws TruncationError if max_internal is reached first.
ConvergedBlock converged_pdc_block(double gain, const Cutoff& box, double tolerance = 1e-14,
                                   int max_internal = 800);

/// Residual of the Heisenberg relations U^dag a U = a', U^dag b U = b' for the
/// dense oracle, in the intertwined form a U = U a'. The max entry of
/// a U - U a' (and likewise for b) is taken over rows and columns with
/// na + nb <= max_total. max_total < 0 selects n_max - 2.
double heisenberg_residual(const CouplerSpec& coupler, const Cutoff& cutoff, int max_total = -1);

}  // namespace twomode
