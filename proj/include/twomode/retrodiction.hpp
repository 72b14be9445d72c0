#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "twomode/fock.hpp"

namespace twomode {

/// Raised when a conditioning outcome has zero probability.
class UnreachableOutcome : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Single-mode states rho_j with priors p_j, all on levels 0..n_max. The
/// priors must sum to 1 and sum_j p_j rho_j must equal c * identity; c is
/// kept as mixing_constant().
class PreparationEnsemble {
 public:
  PreparationEnsemble(std::vector<ComplexMatrix> states, std::vector<double> priors, double tolerance = 1e-10);

  /// Fock states |0>..|n_max> with uniform priors.
  static PreparationEnsemble uniform_fock(const Cutoff& cutoff);

  std::size_t size() const noexcept { return states_.size(); }
  const ComplexMatrix& state(std::size_t j) const { return states_.at(j); }
  double prior(std::size_t j) const { return priors_.at(j); }
  double mixing_constant() const noexcept { return mixing_; }
  Eigen::Index levels() const noexcept { return states_.front().rows(); }

 private:
  std::vector<ComplexMatrix> states_;
  std::vector<double> priors_;
  double mixing_;
};

/// POVM on one mode: positive effects summing to the identity.
class MeasurementModel {
 public:
  explicit MeasurementModel(std::vector<ComplexMatrix> effects, double tolerance = 1e-10);

  /// Projectors |0><0| .. |n_max><n_max|.
  static MeasurementModel fock(const Cutoff& cutoff);

  std::size_t size() const noexcept { return effects_.size(); }
  const ComplexMatrix& effect(std::size_t m) const { return effects_.at(m); }
  Eigen::Index levels() const noexcept { return effects_.front().rows(); }

 private:
  std::vector<ComplexMatrix> effects_;
};

/// Pi^T / Tr Pi. Throws std::invalid_argument for a zero-trace effect.
ComplexMatrix retrodicted_state(const ComplexMatrix& effect);

/// Predictive, retrodictive and intermediate probabilities for a PDC of gain
/// g acting on the box of photon numbers 0..n_max per mode.
///
/// Mode a is prepared in rho_i and measured with Pi_n; mode b is prepared in
/// rho_j (drawn from an ensemble that carries no information) and measured
/// with Pi_m. The PDC elements on the box come from converged_pdc_block and
/// the BS elements from an oracle large enough to be exact on the box.
class RetrodictionModel {
 public:
  RetrodictionModel(double gain, PreparationEnsemble ensemble_a, PreparationEnsemble ensemble_b,
                    MeasurementModel measurement_a, MeasurementModel measurement_b);

  /// Fock ensembles and Fock measurements on both modes.
  static RetrodictionModel fock(double gain, const Cutoff& box);

  double gain() const noexcept { return gain_; }
  const Cutoff& box() const noexcept { return box_; }

  /// P(n,m|i,j) = Tr[U (rho_i x rho_j) U^dag (Pi_n x Pi_m)].
  double predictive(int i, int j, int n, int m) const;

  /// P(n,j|i,m) from predictive() by Bayes' rule over the mode-b preparation.
  /// Throws UnreachableOutcome when the outcome m cannot occur given i.
  double intermediate_bayes(int n, int j, int i, int m) const;

  /// P(n,j|i,m) from Tr[V (rho_i x sigma_m) V^dag (Pi_n x Theta_j)] with
  /// V = U_BS(1/g) / sqrt(g), sigma_m the retrodicted state of Pi_m and
  /// Theta_j = p_j rho_j^T. The normalizer is checked against c/g, which it
  /// must equal when sum_j p_j rho_j = c * 1; std::runtime_error otherwise.
  double intermediate_ptr(int n, int j, int i, int m) const;

  /// All P(n,j|i,m) for fixed (i,m), rows n and columns j. The normalizer is
  /// shared, so a table costs about as much as one entry.
  Eigen::MatrixXd bayes_table(int i, int m) const;
  Eigen::MatrixXd ptr_table(int i, int m) const;

 private:
  double gain_;
  Cutoff box_;
  PreparationEnsemble ensemble_a_;
  PreparationEnsemble ensemble_b_;
  MeasurementModel measurement_a_;
  MeasurementModel measurement_b_;
  ComplexMatrix pdc_;
  ComplexMatrix bs_;
};

// Fock ensembles and measurements on the box 0..cutoff.n_max() for both modes.
// Each call builds a RetrodictionModel; reuse one model for sweeps.
double predictive_prob(int i, int j, int n, int m, double gain, const Cutoff& cutoff);
double intermediate_prob_bayes(int n, int j, int i, int m, double gain, const Cutoff& cutoff);
double intermediate_prob_ptr(int n, int j, int i, int m, double gain, const Cutoff& cutoff);

// The same ensemble and measurement serve both modes.
double intermediate_prob_bayes(int n, int j, int i, int m, double gain, const PreparationEnsemble& ensemble,
                               const MeasurementModel& measurement);
double intermediate_prob_ptr(int n, int j, int i, int m, double gain, const PreparationEnsemble& ensemble,
                             const MeasurementModel& measurement);

}  // namespace twomode
