#include "twomode/retrodiction.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "twomode/gaussian.hpp"

namespace twomode {

namespace {

constexpr double kPositivitySlack = 1e-12;

void require_square(const ComplexMatrix& x, Eigen::Index levels, const char* what) {
  if (x.rows() != levels || x.cols() != levels) {
    throw std::invalid_argument(std::string(what) + " must be " + std::to_string(levels) + "x" +
                                std::to_string(levels));
  }
}

void require_positive(const ComplexMatrix& x, double tolerance, const char* what) {
  if ((x - x.adjoint()).cwiseAbs().maxCoeff() > tolerance) {
    throw std::invalid_argument(std::string(what) + " is not Hermitian");
  }
  const Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(x, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kPositivitySlack) {
    throw std::invalid_argument(std::string(what) + " is not positive semidefinite");
  }
}

std::vector<Eigen::Index> support(const ComplexMatrix& x) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index k = 0; k < x.rows(); ++k) {
    if (x.row(k).cwiseAbs().maxCoeff() != 0.0 || x.col(k).cwiseAbs().maxCoeff() != 0.0) out.push_back(k);
  }
  return out;
}

std::vector<Eigen::Index> product_support(const std::vector<Eigen::Index>& sa, const std::vector<Eigen::Index>& sb,
                                          Eigen::Index levels) {
  std::vector<Eigen::Index> out;
  out.reserve(sa.size() * sb.size());
  for (const auto a : sa) {
    for (const auto b : sb) out.push_back(a * levels + b);
  }
  return out;
}

ComplexMatrix restricted_tensor(const ComplexMatrix& xa, const ComplexMatrix& xb, const std::vector<Eigen::Index>& sa,
                                const std::vector<Eigen::Index>& sb) {
  return tensor(xa(sa, sa), xb(sb, sb));
}

// Tr[U (Xa x Xb) U^dag (Ya x Yb)] with every factor cut down to its support.
double trace_probability(const ComplexMatrix& u, const ComplexMatrix& xa, const ComplexMatrix& xb,
                         const ComplexMatrix& ya, const ComplexMatrix& yb) {
  const Eigen::Index levels = xa.rows();
  const auto sxa = support(xa);
  const auto sxb = support(xb);
  const auto sya = support(ya);
  const auto syb = support(yb);
  if (sxa.empty() || sxb.empty() || sya.empty() || syb.empty()) return 0.0;
  const auto cols = product_support(sxa, sxb, levels);
  const auto rows = product_support(sya, syb, levels);
  const ComplexMatrix block = u(rows, cols);
  const Complex t = (block * restricted_tensor(xa, xb, sxa, sxb) * block.adjoint() *
                     restricted_tensor(ya, yb, sya, syb))
                        .trace();
  return t.real();
}

ComplexMatrix box_matrix(const SectorOracle& oracle, const Cutoff& box) {
  const int top = box.n_max();
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(box.dim()), static_cast<Eigen::Index>(box.dim()));
  for (int n = 0; n <= top; ++n) {
    for (int m = 0; m <= top; ++m) {
      for (int i = 0; i <= top; ++i) {
        const int j = n + m - i;  // total photon number is conserved
        if (j < 0 || j > top) continue;
        out(static_cast<Eigen::Index>(flat_index(n, m, box)), static_cast<Eigen::Index>(flat_index(i, j, box))) =
            oracle.element(n, m, i, j);
      }
    }
  }
  return out;
}

std::size_t checked(int index, std::size_t size, const char* what) {
  if (index < 0 || static_cast<std::size_t>(index) >= size) {
    throw std::out_of_range(std::string(what) + " index " + std::to_string(index) + " out of range");
  }
  return static_cast<std::size_t>(index);
}

}  // namespace

PreparationEnsemble::PreparationEnsemble(std::vector<ComplexMatrix> states, std::vector<double> priors,
                                         double tolerance)
    : states_(std::move(states)), priors_(std::move(priors)), mixing_(0.0) {
  if (states_.empty()) throw std::invalid_argument("ensemble is empty");
  if (states_.size() != priors_.size()) throw std::invalid_argument("ensemble needs one prior per state");
  const Eigen::Index levels = states_.front().rows();
  double total = 0.0;
  ComplexMatrix mixture = ComplexMatrix::Zero(levels, levels);
  for (std::size_t j = 0; j < states_.size(); ++j) {
    require_square(states_[j], levels, "ensemble state");
    require_positive(states_[j], tolerance, "ensemble state");
    if (std::abs(states_[j].trace() - Complex(1.0)) > tolerance) {
      throw std::invalid_argument("ensemble state " + std::to_string(j) + " does not have unit trace");
    }
    if (!(priors_[j] >= 0.0)) throw std::invalid_argument("priors must be non-negative");
    total += priors_[j];
    mixture += priors_[j] * states_[j];
  }
  if (std::abs(total - 1.0) > tolerance) throw std::invalid_argument("priors do not sum to 1");
  mixing_ = mixture.trace().real() / static_cast<double>(levels);
  const ComplexMatrix scaled_identity = mixing_ * ComplexMatrix::Identity(levels, levels);
  if ((mixture - scaled_identity).cwiseAbs().maxCoeff() > tolerance) {
    throw std::invalid_argument("ensemble average is not proportional to the identity");
  }
}

PreparationEnsemble PreparationEnsemble::uniform_fock(const Cutoff& cutoff) {
  const auto levels = static_cast<Eigen::Index>(cutoff.levels());
  std::vector<ComplexMatrix> states;
  for (Eigen::Index k = 0; k < levels; ++k) {
    ComplexMatrix rho = ComplexMatrix::Zero(levels, levels);
    rho(k, k) = 1.0;
    states.push_back(std::move(rho));
  }
  return PreparationEnsemble(std::move(states),
                             std::vector<double>(static_cast<std::size_t>(levels), 1.0 / static_cast<double>(levels)));
}

MeasurementModel::MeasurementModel(std::vector<ComplexMatrix> effects, double tolerance)
    : effects_(std::move(effects)) {
  if (effects_.empty()) throw std::invalid_argument("measurement has no effects");
  const Eigen::Index levels = effects_.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(levels, levels);
  for (const auto& e : effects_) {
    require_square(e, levels, "effect");
    require_positive(e, tolerance, "effect");
    sum += e;
  }
  if ((sum - ComplexMatrix::Identity(levels, levels)).cwiseAbs().maxCoeff() > tolerance) {
    throw std::invalid_argument("effects do not sum to the identity");
  }
}

MeasurementModel MeasurementModel::fock(const Cutoff& cutoff) {
  const auto levels = static_cast<Eigen::Index>(cutoff.levels());
  std::vector<ComplexMatrix> effects;
  for (Eigen::Index k = 0; k < levels; ++k) {
    ComplexMatrix p = ComplexMatrix::Zero(levels, levels);
    p(k, k) = 1.0;
    effects.push_back(std::move(p));
  }
  return MeasurementModel(std::move(effects));
}

ComplexMatrix retrodicted_state(const ComplexMatrix& effect) {
  if (effect.rows() != effect.cols()) throw std::invalid_argument("effect must be square");
  const Complex tr = effect.trace();
  if (!(std::abs(tr) > 0.0)) throw std::invalid_argument("effect has zero trace");
  return effect.transpose() / tr;
}

RetrodictionModel::RetrodictionModel(double gain, PreparationEnsemble ensemble_a, PreparationEnsemble ensemble_b,
                                     MeasurementModel measurement_a, MeasurementModel measurement_b)
    : gain_(Amplifier::from_gain(gain).gain),
      box_(static_cast<int>(ensemble_a.levels()) - 1),
      ensemble_a_(std::move(ensemble_a)),
      ensemble_b_(std::move(ensemble_b)),
      measurement_a_(std::move(measurement_a)),
      measurement_b_(std::move(measurement_b)) {
  const Eigen::Index levels = ensemble_a_.levels();
  if (ensemble_b_.levels() != levels || measurement_a_.levels() != levels || measurement_b_.levels() != levels) {
    throw std::invalid_argument("ensembles and measurements must share one mode dimension");
  }
  pdc_ = converged_pdc_block(gain_, box_).op.matrix();
  // Total photon number <= 2 n_max covers every box element.
  bs_ = box_matrix(SectorOracle(time_reversal_partner(Amplifier{gain_}), Cutoff(2 * box_.n_max())), box_);
}

RetrodictionModel RetrodictionModel::fock(double gain, const Cutoff& box) {
  return RetrodictionModel(gain, PreparationEnsemble::uniform_fock(box), PreparationEnsemble::uniform_fock(box),
                           MeasurementModel::fock(box), MeasurementModel::fock(box));
}

double RetrodictionModel::predictive(int i, int j, int n, int m) const {
  return trace_probability(pdc_, ensemble_a_.state(checked(i, ensemble_a_.size(), "preparation")),
                           ensemble_b_.state(checked(j, ensemble_b_.size(), "preparation")),
                           measurement_a_.effect(checked(n, measurement_a_.size(), "outcome")),
                           measurement_b_.effect(checked(m, measurement_b_.size(), "outcome")));
}

Eigen::MatrixXd RetrodictionModel::bayes_table(int i, int m) const {
  const auto outcomes = static_cast<Eigen::Index>(measurement_a_.size());
  const auto preps = static_cast<Eigen::Index>(ensemble_b_.size());
  Eigen::MatrixXd table(outcomes, preps);
  for (Eigen::Index n = 0; n < outcomes; ++n) {
    for (Eigen::Index j = 0; j < preps; ++j) {
      table(n, j) = ensemble_b_.prior(static_cast<std::size_t>(j)) *
                    predictive(i, static_cast<int>(j), static_cast<int>(n), m);
    }
  }
  const double norm = table.sum();
  if (!(norm > 0.0)) {
    throw UnreachableOutcome("outcome " + std::to_string(m) + " on mode b cannot follow preparation " +
                             std::to_string(i) + " on mode a");
  }
  return table / norm;
}

Eigen::MatrixXd RetrodictionModel::ptr_table(int i, int m) const {
  const ComplexMatrix& rho_i = ensemble_a_.state(checked(i, ensemble_a_.size(), "preparation"));
  const ComplexMatrix& pi_m = measurement_b_.effect(checked(m, measurement_b_.size(), "outcome"));
  if (!(std::abs(pi_m.trace()) > 0.0)) {
    throw UnreachableOutcome("outcome " + std::to_string(m) + " on mode b has a zero effect");
  }
  const ComplexMatrix sigma_m = retrodicted_state(pi_m);
  const ComplexMatrix v = bs_ / std::sqrt(gain_);

  const auto outcomes = static_cast<Eigen::Index>(measurement_a_.size());
  const auto preps = static_cast<Eigen::Index>(ensemble_b_.size());
  Eigen::MatrixXd table(outcomes, preps);
  for (Eigen::Index n = 0; n < outcomes; ++n) {
    for (Eigen::Index j = 0; j < preps; ++j) {
      const ComplexMatrix theta_j = ensemble_b_.prior(static_cast<std::size_t>(j)) *
                                    ensemble_b_.state(static_cast<std::size_t>(j)).transpose();
      table(n, j) = trace_probability(v, rho_i, sigma_m, measurement_a_.effect(static_cast<std::size_t>(n)), theta_j);
    }
  }
  const double norm = table.sum();
  const double expected = ensemble_b_.mixing_constant() / gain_;
  if (std::abs(norm - expected) > 1e-9 * expected) {
    throw std::runtime_error("intermediate-picture normalizer " + std::to_string(norm) + " differs from c/g = " +
                             std::to_string(expected));
  }
  return table / norm;
}

double RetrodictionModel::intermediate_bayes(int n, int j, int i, int m) const {
  return bayes_table(i, m)(checked(n, measurement_a_.size(), "outcome"), checked(j, ensemble_b_.size(), "preparation"));
}

double RetrodictionModel::intermediate_ptr(int n, int j, int i, int m) const {
  return ptr_table(i, m)(checked(n, measurement_a_.size(), "outcome"), checked(j, ensemble_b_.size(), "preparation"));
}

double predictive_prob(int i, int j, int n, int m, double gain, const Cutoff& cutoff) {
  return RetrodictionModel::fock(gain, cutoff).predictive(i, j, n, m);
}

double intermediate_prob_bayes(int n, int j, int i, int m, double gain, const Cutoff& cutoff) {
  return RetrodictionModel::fock(gain, cutoff).intermediate_bayes(n, j, i, m);
}

double intermediate_prob_ptr(int n, int j, int i, int m, double gain, const Cutoff& cutoff) {
  return RetrodictionModel::fock(gain, cutoff).intermediate_ptr(n, j, i, m);
}

double intermediate_prob_bayes(int n, int j, int i, int m, double gain, const PreparationEnsemble& ensemble,
                               const MeasurementModel& measurement) {
  return RetrodictionModel(gain, ensemble, ensemble, measurement, measurement).intermediate_bayes(n, j, i, m);
}

double intermediate_prob_ptr(int n, int j, int i, int m, double gain, const PreparationEnsemble& ensemble,
                             const MeasurementModel& measurement) {
  return RetrodictionModel(gain, ensemble, ensemble, measurement, measurement).intermediate_ptr(n, j, i, m);
}

}  // namespace twomode
