#include "twomode/fock.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace twomode {

Cutoff::Cutoff(int n_max) : n_max_(n_max) {
  if (n_max < 0) {
    throw std::invalid_argument("cutoff n_max must be non-negative, got " + std::to_string(n_max));
  }
}

std::size_t flat_index(int na, int nb, const Cutoff& cutoff) {
  if (na < 0 || nb < 0 || na > cutoff.n_max() || nb > cutoff.n_max()) {
    throw std::out_of_range("photon counts (" + std::to_string(na) + "," + std::to_string(nb) +
                            ") outside cutoff " + std::to_string(cutoff.n_max()));
  }
  return static_cast<std::size_t>(na) * cutoff.levels() + static_cast<std::size_t>(nb);
}

std::pair<int, int> decode_index(std::size_t index, const Cutoff& cutoff) {
  if (index >= cutoff.dim()) {
    throw std::out_of_range("basis index " + std::to_string(index) + " outside dimension " +
                            std::to_string(cutoff.dim()));
  }
  return {static_cast<int>(index / cutoff.levels()), static_cast<int>(index % cutoff.levels())};
}

TwoModeState::TwoModeState(const Cutoff& cutoff)
    : cutoff_(cutoff), amp_(ComplexVector::Zero(static_cast<Eigen::Index>(cutoff.dim()))) {}

TwoModeState::TwoModeState(const Cutoff& cutoff, ComplexVector amp)
    : cutoff_(cutoff), amp_(std::move(amp)) {
  if (static_cast<std::size_t>(amp_.size()) != cutoff_.dim()) {
    throw std::invalid_argument("amplitude vector length does not match cutoff dimension");
  }
}

TwoModeState TwoModeState::basis(int na, int nb, const Cutoff& cutoff) {
  TwoModeState s(cutoff);
  s.amp_[flat_index(na, nb, cutoff)] = 1.0;
  return s;
}

FockOperator::FockOperator(const Cutoff& cutoff)
    : cutoff_(cutoff),
      mat_(ComplexMatrix::Zero(static_cast<Eigen::Index>(cutoff.dim()),
                               static_cast<Eigen::Index>(cutoff.dim()))) {}

FockOperator::FockOperator(const Cutoff& cutoff, ComplexMatrix mat)
    : cutoff_(cutoff), mat_(std::move(mat)) {
  const auto d = static_cast<Eigen::Index>(cutoff_.dim());
  if (mat_.rows() != d || mat_.cols() != d) {
    throw std::invalid_argument("operator shape does not match cutoff dimension");
  }
}

FockOperator FockOperator::identity(const Cutoff& cutoff) {
  const auto d = static_cast<Eigen::Index>(cutoff.dim());
  return FockOperator(cutoff, ComplexMatrix::Identity(d, d));
}

Complex FockOperator::element(int out_a, int out_b, int in_a, int in_b) const {
  return mat_(static_cast<Eigen::Index>(flat_index(out_a, out_b, cutoff_)),
              static_cast<Eigen::Index>(flat_index(in_a, in_b, cutoff_)));
}

TwoModeState FockOperator::apply(const TwoModeState& x) const {
  if (!(x.cutoff() == cutoff_)) throw std::invalid_argument("cutoff mismatch in operator apply");
  return TwoModeState(cutoff_, mat_ * x.amplitudes());
}

ComplexMatrix single_mode_ladder(Ladder ladder, const Cutoff& cutoff) {
  const auto d = static_cast<Eigen::Index>(cutoff.levels());
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (Eigen::Index n = 0; n + 1 < d; ++n) {
    const double v = std::sqrt(static_cast<double>(n + 1));
    if (ladder == Ladder::Create) {
      m(n + 1, n) = v;
    } else {
      m(n, n + 1) = v;
    }
  }
  return m;
}

SparseMatrix ladder_sparse(LadderKind kind, const Cutoff& cutoff) {
  const int top = cutoff.n_max();
  const auto d = static_cast<Eigen::Index>(cutoff.dim());
  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(cutoff.dim());
  for (int na = 0; na <= top; ++na) {
    for (int nb = 0; nb <= top; ++nb) {
      const int step = kind.ladder == Ladder::Create ? 1 : -1;
      const int ta = kind.mode == Mode::A ? na + step : na;
      const int tb = kind.mode == Mode::B ? nb + step : nb;
      if (ta < 0 || tb < 0 || ta > top || tb > top) continue;
      // sqrt of the larger occupation: sqrt(n+1) for creation, sqrt(n) for annihilation
      const int occ = kind.mode == Mode::A ? std::max(na, ta) : std::max(nb, tb);
      entries.emplace_back(static_cast<Eigen::Index>(flat_index(ta, tb, cutoff)),
                           static_cast<Eigen::Index>(flat_index(na, nb, cutoff)),
                           std::sqrt(static_cast<double>(occ)));
    }
  }
  SparseMatrix m(d, d);
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

FockOperator ladder_matrix(LadderKind kind, const Cutoff& cutoff) {
  return FockOperator(cutoff, ComplexMatrix(ladder_sparse(kind, cutoff)));
}

ComplexMatrix tensor(const ComplexMatrix& xa, const ComplexMatrix& xb) {
  const Eigen::Index da = xa.rows();
  const Eigen::Index db = xb.rows();
  if (xa.cols() != da || xb.cols() != db) throw std::invalid_argument("tensor factors must be square");
  ComplexMatrix out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = xa(i, j) * xb;
    }
  }
  return out;
}

Complex inner_product(const TwoModeState& x, const TwoModeState& y) {
  if (!(x.cutoff() == y.cutoff())) throw std::invalid_argument("cutoff mismatch in inner product");
  return x.amplitudes().dot(y.amplitudes());
}

double tail_mass(const TwoModeState& x) {
  const int top = x.cutoff().n_max();
  double mass = 0.0;
  for (int k = 0; k <= top; ++k) {
    mass += std::norm(x(top, k));
    if (k != top) mass += std::norm(x(k, top));
  }
  return mass;
}

double log_factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial of negative number");
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_binomial(int n, int k) {
  if (k < 0 || k > n) throw std::invalid_argument("binomial index out of range");
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double sqrt_binomial(int n, int k) { return std::exp(0.5 * log_binomial(n, k)); }

}  // namespace twomode
