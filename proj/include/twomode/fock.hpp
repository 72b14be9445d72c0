#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace twomode {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Default bound on the probability mass allowed to sit on (or leak past) the
/// truncation boundary before a computation is rejected.
inline constexpr double kDefaultTailBound = 1e-12;

/// Raised when a state or operator needs more photon levels than the cutoff
/// provides.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, double tail)
      : std::runtime_error(what), tail_(tail) {}
  double tail() const noexcept { return tail_; }

 private:
  double tail_;
};

/// Per-mode photon-number cutoff. The two-mode basis is
/// {|na, nb> : 0 <= na, nb <= n_max}.
class Cutoff {
 public:
  explicit Cutoff(int n_max);

  int n_max() const noexcept { return n_max_; }
  /// Number of levels of a single mode.
  std::size_t levels() const noexcept { return static_cast<std::size_t>(n_max_) + 1; }
  /// Dimension of the two-mode space, (n_max + 1)^2.
  std::size_t dim() const noexcept { return levels() * levels(); }

  friend bool operator==(const Cutoff&, const Cutoff&) = default;

 private:
  int n_max_;
};

/// Row-major index of |na, nb>. Throws std::out_of_range for counts outside
/// [0, n_max].
std::size_t flat_index(int na, int nb, const Cutoff& cutoff);

/// Inverse of flat_index.
std::pair<int, int> decode_index(std::size_t index, const Cutoff& cutoff);

enum class Mode { A, B };
enum class Ladder { Create, Annihilate };

struct LadderKind {
  Ladder ladder;
  Mode mode;
};

/// Pure state of the two truncated modes.
class TwoModeState {
 public:
  explicit TwoModeState(const Cutoff& cutoff);
  TwoModeState(const Cutoff& cutoff, ComplexVector amp);

  /// Fock basis state |na, nb>.
  static TwoModeState basis(int na, int nb, const Cutoff& cutoff);

  const Cutoff& cutoff() const noexcept { return cutoff_; }
  const ComplexVector& amplitudes() const noexcept { return amp_; }
  ComplexVector& amplitudes() noexcept { return amp_; }

  Complex operator()(int na, int nb) const { return amp_[flat_index(na, nb, cutoff_)]; }
  Complex& operator()(int na, int nb) { return amp_[flat_index(na, nb, cutoff_)]; }

  double norm_squared() const { return amp_.squaredNorm(); }

 private:
  Cutoff cutoff_;
  ComplexVector amp_;
};

/// Dense operator on the truncated two-mode space.
class FockOperator {
 public:
  explicit FockOperator(const Cutoff& cutoff);
  FockOperator(const Cutoff& cutoff, ComplexMatrix mat);

  static FockOperator identity(const Cutoff& cutoff);

  const Cutoff& cutoff() const noexcept { return cutoff_; }
  const ComplexMatrix& matrix() const noexcept { return mat_; }
  ComplexMatrix& matrix() noexcept { return mat_; }

  /// <out_a, out_b| M |in_a, in_b>
  Complex element(int out_a, int out_b, int in_a, int in_b) const;

  TwoModeState apply(const TwoModeState& x) const;

 private:
  Cutoff cutoff_;
  ComplexMatrix mat_;
};

/// Single-mode ladder operator as a (n_max+1)x(n_max+1) matrix. Creation out
/// of the top level maps to zero.
ComplexMatrix single_mode_ladder(Ladder ladder, const Cutoff& cutoff);

/// Two-mode ladder operator (ladder on the selected mode, identity on the
/// other) in sparse form.
SparseMatrix ladder_sparse(LadderKind kind, const Cutoff& cutoff);

FockOperator ladder_matrix(LadderKind kind, const Cutoff& cutoff);

/// Kronecker product Xa (x) Xb of single-mode operators, laid out to match
/// flat_index.
ComplexMatrix tensor(const ComplexMatrix& xa, const ComplexMatrix& xb);

/// <x|y>, conjugate-linear in x.
Complex inner_product(const TwoModeState& x, const TwoModeState& y);

/// Probability mass on basis states with na == n_max or nb == n_max.
double tail_mass(const TwoModeState& x);

// Log-gamma based combinatorics, accurate for counts up to several hundred.
double log_factorial(int n);
double log_binomial(int n, int k);
double sqrt_binomial(int n, int k);

}  // namespace twomode
