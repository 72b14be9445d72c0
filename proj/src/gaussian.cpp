#include "twomode/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "twomode/expm.hpp"

namespace twomode {

namespace {

constexpr double kSlack = 1e-12;

double clamp_checked(double x, double lo, double hi, const char* what) {
  if (!(x >= lo - kSlack && x <= hi + kSlack)) {
    throw std::invalid_argument(std::string(what) + " out of range: " + std::to_string(x));
  }
  return std::clamp(x, lo, hi);
}

// log(x^p) with the conventions 0^0 = 1 and 0^p = 0 for p > 0.
double log_pow(double x, int p) {
  if (p == 0) return 0.0;
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  return p * std::log(x);
}

void require_counts(int n, int m, int i, int j) {
  if (n < 0 || m < 0 || i < 0 || j < 0) throw std::invalid_argument("photon counts must be non-negative");
}

}  // namespace

double theta_from_eta(double eta) {
  return std::acos(std::sqrt(clamp_checked(eta, 0.0, 1.0, "transmittance")));
}

double eta_from_theta(double theta) {
  theta = clamp_checked(theta, 0.0, std::numbers::pi / 2, "beam-splitter angle");
  const double c = std::cos(theta);
  return c * c;
}

double squeezing_from_gain(double gain) {
  gain = clamp_checked(gain, 1.0, std::numeric_limits<double>::infinity(), "gain");
  return std::acosh(std::sqrt(gain));
}

double gain_from_squeezing(double r) {
  r = clamp_checked(r, 0.0, std::numeric_limits<double>::infinity(), "squeezing");
  const double c = std::cosh(r);
  return c * c;
}

double db_from_squeezing(double r) { return 20.0 * r / std::numbers::ln10; }

double squeezing_from_db(double db) { return db * std::numbers::ln10 / 20.0; }

BeamSplitter BeamSplitter::from_transmittance(double eta) {
  return BeamSplitter{clamp_checked(eta, 0.0, 1.0, "transmittance")};
}

BeamSplitter BeamSplitter::from_angle(double theta) { return BeamSplitter{eta_from_theta(theta)}; }

Amplifier Amplifier::from_gain(double gain) {
  return Amplifier{clamp_checked(gain, 1.0, std::numeric_limits<double>::infinity(), "gain")};
}

Amplifier Amplifier::from_squeezing(double r) { return Amplifier{gain_from_squeezing(r)}; }

Amplifier Amplifier::from_db(double db) { return from_squeezing(squeezing_from_db(db)); }

Amplifier time_reversal_partner(const BeamSplitter& bs) {
  if (!(bs.eta > 0.0)) throw std::invalid_argument("a zero-transmittance beam splitter has no amplifier partner");
  return Amplifier::from_gain(1.0 / bs.eta);
}

BeamSplitter time_reversal_partner(const Amplifier& pdc) {
  return BeamSplitter::from_transmittance(1.0 / pdc.gain);
}

// Expansion of U a^dag^i b^dag^j U^dag |0,0> / sqrt(i! j!) with
// U a^dag U^dag = c a^dag - s b^dag and U b^dag U^dag = s a^dag + c b^dag.
// k counts the photons from mode a that stay in a; n - k come from mode b.
double bs_element(int n, int m, int i, int j, double eta) {
  require_counts(n, m, i, j);
  eta = clamp_checked(eta, 0.0, 1.0, "transmittance");
  if (i + j != n + m) return 0.0;
  const double c = std::sqrt(eta);
  const double s = std::sqrt(1.0 - eta);
  const double norm = 0.5 * (log_factorial(n) + log_factorial(m) - log_factorial(i) - log_factorial(j));
  double sum = 0.0;
  for (int k = std::max(0, n - j); k <= std::min(i, n); ++k) {
    const double log_mag = norm + log_binomial(i, k) + log_binomial(j, n - k) +
                           log_pow(c, 2 * k + j - n) + log_pow(s, i + n - 2 * k);
    const double term = std::exp(log_mag);
    sum += (i - k) % 2 == 0 ? term : -term;
  }
  return sum;
}

// Normal-ordered disentangled form
//   U = exp(t a^dag b^dag) (1/cosh r)^{1 + Na + Nb} exp(-t a b),  t = tanh r.
// k input pairs are annihilated, then l = n - i + k pairs are created.
std::vector<PathTerm> pdc_path_terms(int n, int m, int i, int j, double gain) {
  require_counts(n, m, i, j);
  gain = clamp_checked(gain, 1.0, std::numeric_limits<double>::infinity(), "gain");
  std::vector<PathTerm> terms;
  if (i - j != n - m) return terms;
  const double t = std::sqrt(1.0 - 1.0 / gain);
  const double inv_cosh = 1.0 / std::sqrt(gain);
  const double norm = 0.5 * (log_factorial(i) + log_factorial(j) + log_factorial(n) + log_factorial(m));
  for (int k = std::max(0, i - n); k <= std::min(i, j); ++k) {
    const int l = n - i + k;
    const double log_mag = norm - log_factorial(k) - log_factorial(l) - log_factorial(i - k) -
                           log_factorial(j - k) + log_pow(t, k + l) + log_pow(inv_cosh, 1 + i + j - 2 * k);
    const double mag = std::exp(log_mag);
    terms.push_back({k, l, k % 2 == 0 ? mag : -mag});
  }
  return terms;
}

double pdc_element(int n, int m, int i, int j, double gain) {
  double sum = 0.0;
  for (const auto& term : pdc_path_terms(n, m, i, j, gain)) sum += term.amplitude;
  return sum;
}

double element(const CouplerSpec& coupler, int n, int m, int i, int j) {
  return std::visit(
      [&](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, BeamSplitter>) {
          return bs_element(n, m, i, j, c.eta);
        } else {
          return pdc_element(n, m, i, j, c.gain);
        }
      },
      coupler);
}

ApplyResult apply(const CouplerSpec& coupler, const TwoModeState& x, double tail_bound) {
  const Cutoff& cutoff = x.cutoff();
  const int top = cutoff.n_max();
  const bool passive = std::holds_alternative<BeamSplitter>(coupler);
  TwoModeState y(cutoff);
  for (int i = 0; i <= top; ++i) {
    for (int j = 0; j <= top; ++j) {
      const Complex xij = x(i, j);
      if (xij == Complex(0.0)) continue;
      for (int n = 0; n <= top; ++n) {
        // the conserved quantity fixes m given n
        const int m = passive ? i + j - n : n - i + j;
        if (m < 0 || m > top) continue;
        y(n, m) += element(coupler, n, m, i, j) * xij;
      }
    }
  }
  const double lost = std::max(0.0, x.norm_squared() - y.norm_squared());
  const double tail = tail_mass(y) + lost;
  if (tail > tail_bound) {
    throw TruncationError("cutoff " + std::to_string(top) + " too small: tail mass " + std::to_string(tail) +
                              " exceeds bound " + std::to_string(tail_bound),
                          tail);
  }
  return {std::move(y), tail};
}

SparseMatrix generator(const CouplerSpec& coupler, const Cutoff& cutoff) {
  const SparseMatrix a = ladder_sparse({Ladder::Annihilate, Mode::A}, cutoff);
  const SparseMatrix ad = ladder_sparse({Ladder::Create, Mode::A}, cutoff);
  const SparseMatrix b = ladder_sparse({Ladder::Annihilate, Mode::B}, cutoff);
  const SparseMatrix bd = ladder_sparse({Ladder::Create, Mode::B}, cutoff);
  if (const auto* bs = std::get_if<BeamSplitter>(&coupler)) {
    const SparseMatrix g = ad * b - a * bd;
    return bs->theta() * g;
  }
  const SparseMatrix g = ad * bd - a * b;
  return std::get<Amplifier>(coupler).squeezing() * g;
}

SectorOracle::SectorOracle(const CouplerSpec& coupler, const Cutoff& cutoff)
    : SectorOracle(coupler, cutoff,
                   std::holds_alternative<BeamSplitter>(coupler) ? 0 : -cutoff.n_max(),
                   std::holds_alternative<BeamSplitter>(coupler) ? 2 * cutoff.n_max() : cutoff.n_max()) {}

SectorOracle::SectorOracle(const CouplerSpec& coupler, const Cutoff& cutoff, int first_sector, int last_sector)
    : passive_(std::holds_alternative<BeamSplitter>(coupler)), cutoff_(cutoff) {
  const int top = cutoff.n_max();
  const int lo = passive_ ? 0 : -top;
  const int hi = passive_ ? 2 * top : top;
  first_sector_ = std::max(first_sector, lo);
  last_sector = std::min(last_sector, hi);

  for (int key = first_sector_; key <= last_sector; ++key) {
    const int first = first_state(key);
    const int last = passive_ ? std::min(key, top) : std::min(top, top + key);
    blocks_.emplace_back(Eigen::MatrixXd::Zero(last - first + 1, last - first + 1));
  }

  const SparseMatrix gen = generator(coupler, cutoff);
  for (Eigen::Index col = 0; col < gen.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(gen, col); it; ++it) {
      const auto [ra, rb] = decode_index(static_cast<std::size_t>(it.row()), cutoff);
      const auto [ca, cb] = decode_index(static_cast<std::size_t>(it.col()), cutoff);
      const int key = sector_of(ca, cb);
      if (sector_of(ra, rb) != key) throw std::logic_error("generator couples different sectors");
      if (key < first_sector_ || key > last_sector) continue;
      if (it.value().imag() != 0.0) throw std::logic_error("generator is not real in the Fock basis");
      const int first = first_state(key);
      blocks_[static_cast<std::size_t>(key - first_sector_)](ra - first, ca - first) = it.value().real();
    }
  }
  for (auto& block : blocks_) block = expm(block);
}

// Sector members are ordered by na; this is the smallest na in the sector.
int SectorOracle::first_state(int key) const noexcept {
  return passive_ ? std::max(0, key - cutoff_.n_max()) : std::max(0, key);
}

double SectorOracle::element(int n, int m, int i, int j) const {
  flat_index(n, m, cutoff_);
  flat_index(i, j, cutoff_);
  const int key = sector_of(i, j);
  if (sector_of(n, m) != key) return 0.0;
  const auto pos = static_cast<std::size_t>(key - first_sector_);
  if (key < first_sector_ || pos >= blocks_.size()) {
    throw std::out_of_range("sector " + std::to_string(key) + " was not computed");
  }
  const int first = first_state(key);
  return blocks_[pos](n - first, i - first);
}

FockOperator SectorOracle::dense() const {
  FockOperator out(cutoff_);
  const int top = cutoff_.n_max();
  for (std::size_t pos = 0; pos < blocks_.size(); ++pos) {
    const int key = first_sector_ + static_cast<int>(pos);
    const int first = first_state(key);
    const auto& block = blocks_[pos];
    for (Eigen::Index p = 0; p < block.rows(); ++p) {
      for (Eigen::Index q = 0; q < block.cols(); ++q) {
        const int na = first + static_cast<int>(p);
        const int ia = first + static_cast<int>(q);
        const int nb = passive_ ? key - na : na - key;
        const int ib = passive_ ? key - ia : ia - key;
        if (nb < 0 || nb > top || ib < 0 || ib > top) continue;
        out.matrix()(static_cast<Eigen::Index>(flat_index(na, nb, cutoff_)),
                     static_cast<Eigen::Index>(flat_index(ia, ib, cutoff_))) = block(p, q);
      }
    }
  }
  return out;
}

FockOperator dense_oracle(const CouplerSpec& coupler, const Cutoff& cutoff) {
  return SectorOracle(coupler, cutoff).dense();
}

namespace {

FockOperator box_block(const SectorOracle& oracle, const Cutoff& box) {
  FockOperator out(box);
  const int top = box.n_max();
  for (int n = 0; n <= top; ++n) {
    for (int m = 0; m <= top; ++m) {
      const auto row = static_cast<Eigen::Index>(flat_index(n, m, box));
      for (int i = 0; i <= top; ++i) {
        const int j = i - n + m;  // number difference is conserved
        if (j < 0 || j > top) continue;
        out.matrix()(row, static_cast<Eigen::Index>(flat_index(i, j, box))) = oracle.element(n, m, i, j);
      }
    }
  }
  return out;
}

}  // namespace

ConvergedBlock converged_pdc_block(double gain, const Cutoff& box, double tolerance, int max_internal) {
  const int top = box.n_max();
  const Amplifier pdc = Amplifier::from_gain(gain);
  int internal = top + 16;
  FockOperator previous = box_block(SectorOracle(pdc, Cutoff(internal), -top, top), box);
  double change = std::numeric_limits<double>::infinity();
  while (internal < max_internal) {
    internal = std::min(max_internal, internal + std::max(8, internal / 4));
    FockOperator current = box_block(SectorOracle(pdc, Cutoff(internal), -top, top), box);
    change = (current.matrix() - previous.matrix()).cwiseAbs().maxCoeff();
    previous = std::move(current);
    if (change <= tolerance) return {std::move(previous), internal, change};
  }
  throw TruncationError("PDC block on cutoff " + std::to_string(top) + " did not converge below internal cutoff " +
                            std::to_string(max_internal),
                        change);
}

double heisenberg_residual(const CouplerSpec& coupler, const Cutoff& cutoff, int max_total) {
  if (max_total < 0) max_total = cutoff.n_max() - 2;
  std::vector<Eigen::Index> inside;
  for (std::size_t idx = 0; idx < cutoff.dim(); ++idx) {
    const auto [na, nb] = decode_index(idx, cutoff);
    if (na + nb <= max_total) inside.push_back(static_cast<Eigen::Index>(idx));
  }
  if (inside.empty()) return 0.0;

  const ComplexMatrix u = dense_oracle(coupler, cutoff).matrix();
  const SparseMatrix a = ladder_sparse({Ladder::Annihilate, Mode::A}, cutoff);
  const SparseMatrix b = ladder_sparse({Ladder::Annihilate, Mode::B}, cutoff);

  SparseMatrix a_prime;
  SparseMatrix b_prime;
  if (const auto* bs = std::get_if<BeamSplitter>(&coupler)) {
    const double c = std::sqrt(bs->eta);
    const double s = std::sqrt(1.0 - bs->eta);
    a_prime = c * a + s * b;
    b_prime = -s * a + c * b;
  } else {
    const double g = std::get<Amplifier>(coupler).gain;
    const double ch = std::sqrt(g);
    const double sh = std::sqrt(g - 1.0);
    a_prime = ch * a + sh * SparseMatrix(b.adjoint());
    b_prime = sh * SparseMatrix(a.adjoint()) + ch * b;
  }

  // U^dag a U = a' is checked as a U = U a' on rows and columns inside S.
  const ComplexMatrix u_cols = u(Eigen::all, inside);
  const auto residual = [&](const SparseMatrix& x, const SparseMatrix& x_prime) {
    const ComplexMatrix lhs = x * u_cols;
    const ComplexMatrix x_prime_cols = ComplexMatrix(x_prime)(Eigen::all, inside);
    const ComplexMatrix rhs = u * x_prime_cols;
    return (lhs(inside, Eigen::all) - rhs(inside, Eigen::all)).cwiseAbs().maxCoeff();
  };
  return std::max(residual(a, a_prime), residual(b, b_prime));
}

}  // namespace twomode
