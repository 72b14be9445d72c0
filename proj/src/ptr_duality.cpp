#include "twomode/ptr_duality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace twomode {

namespace {

int lowered(int n_max) { return n_max - std::max(4, n_max / 8); }

// <k,q|V|p,l> for V = U_PDC, zero when the index falls outside the cutoff
// (the truncated operator has no such entry).
double v_at(const SectorOracle& v, int k, int q, int p, int l) {
  const int top = v.cutoff().n_max();
  if (k > top || q > top || p > top || l > top) return 0.0;
  return v.element(k, q, p, l);
}

// W[(p,q),(p2,q2)] = sum_{k,l} conj(V[(k,q),(p,l)]) V[(k,q2),(p2,l)].
// Conservation of na - nb leaves l = p + q - k and forces p + q = p2 + q2.
double w_entry(const SectorOracle& v, int p, int q, int p2, int q2) {
  if (p + q != p2 + q2) return 0.0;
  double sum = 0.0;
  for (int k = 0; k <= p + q; ++k) {
    const int l = p + q - k;
    sum += v_at(v, k, q, p, l) * v_at(v, k, q2, p2, l);
  }
  return sum;
}

struct WEntry {
  int p, q, p2, q2;
  double value;
  double change;
};

// U[R,C] with R = C = {(p,q) : p, q < d}, ordered a-major like tensor().
ComplexMatrix support_block(const SectorOracle& u, int d) {
  ComplexMatrix out = ComplexMatrix::Zero(d * d, d * d);
  for (int n = 0; n < d; ++n) {
    for (int m = 0; m < d; ++m) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) out(n * d + m, i * d + j) = u.element(n, m, i, j);
      }
    }
  }
  return out;
}

std::pair<Complex, Complex> trace_pair(const ComplexMatrix& xa, const ComplexMatrix& xb, const ComplexMatrix& ya,
                                       const ComplexMatrix& yb, double gain, const Cutoff& cutoff) {
  const int d = static_cast<int>(xa.rows());
  const ComplexMatrix pdc = support_block(SectorOracle(Amplifier::from_gain(gain), cutoff), d);
  const ComplexMatrix bs = support_block(SectorOracle(BeamSplitter::from_transmittance(1.0 / gain), cutoff), d);
  const Complex lhs = (pdc * tensor(xa, xb) * pdc.adjoint() * tensor(ya, yb)).trace();
  const Complex rhs =
      (bs * tensor(xa, yb.transpose()) * bs.adjoint() * tensor(ya, xb.transpose())).trace() / gain;
  return {lhs, rhs};
}

}  // namespace

FockOperator partial_transpose_b(const FockOperator& op) {
  const Cutoff& cutoff = op.cutoff();
  const int top = cutoff.n_max();
  FockOperator out(cutoff);
  for (int n = 0; n <= top; ++n) {
    for (int m = 0; m <= top; ++m) {
      const auto row = static_cast<Eigen::Index>(flat_index(n, m, cutoff));
      for (int i = 0; i <= top; ++i) {
        for (int j = 0; j <= top; ++j) {
          out.matrix()(row, static_cast<Eigen::Index>(flat_index(i, j, cutoff))) = op.element(n, j, i, m);
        }
      }
    }
  }
  return out;
}

DualityResidual check_duality(int i, int j, int n, int m, double gain) {
  const double lhs = pdc_element(n, j, i, m, gain);
  const double rhs = bs_element(n, m, i, j, 1.0 / gain) / std::sqrt(gain);
  return {lhs, rhs, std::abs(lhs - rhs)};
}

DualityResidual check_duality(int i, int j, int n, int m, const SectorOracle& pdc, const SectorOracle& bs) {
  if (pdc.passive() || !bs.passive()) throw std::invalid_argument("expected a PDC oracle and a BS oracle");
  // The oracles carry no parameters, so g is recovered from <0,0|U_PDC|0,0> = 1/sqrt(g).
  const double v00 = pdc.element(0, 0, 0, 0);
  const double lhs = pdc.element(n, j, i, m);
  const double rhs = bs.element(n, m, i, j) * v00;
  return {lhs, rhs, std::abs(lhs - rhs)};
}

double oracle_duality_residual(double gain, const Cutoff& cutoff, int block) {
  if (block < 0 || block > cutoff.n_max()) throw std::invalid_argument("block outside the cutoff");
  const SectorOracle pdc(Amplifier::from_gain(gain), cutoff);
  const SectorOracle bs(BeamSplitter::from_transmittance(1.0 / gain), cutoff);
  double worst = 0.0;
  for (int n = 0; n <= block; ++n) {
    for (int m = 0; m <= block; ++m) {
      for (int i = 0; i <= block; ++i) {
        for (int j = 0; j <= block; ++j) worst = std::max(worst, check_duality(i, j, n, m, pdc, bs).abs_err);
      }
    }
  }
  return worst;
}

WScalarReport w_scalar(double gain, const Cutoff& cutoff, int block, double tolerance) {
  const Amplifier pdc = Amplifier::from_gain(gain);
  const int top = cutoff.n_max();
  const int low = lowered(top);
  if (low < 0) throw TruncationError("cutoff " + std::to_string(top) + " too small for a W estimate", 1.0);
  const int largest = low / 2;
  if (block > largest) {
    throw TruncationError("block " + std::to_string(block) + " needs a cutoff of at least " +
                              std::to_string(2 * block + std::max(4, top / 8)),
                          1.0);
  }

  const SectorOracle fine(pdc, cutoff, -top, top);
  const SectorOracle coarse(pdc, Cutoff(low), -low, low);

  // change_by_level[b]: largest change of any entry whose indices are all <= b.
  std::vector<double> change_by_level(static_cast<std::size_t>(largest) + 1, 0.0);
  std::vector<WEntry> entries;
  for (int p = 0; p <= largest; ++p) {
    for (int q = 0; q <= largest; ++q) {
      for (int p2 = 0; p2 <= largest; ++p2) {
        const int q2 = p + q - p2;
        if (q2 < 0 || q2 > largest) continue;
        const double value = w_entry(fine, p, q, p2, q2);
        const double change = std::abs(value - w_entry(coarse, p, q, p2, q2));
        const int level = std::max({p, q, p2, q2});
        change_by_level[static_cast<std::size_t>(level)] =
            std::max(change_by_level[static_cast<std::size_t>(level)], change);
        entries.push_back({p, q, p2, q2, value, change});
      }
    }
  }
  for (std::size_t b = 1; b < change_by_level.size(); ++b) {
    change_by_level[b] = std::max(change_by_level[b], change_by_level[b - 1]);
  }

  if (block < 0) {
    if (change_by_level[0] > tolerance) {
      throw TruncationError("W estimate at cutoff " + std::to_string(top) + " is not converged", change_by_level[0]);
    }
    block = 0;
    while (block < largest && change_by_level[static_cast<std::size_t>(block) + 1] <= tolerance) ++block;
  } else if (change_by_level[static_cast<std::size_t>(block)] > tolerance) {
    throw TruncationError("W on block " + std::to_string(block) + " is not converged at cutoff " +
                              std::to_string(top),
                          change_by_level[static_cast<std::size_t>(block)]);
  }

  WScalarReport report{0.0, 0.0, 0.0, block, change_by_level[static_cast<std::size_t>(block)]};
  for (const auto& e : entries) {
    if (std::max({e.p, e.q, e.p2, e.q2}) > block) continue;
    if (e.p == e.p2 && e.q == e.q2) {
      if (e.p == 0 && e.q == 0) report.w00 = e.value;
      report.max_diag_dev = std::max(report.max_diag_dev, std::abs(e.value - 1.0 / gain));
    } else {
      report.max_offdiag = std::max(report.max_offdiag, std::abs(e.value));
    }
  }
  return report;
}

TraceIdentityResult check_trace_identity(const ComplexMatrix& xa, const ComplexMatrix& xb, const ComplexMatrix& ya,
                                         const ComplexMatrix& yb, double gain, const Cutoff& cutoff,
                                         double tail_bound) {
  const Eigen::Index d = xa.rows();
  for (const ComplexMatrix* f : {&xa, &xb, &ya, &yb}) {
    if (f->rows() != d || f->cols() != d) throw std::invalid_argument("trace factors must be square of equal size");
  }
  if (d == 0) throw std::invalid_argument("trace factors are empty");
  // The BS oracle is exact on total photon number <= cutoff, which the support needs up to 2(d-1).
  const int low = lowered(cutoff.n_max());
  if (low < 2 * (static_cast<int>(d) - 1)) {
    throw TruncationError("cutoff " + std::to_string(cutoff.n_max()) + " too small for factors of size " +
                              std::to_string(d),
                          1.0);
  }
  const auto [lhs, rhs] = trace_pair(xa, xb, ya, yb, gain, cutoff);
  const auto [lhs_low, rhs_low] = trace_pair(xa, xb, ya, yb, gain, Cutoff(low));
  const double change = std::max(std::abs(lhs - lhs_low), std::abs(rhs - rhs_low));
  if (change > tail_bound) {
    throw TruncationError("trace identity not converged at cutoff " + std::to_string(cutoff.n_max()), change);
  }
  return {lhs, rhs, std::abs(lhs - rhs), change};
}

TwoModeState epr_probe_state(double theta, const Cutoff& cutoff, double tail_bound) {
  if (!(theta >= 0.0 && theta < std::numbers::pi / 2)) {
    throw std::invalid_argument("EPR probe angle must lie in [0, pi/2)");
  }
  const double eta = eta_from_theta(theta);
  const double c = std::cos(theta);
  const int top = cutoff.n_max();
  TwoModeState out(cutoff);
  for (int n = 0; n <= top; ++n) out(n, n) = c * bs_element(n, 0, 0, n, eta);
  // Mass on n >= top: sin^{2 top}(theta).
  const double tail = std::pow(std::sin(theta), 2 * top);
  if (tail > tail_bound) {
    throw TruncationError("cutoff " + std::to_string(top) + " too small for the EPR probe: tail " +
                              std::to_string(tail),
                          tail);
  }
  return out;
}

}  // namespace twomode
