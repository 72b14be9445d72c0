#pragma once

#include "twomode/fock.hpp"
#include "twomode/gaussian.hpp"

namespace twomode {

/// Partial transpose on mode B: M^{Tb}[(n,m),(i,j)] = M[(n,j),(i,m)].
FockOperator partial_transpose_b(const FockOperator& op);

struct DualityResidual {
  double lhs;
  double rhs;
  double abs_err;
};

/// lhs = <n,j|U_PDC(g)|i,m>, rhs = g^{-1/2} <n,m|U_BS(1/g)|i,j>, both from
/// the closed forms.
DualityResidual check_duality(int i, int j, int n, int m, double gain);

/// Same comparison with both sides read from the dense oracles.
DualityResidual check_duality(int i, int j, int n, int m, const SectorOracle& pdc, const SectorOracle& bs);

/// Max |PT_b(U_PDC) - U_BS(1/g)/sqrt(g)| over indices <= block, from dense
/// oracles at the given cutoff.
double oracle_duality_residual(double gain, const Cutoff& cutoff, int block);

struct WScalarReport {
  double w00;
  /// Largest |W[(p,q),(p',q')]| with (p,q) != (p',q') on the block.
  double max_offdiag;
  /// Largest |W[(p,q),(p,q)] - 1/g| on the block.
  double max_diag_dev;
  /// Per-mode bound of the block {p, q <= block}.
  int block;
  /// Largest change of any block entry when the cutoff is lowered by a few
  /// levels; an upper estimate of the truncation error.
  double truncation_estimate;
};

/// W = (V^dag)^{Tb} V^{Tb} for V = U_PDC(g) from the oracle at `cutoff`.
/// With block < 0 the block is the largest one whose truncation estimate is
/// <= tolerance. Throws TruncationError when no block (or the requested one)
/// meets the tolerance.
WScalarReport w_scalar(double gain, const Cutoff& cutoff, int block = -1, double tolerance = 1e-10);

struct TraceIdentityResult {
  Complex lhs;
  Complex rhs;
  double residual;
  double truncation_estimate;
};

/// Tr[U_PDC (Xa x Xb) U_PDC^dag (Ya x Yb)] against
/// (1/g) Tr[U_BS (Xa x Yb^T) U_BS^dag (Ya x Xb^T)] with U_BS of transmittance
/// 1/g. The factors are square single-mode matrices of a common size d; they
/// act on levels 0..d-1. Both traces use oracle elements at `cutoff` and are
/// repeated a few levels lower to estimate truncation; a change above
/// tail_bound raises TruncationError.
TraceIdentityResult check_trace_identity(const ComplexMatrix& xa, const ComplexMatrix& xb, const ComplexMatrix& ya,
                                         const ComplexMatrix& yb, double gain, const Cutoff& cutoff,
                                         double tail_bound = 1e-10);

/// cos(theta) sum_n sin^n(theta) |n,n>, read off a beam splitter of angle
/// theta acting on |0,n>. Equal to the two-mode squeezed vacuum with
/// tanh r = sin theta. Throws TruncationError if the mass beyond the cutoff
/// exceeds tail_bound.
TwoModeState epr_probe_state(double theta, const Cutoff& cutoff, double tail_bound = kDefaultTailBound);

}  // namespace twomode
