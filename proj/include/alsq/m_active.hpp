#pragma once

#include "alsq/losses.hpp"
#include "alsq/oracle.hpp"
#include "alsq/rng.hpp"
#include "alsq/sensitivity.hpp"
#include "alsq/solvers.hpp"
#include "alsq/types.hpp"

namespace alsq {

struct MActiveConfig {
  double tau1 = 0.0;      // stage-1 sensitivity floor; 0 -> min(d^3, n/2)
  double m_stage1 = 4.0;  // oversampling of the b-free first stage
  double m_stage2 = 2.0;  // oversampling of the queried second stage
  // relative stage: m = m_rel * d / eps^{2+p_M} * lg(1/eps) * lg(1/delta),
  // with m_rel calibrated so desk-scale instances genuinely subsample
  double m_rel = 5e-4;
  double delta = 0.1;
  SensitivityConfig sens{};
  SolverOptions solver{};
};

/// Two-stage sensitivity sampling followed by a weighted solve; b is queried
/// only at the final sample. O(1)-factor solution with constant probability.
SolveResult m_constant_factor_active(const Matrix& A, TargetOracle& b,
                                     const LossDescriptor& M, RngStream& rng,
                                     const MActiveConfig& cfg = {});

/// Constant-factor solve, then sensitivity sampling on the residual at the
/// relative-error budget; returns x_c + x_bar.
SolveResult m_relative_active(const Matrix& A, TargetOracle& b, const LossDescriptor& M,
                              double eps, double delta, RngStream& rng,
                              const MActiveConfig& cfg = {});

/// The M-estimator pipeline instantiated with the lp-Tukey loss and a
/// multi-start solver.
SolveResult tukey_relative_active(const Matrix& A, TargetOracle& b, double tau, double p,
                                  double eps, RngStream& rng, const MActiveConfig& cfg = {});

}  // namespace alsq
