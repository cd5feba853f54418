#pragma once

#include "alsq/losses.hpp"
#include "alsq/rng.hpp"
#include "alsq/sensitivity.hpp"
#include "alsq/types.hpp"

namespace alsq {

/// Orlicz norm inf{t > 0 : sum_i w_i G(|y_i|/t) <= 1} by bisection to relative
/// tolerance. G must be convex, strictly increasing on (0, inf), with G(0)=0;
/// violations on a probe grid are rejected.
double orlicz_norm(const Vector& y, const LossDescriptor& G, const WeightVector& w,
                   double tol = 1e-12);
double orlicz_norm(const Vector& y, const LossDescriptor& G, double tol = 1e-12);

struct OrliczConfig {
  double tau1 = 0.0;      // 0 -> min(d^3, n/2)
  double m_stage1 = 4.0;  // stage-1 oversampling
  double m_stage2 = 2.0;  // eps-independent part of the stage-2 oversampling
  SensitivityConfig sens{};
};

/// Two-stage sensitivity-sampling subspace embedding for the Orlicz norm:
/// plain sensitivities first, then weighted sensitivities over dyadic level
/// sets of the stage-1 weights.
WeightVector orlicz_subspace_embedding(const Matrix& A, const LossDescriptor& G, double eps,
                                       RngStream& rng, const OrliczConfig& cfg = {});

}  // namespace alsq
