#pragma once

#include "alsq/losses.hpp"
#include "alsq/types.hpp"

namespace alsq {

struct SolveResult {
  Vector x;
  double objective = 0.0;  // sum_i w_i M(|(Ax - b)_i|), the p_M-th power
  int iterations = 0;
  bool converged = false;
  bool local_only = false;  // nonconvex loss: best of multi-start local optima
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 500;
  int starts = 5;  // multi-start count for nonconvex losses
  std::uint64_t multistart_seed = 0x5eed;
};

/// Weighted lp regression, min_x sum_i w_i |(Ax - b)_i|^p, by IRLS on the
/// smoothed objective sum w_i (r_i^2 + mu)^{p/2} with mu annealed from 1 down
/// to tol^2. Global for p >= 1; multi-start local optimum for p < 1.
SolveResult solve_weighted_lp(const Matrix& A, const Vector& b, const WeightVector& w,
                              double p, const SolverOptions& opt = {});
SolveResult solve_weighted_lp(const Matrix& A, const Vector& b, double p,
                              const SolverOptions& opt = {});

/// Weighted M-estimator regression by the same IRLS scheme, with the IRLS
/// weight M'(s)/(2s) at smoothed residual s.
SolveResult solve_weighted_mloss(const Matrix& A, const Vector& b, const WeightVector& w,
                                 const LossDescriptor& M, const SolverOptions& opt = {});
SolveResult solve_weighted_mloss(const Matrix& A, const Vector& b, const LossDescriptor& M,
                                 const SolverOptions& opt = {});

/// Exhaustive 1-d test oracle: uniform grid plus golden-section refinement.
/// Grids at a fixed point count are deterministic, and refining the grid never
/// worsens the reported objective.
SolveResult brute_force_1d(const Vector& a, const Vector& b, const LossDescriptor& M,
                           const WeightVector& w, int grid_points = 4097);

}  // namespace alsq
