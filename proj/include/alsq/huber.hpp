#pragma once

#include "alsq/losses.hpp"
#include "alsq/oracle.hpp"
#include "alsq/rng.hpp"
#include "alsq/sensitivity.hpp"
#include "alsq/solvers.hpp"
#include "alsq/types.hpp"

namespace alsq {

struct HuberConfig {
  double tau = 1.0;  // Huber knee

  // p-grid I subset [1,2]: spacing max(c_grid/log2 n, (2-1)/(grid_cap-1))
  int grid_cap = 24;
  double c_grid = 2.0;

  // per-step oversampling m = m_const * d * lg2(n W / delta)^{k_log} / eps^{e_eps}
  double m_const = 0.30;
  double k_log = 1.0;
  double e_eps = 1.0;

  // recursion target C_h * d^{1+beta} * lg2(n/delta)^{kappa_log} / eps^{kappa_eps}
  double C_h = 2.0;
  double kappa_log = 1.0;
  double kappa_eps = 1.0;

  double active_m_multiplier = 4.0;  // larger poly terms for the residual step
  double base_mult = 2.0;            // active base-case threshold multiplier
  double delta = 0.1;

  SensitivityConfig sens{1.0 / 3.0, 1.0, 1e-4, 40};
  double lewis_tol = 1e-3;
  int lewis_max_iter = 25;
  SolverOptions solver{};
};

double huber_step_beta();  // 3 - 2*sqrt(2)

/// sum_i w_i H(y_i), the squared (weighted) Huber norm at knee tau.
double huber_norm2(const Vector& y, double tau = 1.0);
double huber_norm2(const Vector& y, const WeightVector& w, double tau = 1.0);

/// The discretized exponent grid I inside [q_lo, 2].
std::vector<double> huber_p_grid(Index n, double q_lo = 1.0, int cap = 24, double c_grid = 2.0);

struct HuberBranchResult {
  bool holds = false;
  int branch = 0;  // 1: restricted small-entry bound, 2: whole-vector bound
  double restricted_lhs = 0, restricted_rhs = 0;
  double full_lhs = 0, full_rhs = 0;
};

/// Evaluates both branches of the dual Huber / l2-lq inequality at test
/// constant c_test and reports which holds. Property-test machinery, not part
/// of the sampling pipeline.
HuberBranchResult huber_inequality_check(const Vector& y, double gamma, double q,
                                         double c_test = 0.01);

Index huber_embedding_target(Index n, Index d, double eps, double delta,
                             const HuberConfig& cfg = {});

/// One sampling step: dyadic weight buckets, rows with large Huber
/// sensitivity kept outright, the rest sampled by a mixture of 1/n and the
/// per-grid-p Lewis weights of the bucket and of its small-sensitivity part.
WeightVector huber_embed_step(const Matrix& A, const WeightVector& w, double eps, double delta,
                              RngStream& rng, const HuberConfig& cfg = {}, double m_mult = 1.0);

struct HuberEmbedResult {
  WeightVector w;
  int steps = 0;
  bool reached_target = true;
  std::vector<Index> nnz_sequence;  // nnz after each step, starting with the input
};

/// Iterates huber_embed_step until nnz(w) clears the d^{4-2*sqrt(2)}-shaped
/// target; log-size contracts per step so O(log log n) steps suffice.
HuberEmbedResult huber_subspace_embedding(const Matrix& A, double eps, double delta,
                                          RngStream& rng, const HuberConfig& cfg = {},
                                          const WeightVector* w0 = nullptr);

struct HuberActiveResult {
  SolveResult sol;
  int levels = 0;
};

/// Active Huber regression: embed, constant-factor solve on the embedded
/// sample, recurse on the residual with a fresh sampling step.
HuberActiveResult huber_active(const Matrix& A, TargetOracle& b, double eps, RngStream& rng,
                               const HuberConfig& cfg = {});

}  // namespace alsq
