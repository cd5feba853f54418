#pragma once

#include <utility>
#include <vector>

#include "alsq/oracle.hpp"
#include "alsq/rng.hpp"
#include "alsq/types.hpp"

namespace alsq {

/// Statistical leverage scores tau_i = a_i^T (A^T A)^+ a_i, computed from a
/// column-pivoted QR with relative rank tolerance 1e-10. Full column rank is
/// not assumed.
Vector leverage_scores(const Matrix& A);

Index numeric_rank(const Matrix& A);

struct LewisWeights {
  double p = 2.0;
  Vector w;                 // length n, each in [0, 1]; 0 only for zero rows
  double sum_w = 0.0;
  double residual = 0.0;    // max relative fixed-point violation at return
  bool converged = false;
  int iterations = 0;
};

/// Fixed-point iteration w_i <- (a_i^T (A^T W^{1-2/p} A)^+ a_i)^{p/2} from the
/// uniform start w = d/n. Plain iteration for p < 4, geometrically damped with
/// exponent 2/p for p >= 4. Zero rows get weight 0 and are excluded from the
/// residual.
LewisWeights lewis_weights(const Matrix& A, double p, double tol = 1e-10, int max_iter = 200);

struct SplitRows {
  Matrix A;                    // n' x d, same ||.||_p image as the input
  std::vector<Index> parent;   // new row -> source row
  std::vector<Index> copies;   // per source row, its multiplicity k
};

/// Flattens Lewis weights: any row with weight bound above C2*d/n is replaced
/// by k = ceil(w_ub/(C2*d/n)) copies of a_i / k^{1/p}, preserving ||Ax||_p
/// exactly.
SplitRows split_rows(const Matrix& A, const Vector& w_ub, double p, double C2);

/// Keeps each row independently with probability 1/2, scaled by 2^{1/p}.
/// Returns the kept scaled rows and their indices into the input.
std::pair<Matrix, std::vector<Index>> split_and_sample(const Matrix& Ap, double p,
                                                       RngStream& rng);

struct SamplingPlan {
  Vector prob;     // in (0, 1]
  double p = 2.0;  // kept rows are rescaled by prob^{-1/p}
};

/// One-shot plan with p_i = min{1, m * d^{max(0,p/2-1)} * w_ub_i}.
SamplingPlan lewis_sampling_plan(const Vector& w_ub, double p, double m, Index d);

struct PlanApplication {
  std::vector<Index> rows;  // selected row indices
  Vector scale;             // p_i^{-1/p} per selected row
  Vector b;                 // scaled target entries; empty when no oracle given
};

/// Applies a plan; when an oracle is given, exactly the selected indices are
/// queried.
PlanApplication apply_plan(const Matrix& A, TargetOracle* b, const SamplingPlan& plan,
                           RngStream& rng);

struct EmbeddingConfig {
  double C_se = 0.02;        // target-size constant; acceptance-calibrated
  double C2 = 8.0;           // row-splitting threshold constant
  double ub_slack = 1.05;    // padding so computed weights stay upper bounds
  double lewis_tol = 1e-3;   // constant-factor weights suffice per round
  int lewis_max_iter = 40;
  int extra_rounds = 8;      // allowance beyond ceil(log2 n)
};

Index embedding_target_rows(Index n, Index d, double p, double eps, double delta,
                            const EmbeddingConfig& cfg = {});

struct EmbeddingResult {
  WeightVector w;   // per-original-row weights: sum_i w_i |a_i x|^p ~ ||Ax||_p^p
  int rounds = 0;
  bool ok = true;   // false when the round cap was hit
};

/// Repeats {lewis weights -> split rows -> Bernoulli(1/2) sample} until at
/// most the target number of rows remains.
EmbeddingResult lp_subspace_embedding(const Matrix& A, double p, double eps, double delta,
                                      RngStream& rng, const EmbeddingConfig& cfg = {});

/// Same, with precomputed round-1 Lewis weights (they depend only on A, so
/// repeated trials can share them).
EmbeddingResult lp_subspace_embedding_from(const Matrix& A, double p, double eps, double delta,
                                           RngStream& rng, const EmbeddingConfig& cfg,
                                           const Vector* first_round_lewis);

/// ||Ax||_{p,w}^p = sum_i w_i |a_i x|^p for a sparse weight vector.
double weighted_lp_cost(const Matrix& A, const Vector& x, const WeightVector& w, double p);

}  // namespace alsq
