#pragma once

#include "alsq/lewis.hpp"
#include "alsq/losses.hpp"
#include "alsq/oracle.hpp"
#include "alsq/rng.hpp"
#include "alsq/solvers.hpp"
#include "alsq/types.hpp"

namespace alsq {

struct BudgetConstants {
  double C_low = 0.30;   // p in (0, 1]
  double C_mid = 0.50;   // p in (1, 2]
  double C_high = 0.02;  // p > 2
  double c_delta = 3.0;  // trial count ell = ceil(c_delta * log2(1/delta))
  double cf_share = 0.4; // budget fraction reserved for the constant-factor stage
};

struct ActiveBudget {
  double p = 2.0, eps = 0.0, delta = 0.0;
  Index d = 0, n = 0;
  Index m = 0;        // total query budget
  Index m_trial = 0;  // per-trial base-case threshold for the recursion
  Index m_cf = 0;     // constant-factor stage reserve
  Index ell = 1;      // high-probability trials
  double polylog = 1.0;  // the [(log d)^2 log(d/eps) + log 1/delta] log 1/delta part
  std::vector<double> beta_ladder;   // beta_i = 2^i/(2^i - 1)
  std::vector<double> gamma_ladder;  // per-stage accuracy targets for p in (1,2)
};

/// Query budget per the branch formulas: d/eps^2, d/eps, d^{p/2}/eps^p times
/// polylog terms. Constants are configuration with acceptance-calibrated
/// defaults.
ActiveBudget budget(double p, Index d, Index n, double eps, double delta,
                    const BudgetConstants& c = {});

struct BoostResult {
  Vector x;
  Index chosen = 0;
  bool qualified = true;  // false: fell back to the min-eccentricity candidate
  double tau = 0.0;       // 80th-percentile pairwise distance
};

/// Pairwise-distance boosting: returns the first candidate within the 80th
/// percentile distance of at least half the others. Reads no entries of b.
BoostResult boost_candidates(const std::vector<Vector>& candidates, const Matrix& A,
                             const LossDescriptor& norm_loss, double kappa);

struct LpActiveConfig {
  BudgetConstants budget{};
  EmbeddingConfig embed{};
  SolverOptions solver{};
  double lewis_tol = 1e-3;
  int lewis_max_iter = 40;
};

/// Sample-and-solve at a 1/2-accurate embedding, repeated and boosted; O(1)
/// approximation with probability 1 - delta.
SolveResult constant_factor_lp(const Matrix& A, TargetOracle& b, double p, double delta,
                               RngStream& rng, const LpActiveConfig& cfg = {});

struct RecursiveLpResult {
  SolveResult sol;
  std::vector<Index> sample_rows;  // base-case original rows (b was read here)
  Vector sample_weights;           // their accumulated lp^p weights
  int depth = 0;
  bool depth_ok = true;
};

/// Halve by split-and-sample until at most m rows remain, then solve the
/// weighted subproblem; b is read only at the base case.
RecursiveLpResult recursive_relative_lp(const Matrix& A, TargetOracle& b, double p, Index m,
                                        RngStream& rng, const LpActiveConfig& cfg = {},
                                        const Vector* first_round_lewis = nullptr);

/// ell independent recursions, ranked on their own samples against a boosted
/// constant-factor pilot, worst tenth discarded, then boosted. (1 + eps)
/// relative error with probability 1 - delta.
SolveResult high_prob_relative_lp(const Matrix& A, TargetOracle& b, double p, double eps,
                                  double delta, RngStream& rng,
                                  const LpActiveConfig& cfg = {});

struct NoAssumptionsConfig {
  LpActiveConfig inner{};
  double C_stage1 = 0.25;  // one-shot oversampling constant
};

/// Two-stage pipeline: one-shot Lewis sampling to poly(d/eps) rows, then the
/// high-probability solver on the reduced problem; removes the log n factor.
SolveResult no_assumptions_lp(const Matrix& A, TargetOracle& b, double p, double eps,
                              double delta, RngStream& rng,
                              const NoAssumptionsConfig& cfg = {});

}  // namespace alsq
