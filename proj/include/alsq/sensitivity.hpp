#pragma once

#include "alsq/losses.hpp"
#include "alsq/oracle.hpp"
#include "alsq/rng.hpp"
#include "alsq/types.hpp"

namespace alsq {

struct SensitivityEstimates {
  Vector s;              // per-row upper bounds in (0, 1]; 0 off the support
  double total = 0.0;
  double tau = 0.0;      // floor parameter
  // (r, repetition) that set each row; (0, -1) means the 2*tau/n floor
  std::vector<std::pair<int, int>> level;
};

struct SensitivityConfig {
  double theta = 1.0 / 3.0;  // in-bucket Lewis weight threshold
  double c_rep = 2.0;        // repetitions = ceil(c_rep * log2 n); <= 0 -> single hash
  double lewis_tol = 1e-6;
  int lewis_max_iter = 100;
};

/// Hash-bucket sensitivity upper bounds for a monotone loss. For each scale
/// r the rows are hashed into 10*2^r buckets; a row whose in-bucket l_{p_M}
/// Lewis weight clears the threshold gets s_i raised to 2/2^r. Estimates start
/// at the floor 2*tau/n and only ever increase, so they stay upper bounds.
SensitivityEstimates m_sensitivities(const Matrix& A, const LossDescriptor& M, double tau,
                                     RngStream& rng, const SensitivityConfig& cfg = {});

/// Weighted extension via dyadic level sets of w (requires w >= 1 on its
/// support): run the unweighted algorithm per level set and double.
SensitivityEstimates weighted_m_sensitivities(const Matrix& A, const LossDescriptor& M,
                                              const WeightVector& w, double tau,
                                              RngStream& rng,
                                              const SensitivityConfig& cfg = {});

/// Keep entry i with probability p_i = min{1, m * s_i} and reweight by 1/p_i.
/// When an oracle is given, exactly the surviving indices are queried.
WeightVector sensitivity_sample(const WeightVector& w, const SensitivityEstimates& s,
                                double m, RngStream& rng, TargetOracle* b = nullptr);

}  // namespace alsq
