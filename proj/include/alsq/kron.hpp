#pragma once

#include "alsq/lewis.hpp"
#include "alsq/oracle.hpp"
#include "alsq/rng.hpp"
#include "alsq/solvers.hpp"
#include "alsq/types.hpp"

namespace alsq {

/// Walker alias table for O(1) draws from a finite distribution.
struct AliasTable {
  Index n = 0;
  std::vector<double> prob;   // acceptance threshold per slot
  std::vector<Index> alias;   // fallback index per slot
};

AliasTable alias_build(const Vector& probs);
Index alias_draw(const AliasTable& table, RngStream& rng);

/// Multi-index <-> flat index, row-major over the factors in order.
Index kron_flat_index(const std::vector<Index>& dims, const std::vector<Index>& idx);
std::vector<Index> kron_multi_index(const std::vector<Index>& dims, Index flat);

/// The row of A_1 x ... x A_q addressed by a multi-index, assembled directly.
Vector kron_row(const std::vector<Matrix>& factors, const std::vector<Index>& idx);

/// Test helper: the fully materialized Kronecker product.
Matrix kron_materialize(const std::vector<Matrix>& factors);

/// Factor-wise Lewis weights; entrywise products give the Kronecker weights.
std::vector<LewisWeights> kron_lewis_weights(const std::vector<Matrix>& factors, double p,
                                             double tol = 1e-10, int max_iter = 200);

struct KronConfig {
  double C = 0.10;  // sample-count constant, acceptance-calibrated
  double lewis_tol = 1e-10;
  int lewis_max_iter = 200;
  SolverOptions solver{};
};

Index kron_sample_count(double p, Index d_total, double eps, double delta,
                        const KronConfig& cfg = {});

/// Sublinear Kronecker lp regression: with-replacement multi-index sampling
/// from the product Lewis distribution via per-factor alias tables; the
/// Kronecker matrix is never materialized and b is read only at drawn indices.
SolveResult kron_regress(const std::vector<Matrix>& factors, TargetOracle& b, double p,
                         double eps, double delta, RngStream& rng,
                         const KronConfig& cfg = {});

}  // namespace alsq
