#include "alsq/m_active.hpp"

#include <cmath>

namespace alsq {

namespace {

double lg2(double x) { return std::max(1.0, std::log2(std::max(2.0, x))); }

void check_loss(const LossDescriptor& M) {
  require(M.monotone, "m_active: loss must be monotone");
  require(M.root_subadditive, "m_active: loss must have a subadditive p_M-th root");
  // Tukey-style flat-tailed losses are admitted through their own triangle
  // inequalities despite missing a polynomial lower bound
  const bool tukey_like = M.name.rfind("tukey", 0) == 0;
  require(M.q_M.has_value() || tukey_like,
          "m_active: loss must be polynomially bounded below");
}

double stage1_tau(const MActiveConfig& cfg, Index n, Index d) {
  double t = cfg.tau1 > 0 ? cfg.tau1
                          : std::min(std::pow(static_cast<double>(d), 3.0),
                                     static_cast<double>(n) / 2.0);
  return std::min(std::max(1.0, t), static_cast<double>(n));
}

// query b on the support of w and solve the weighted problem
SolveResult solve_on_support(const Matrix& A, TargetOracle& b, const WeightVector& w,
                             const LossDescriptor& M, const SolverOptions& opt,
                             const Vector* offset = nullptr) {
  Vector bv = Vector::Zero(A.rows());
  for (const auto& [i, wi] : w.entries()) {
    bv[i] = b(i);
    if (offset) bv[i] -= (*offset)[i];
  }
  return solve_weighted_mloss(A, bv, w, M, opt);
}

// the two sampling stages shared by the constant-factor and relative paths;
// only the second stage touches b (via the caller)
WeightVector two_stage_weights(const Matrix& A, const LossDescriptor& M, double m1, double m2,
                               RngStream& rng, const MActiveConfig& cfg) {
  const Index n = A.rows(), d = A.cols();
  RngStream r1 = rng.substream(1), r2 = rng.substream(2), r3 = rng.substream(3),
            r4 = rng.substream(4);
  SensitivityEstimates s1 = m_sensitivities(A, M, stage1_tau(cfg, n, d), r1, cfg.sens);
  WeightVector w = sensitivity_sample(WeightVector::ones(n), s1, m1, r2);
  if (w.nnz() == 0) return w;
  const double tau2 = std::min(static_cast<double>(w.nnz()), static_cast<double>(d));
  SensitivityEstimates s2 =
      weighted_m_sensitivities(A, M, w, std::max(1.0, tau2), r3, cfg.sens);
  return sensitivity_sample(w, s2, m2, r4);
}

}  // namespace

SolveResult m_constant_factor_active(const Matrix& A, TargetOracle& b,
                                     const LossDescriptor& M, RngStream& rng,
                                     const MActiveConfig& cfg) {
  check_loss(M);
  RngStream srng = rng.substream(0xc0157a27);
  WeightVector w2 = two_stage_weights(A, M, cfg.m_stage1, cfg.m_stage2, srng, cfg);
  if (w2.nnz() == 0) {
    SolveResult res;
    res.x = Vector::Zero(A.cols());
    res.converged = false;
    return res;
  }
  return solve_on_support(A, b, w2, M, cfg.solver);
}

SolveResult m_relative_active(const Matrix& A, TargetOracle& b, const LossDescriptor& M,
                              double eps, double delta, RngStream& rng,
                              const MActiveConfig& cfg) {
  check_loss(M);
  require(eps > 0, "m_relative_active: eps must be > 0");
  require(delta > 0 && delta < 1, "m_relative_active: delta must be in (0,1)");

  RngStream crng = rng.substream(1);
  SolveResult xc = m_constant_factor_active(A, b, M, crng, cfg);
  if (eps >= 1.0) return xc;  // budget collapses to the constant-factor path

  const Index d = A.cols();
  const double m_rel = cfg.m_rel * static_cast<double>(d) / std::pow(eps, 2.0 + M.p_M) *
                       lg2(1.0 / eps) * lg2(1.0 / delta);

  RngStream rrng = rng.substream(2);
  WeightVector v2 = two_stage_weights(A, M, std::max(cfg.m_stage1, m_rel), m_rel, rrng, cfg);
  if (v2.nnz() == 0) return xc;

  // residual target; already-read entries are re-read for free
  Vector Axc = A * xc.x;
  SolveResult bar = solve_on_support(A, b, v2, M, cfg.solver, &Axc);

  SolveResult res = bar;
  res.x = xc.x + bar.x;
  res.converged = xc.converged && bar.converged;
  res.local_only = xc.local_only || bar.local_only;
  return res;
}

SolveResult tukey_relative_active(const Matrix& A, TargetOracle& b, double tau, double p,
                                  double eps, RngStream& rng, const MActiveConfig& cfg) {
  LossDescriptor M = tukey_lp_loss(tau, p);
  MActiveConfig c = cfg;
  c.solver.starts = std::max(c.solver.starts, 5);
  return m_relative_active(A, b, M, eps, /*delta=*/0.1, rng, c);
}

}  // namespace alsq
