#include "alsq/huber.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "alsq/lewis.hpp"

namespace alsq {

namespace {

double lg2(double x) { return std::max(1.0, std::log2(std::max(2.0, x))); }

Vector grid_lewis(const Matrix& sub, double p, const HuberConfig& cfg) {
  if (p == 2.0) return leverage_scores(sub);
  return lewis_weights(sub, p, cfg.lewis_tol, cfg.lewis_max_iter).w;
}

SolveResult solve_weighted_huber_residual(const Matrix& A, TargetOracle& b,
                                          const WeightVector& w, const Vector& x_acc,
                                          const HuberConfig& cfg) {
  Vector z = Vector::Zero(A.rows());
  for (const auto& [i, wi] : w.entries()) z[i] = b(i) - A.row(i).dot(x_acc);
  return solve_weighted_mloss(A, z, w, huber_loss(cfg.tau), cfg.solver);
}

}  // namespace

double huber_step_beta() { return 3.0 - 2.0 * std::sqrt(2.0); }

double huber_norm2(const Vector& y, double tau) { return msum(y, huber_loss(tau)); }

double huber_norm2(const Vector& y, const WeightVector& w, double tau) {
  return msum(y, huber_loss(tau), w);
}

std::vector<double> huber_p_grid(Index n, double q_lo, int cap, double c_grid) {
  require(q_lo > 0 && q_lo < 2, "huber_p_grid: q_lo must be in (0,2)");
  const double span = 2.0 - q_lo;
  double step = std::max(c_grid / lg2(static_cast<double>(n)),
                         span / static_cast<double>(std::max(2, cap) - 1));
  std::vector<double> grid;
  for (double p = q_lo; p < 2.0 - 1e-12; p += step) grid.push_back(p);
  grid.push_back(2.0);
  return grid;
}

HuberBranchResult huber_inequality_check(const Vector& y, double gamma, double q,
                                         double c_test) {
  require(gamma > 0 && gamma <= 1, "huber_inequality_check: gamma must be in (0,1]");
  require(q > 0 && q <= 2, "huber_inequality_check: q must be in (0,2]");
  const Index n = y.size();
  const LossDescriptor L = q == 1.0 ? huber_loss(1.0) : l2lq_loss(q);

  const double mass = msum(y, L);
  HuberBranchResult out;
  if (mass == 0.0) {
    out.holds = true;
    out.branch = 2;
    return out;
  }

  // whole-vector branch: mass >= c * gamma^{2/q-1} * min_{p in {q,2}} ||y||_p^p
  double lq = 0, l2 = 0;
  for (Index i = 0; i < n; ++i) {
    lq += std::pow(std::abs(y[i]), q);
    l2 += y[i] * y[i];
  }
  out.full_lhs = mass;
  out.full_rhs = c_test * std::pow(gamma, 2.0 / q - 1.0) * std::min(lq, l2);

  // restricted branch over T = {i : L(y_i) <= gamma * mass}
  std::vector<Index> T;
  for (Index i = 0; i < n; ++i)
    if (L.eval(std::abs(y[i])) <= gamma * mass) T.push_back(i);
  double mass_T = 0;
  for (Index i : T) mass_T += L.eval(std::abs(y[i]));
  const double a = 2.0 / q;
  const double beta = ((a + 1.0) - 2.0 * std::sqrt(a)) / (a - 1.0);
  double min_lp = std::numeric_limits<double>::infinity();
  for (double p : huber_p_grid(n, std::max(q, 1e-3))) {
    double s = 0;
    for (Index i : T) s += std::pow(std::abs(y[i]), p);
    min_lp = std::min(min_lp, s);
  }
  out.restricted_lhs = mass_T;
  out.restricted_rhs =
      c_test * std::pow(std::max(1.0, gamma * static_cast<double>(n)), -beta) * min_lp;

  if (out.restricted_lhs >= out.restricted_rhs) {
    out.holds = true;
    out.branch = 1;
  }
  if (out.full_lhs >= out.full_rhs) {
    out.holds = true;
    if (out.branch == 0) out.branch = 2;
  }
  return out;
}

Index huber_embedding_target(Index n, Index d, double eps, double delta,
                             const HuberConfig& cfg) {
  const double beta = huber_step_beta();
  const double t = cfg.C_h * std::pow(static_cast<double>(d), 1.0 + beta) *
                   std::pow(lg2(static_cast<double>(n) / delta), cfg.kappa_log) /
                   std::pow(eps, cfg.kappa_eps);
  return static_cast<Index>(std::ceil(std::max(t, static_cast<double>(2 * d))));
}

WeightVector huber_embed_step(const Matrix& A, const WeightVector& w, double eps, double delta,
                              RngStream& rng, const HuberConfig& cfg, double m_mult) {
  const Index d = A.cols();
  const Index n_cur = w.nnz();
  require(w.n() == A.rows(), "huber_embed_step: size mismatch");
  for (const auto& [i, wi] : w.entries())
    require(wi >= 1.0, "huber_embed_step: weights must be >= 1 on the support");
  if (n_cur <= std::max<Index>(16, 2 * d)) return w;  // identity pass-through

  const double beta = huber_step_beta();
  const double gamma =
      std::pow(static_cast<double>(n_cur), -beta / (1.0 + beta));
  const double W_inf = std::max(1.0, w.max_weight());
  const double m = m_mult * cfg.m_const * static_cast<double>(d) *
                   std::pow(lg2(static_cast<double>(n_cur) * W_inf / delta), cfg.k_log) /
                   std::pow(eps, cfg.e_eps);
  const std::vector<double> grid =
      huber_p_grid(n_cur, 1.0, cfg.grid_cap, cfg.c_grid);

  // dyadic weight buckets T_j = {i : w_i in [2^{j-1}, 2^j)}
  std::map<int, std::vector<Index>> buckets;
  for (const auto& [i, wi] : w.entries()) {
    int j = static_cast<int>(std::floor(std::log2(wi))) + 1;
    if (wi < std::pow(2.0, j - 1)) --j;
    buckets[j].push_back(i);
  }

  WeightVector out(w.n());
  int bucket_id = 0;
  for (const auto& [j, rows] : buckets) {
    RngStream brng = rng.substream(static_cast<std::uint64_t>(0xb0c0 + bucket_id++));
    const Index nj = static_cast<Index>(rows.size());
    if (nj <= std::max<Index>(8, 2 * d)) {
      for (Index i : rows) out.set(i, w(i));
      continue;
    }
    Matrix sub(nj, d);
    for (Index k = 0; k < nj; ++k) sub.row(k) = A.row(rows[static_cast<size_t>(k)]);

    // rows with Huber sensitivity above gamma are kept at full weight
    const double tau_s =
        std::min(std::max(1.0, gamma * static_cast<double>(n_cur)), static_cast<double>(nj));
    RngStream sens_rng = brng.substream(1);
    SensitivityEstimates sens =
        m_sensitivities(sub, huber_loss(cfg.tau), tau_s, sens_rng, cfg.sens);

    std::vector<Index> small_local;  // indices into sub
    for (Index k = 0; k < nj; ++k) {
      if (sens.s[k] <= gamma)
        small_local.push_back(k);
      else
        out.set(rows[static_cast<size_t>(k)], w(rows[static_cast<size_t>(k)]));
    }
    if (small_local.empty()) continue;

    Matrix subS(static_cast<Index>(small_local.size()), d);
    for (size_t k = 0; k < small_local.size(); ++k)
      subS.row(static_cast<Index>(k)) = sub.row(small_local[k]);

    // per-grid-p Lewis weights of the bucket and of its small-sensitivity part
    Vector score_full = Vector::Zero(nj);
    Vector score_small = Vector::Zero(static_cast<Index>(small_local.size()));
    for (double p : grid) {
      score_full += grid_lewis(sub, p, cfg) / static_cast<double>(d);
      score_small += grid_lewis(subS, p, cfg) / static_cast<double>(d);
    }

    RngStream coin = brng.substream(2);
    for (size_t k = 0; k < small_local.size(); ++k) {
      const Index local = small_local[k];
      const Index amb = rows[static_cast<size_t>(local)];
      const double score = 1.0 / static_cast<double>(n_cur) + score_full[local] +
                           score_small[static_cast<Index>(k)];
      const double pi = std::min(1.0, m / gamma * score);
      if (pi >= 1.0 || coin.bernoulli(pi)) out.set(amb, w(amb) / pi);
    }
  }
  return out;
}

HuberEmbedResult huber_subspace_embedding(const Matrix& A, double eps, double delta,
                                          RngStream& rng, const HuberConfig& cfg,
                                          const WeightVector* w0) {
  const Index n = A.rows();
  HuberEmbedResult out;
  out.w = w0 ? *w0 : WeightVector::ones(n);
  out.nnz_sequence.push_back(out.w.nnz());

  const Index target = huber_embedding_target(n, A.cols(), eps, delta, cfg);
  const int cap =
      static_cast<int>(std::ceil(std::log2(std::max(2.0, std::log2(std::max<double>(2, n)))))) + 3;
  while (out.w.nnz() > target && out.steps < cap) {
    RngStream srng = rng.substream(0xe3bed + static_cast<std::uint64_t>(out.steps));
    WeightVector next = huber_embed_step(A, out.w, eps, delta, srng, cfg);
    if (next.nnz() >= out.w.nnz()) {  // step no longer shrinks; stop early
      out.w = next;
      ++out.steps;
      out.nnz_sequence.push_back(out.w.nnz());
      break;
    }
    out.w = next;
    ++out.steps;
    out.nnz_sequence.push_back(out.w.nnz());
  }
  out.reached_target = out.w.nnz() <= target;
  return out;
}

HuberActiveResult huber_active(const Matrix& A, TargetOracle& b, double eps, RngStream& rng,
                               const HuberConfig& cfg) {
  const Index n = A.rows(), d = A.cols();
  const Index base_target = static_cast<Index>(
      cfg.base_mult * static_cast<double>(huber_embedding_target(n, d, eps, cfg.delta, cfg)));
  const int cap =
      static_cast<int>(std::ceil(std::log2(std::max(2.0, std::log2(std::max<double>(2, n)))))) + 3;

  HuberActiveResult out;
  Vector x_acc = Vector::Zero(d);
  WeightVector w = WeightVector::ones(n);
  bool converged = true, local_only = false;

  while (true) {
    if (w.nnz() <= base_target || out.levels >= cap) {
      SolveResult base = solve_weighted_huber_residual(A, b, w, x_acc, cfg);
      x_acc += base.x;
      converged = converged && base.converged;
      local_only = local_only || base.local_only;
      out.sol = base;
      break;
    }
    RngStream lvl = rng.substream(0xac71e + static_cast<std::uint64_t>(out.levels));

    RngStream erng = lvl.substream(1);
    HuberEmbedResult emb = huber_subspace_embedding(A, eps, cfg.delta, erng, cfg, &w);
    SolveResult xc = solve_weighted_huber_residual(A, b, emb.w, x_acc, cfg);
    x_acc += xc.x;
    converged = converged && xc.converged;
    local_only = local_only || xc.local_only;

    RngStream srng = lvl.substream(2);
    w = huber_embed_step(A, w, eps, cfg.delta, srng, cfg, cfg.active_m_multiplier);
    ++out.levels;
  }

  out.sol.x = x_acc;
  out.sol.converged = converged;
  out.sol.local_only = local_only;
  Vector r = Vector::Zero(n);  // objective over the final sample
  for (const auto& [i, wi] : w.entries()) r[i] = b(i) - A.row(i).dot(x_acc);
  out.sol.objective = huber_norm2(r, w, cfg.tau);
  return out;
}

}  // namespace alsq
