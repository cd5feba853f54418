#include "alsq/lp_active.hpp"

#include <algorithm>
#include <cmath>

namespace alsq {

namespace {

double lg2(double x) { return std::max(1.0, std::log2(std::max(2.0, x))); }

// solve the weighted subproblem on the given original rows, querying b there
SolveResult solve_on_rows(const Matrix& A, TargetOracle& b, double p,
                          const std::vector<Index>& rows, const Vector& weights,
                          const SolverOptions& opt) {
  const Index m = static_cast<Index>(rows.size());
  Matrix As(m, A.cols());
  Vector bs(m);
  WeightVector w(m);
  for (Index j = 0; j < m; ++j) {
    As.row(j) = A.row(rows[static_cast<size_t>(j)]);
    bs[j] = b(rows[static_cast<size_t>(j)]);
    w.set(j, weights[j]);
  }
  return solve_weighted_lp(As, bs, w, p, opt);
}

}  // namespace

ActiveBudget budget(double p, Index d, Index n, double eps, double delta,
                    const BudgetConstants& c) {
  require(p > 0, "budget: p must be > 0");
  require(eps > 0, "budget: eps must be > 0");
  require(delta > 0 && delta < 1, "budget: delta must be in (0,1)");

  ActiveBudget out;
  out.p = p;
  out.eps = eps;
  out.delta = delta;
  out.d = d;
  out.n = n;

  const double dd = static_cast<double>(d);
  const double bracket = lg2(dd) * lg2(dd) * lg2(dd / eps) + std::log2(1.0 / delta);
  const double ell_factor = std::max(1.0, std::log2(1.0 / delta));
  out.polylog = bracket * ell_factor;
  double m;
  if (p <= 1.0)
    m = c.C_low * dd / (eps * eps) * bracket * ell_factor;
  else if (p <= 2.0)
    m = c.C_mid * dd / eps * bracket * ell_factor;
  else
    m = c.C_high * std::pow(dd, p / 2) / std::pow(eps, p) * bracket * ell_factor;
  out.m = static_cast<Index>(std::ceil(std::max(m, static_cast<double>(d + 1))));

  out.ell = std::max<Index>(1, static_cast<Index>(std::ceil(c.c_delta * std::log2(1.0 / delta))));
  out.m_cf = static_cast<Index>(std::floor(c.cf_share * static_cast<double>(out.m)));
  out.m_trial = std::max<Index>(
      d + 1, static_cast<Index>(std::floor((1.0 - c.cf_share) * static_cast<double>(out.m) /
                                           static_cast<double>(out.ell))));

  if (p > 1.0 && p < 2.0) {
    const int len =
        std::max(1, static_cast<int>(std::ceil(std::log2(std::max(2.0, std::log2(1.0 / eps))))));
    double beta = 2.0;
    for (int i = 1; i <= len; ++i) {
      out.beta_ladder.push_back(beta);                        // beta_i = 2^i/(2^i - 1)
      out.gamma_ladder.push_back(std::pow(eps, 2.0 / (1.0 + beta)));
      beta = 2.0 * beta / (1.0 + beta);
    }
  }
  return out;
}

BoostResult boost_candidates(const std::vector<Vector>& candidates, const Matrix& A,
                             const LossDescriptor& norm_loss, double kappa) {
  require(!candidates.empty(), "boost_candidates: no candidates");
  require(kappa >= 1.0, "boost_candidates: kappa must be >= 1");
  const Index ell = static_cast<Index>(candidates.size());

  // all ell^2 ordered-pair distances, diagonal included
  Matrix dist(ell, ell);
  std::vector<double> all;
  all.reserve(static_cast<size_t>(ell * ell));
  for (Index i = 0; i < ell; ++i)
    for (Index j = 0; j < ell; ++j) {
      double dij = i == j ? 0.0
                          : mnorm(A * (candidates[static_cast<size_t>(i)] -
                                       candidates[static_cast<size_t>(j)]),
                                  norm_loss);
      dist(i, j) = dij;
      all.push_back(dij);
    }
  std::sort(all.begin(), all.end());
  const size_t idx = static_cast<size_t>(
      std::min<Index>(ell * ell - 1,
                      std::max<Index>(0, static_cast<Index>(std::floor(ell * ell * 8.0 / 10.0)) - 1)));
  BoostResult out;
  out.tau = all[idx];

  for (Index i = 0; i < ell; ++i) {
    Index close = 0;
    for (Index j = 0; j < ell; ++j)
      if (dist(i, j) <= out.tau) ++close;
    if (2 * close >= ell) {
      out.chosen = i;
      out.x = candidates[static_cast<size_t>(i)];
      return out;
    }
  }
  // unreachable when >= 9/10 of candidates are good; fall back anyway
  out.qualified = false;
  Index best = 0;
  double best_ecc = dist.row(0).maxCoeff();
  for (Index i = 1; i < ell; ++i) {
    double ecc = dist.row(i).maxCoeff();
    if (ecc < best_ecc) {
      best_ecc = ecc;
      best = i;
    }
  }
  out.chosen = best;
  out.x = candidates[static_cast<size_t>(best)];
  return out;
}

SolveResult constant_factor_lp(const Matrix& A, TargetOracle& b, double p, double delta,
                               RngStream& rng, const LpActiveConfig& cfg) {
  const Index ell =
      std::max<Index>(1, static_cast<Index>(std::ceil(cfg.budget.c_delta * std::log2(1.0 / delta))));
  // round-1 Lewis weights are shared by every trial's embedding
  LewisWeights lw0 = lewis_weights(A, p, cfg.lewis_tol, cfg.lewis_max_iter);

  std::vector<Vector> candidates;
  SolveResult last;
  for (Index t = 0; t < ell; ++t) {
    RngStream trng = rng.substream(0xcf00 + static_cast<std::uint64_t>(t));
    EmbeddingResult emb =
        lp_subspace_embedding_from(A, p, 0.5, delta, trng, cfg.embed, &lw0.w);
    std::vector<Index> rows;
    std::vector<double> weights;
    for (const auto& [i, wi] : emb.w.entries()) {
      rows.push_back(i);
      weights.push_back(wi);
    }
    Vector wv = Eigen::Map<Vector>(weights.data(), static_cast<Index>(weights.size()));
    last = solve_on_rows(A, b, p, rows, wv, cfg.solver);
    candidates.push_back(last.x);
  }
  const double kappa = p >= 1 ? 1.0 : std::pow(2.0, 1.0 / p - 1.0);
  BoostResult boosted = boost_candidates(candidates, A, lp_loss(p), kappa);
  SolveResult res = last;
  res.x = boosted.x;
  res.converged = res.converged && boosted.qualified;
  return res;
}

RecursiveLpResult recursive_relative_lp(const Matrix& A, TargetOracle& b, double p, Index m,
                                        RngStream& rng, const LpActiveConfig& cfg,
                                        const Vector* first_round_lewis) {
  require(m > A.cols(), "recursive_relative_lp: m must exceed d");
  const Index n = A.rows();

  Matrix cur = A;
  std::vector<Index> orig(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) orig[static_cast<size_t>(i)] = i;
  std::vector<double> pweight(static_cast<size_t>(n), 1.0);

  RecursiveLpResult out;
  const int cap = static_cast<int>(std::ceil(std::log2(std::max<double>(2, n)))) + 1;
  while (cur.rows() > m) {
    if (out.depth >= cap) {
      out.depth_ok = false;
      break;
    }
    Vector lw;
    if (out.depth == 0 && first_round_lewis) {
      lw = *first_round_lewis;
    } else {
      lw = lewis_weights(cur, p, cfg.lewis_tol, cfg.lewis_max_iter).w;
    }
    SplitRows sp = split_rows(cur, cfg.embed.ub_slack * lw, p, cfg.embed.C2);

    std::vector<Index> kept;
    Matrix next;
    RngStream srng = rng.substream(0x5a00 + static_cast<std::uint64_t>(out.depth));
    int redraws = 0;
    do {
      RngStream draw = srng.substream(static_cast<std::uint64_t>(redraws++));
      std::tie(next, kept) = split_and_sample(sp.A, p, draw);
    } while (kept.empty());

    std::vector<Index> orig_next(kept.size());
    std::vector<double> pw_next(kept.size());
    for (size_t j = 0; j < kept.size(); ++j) {
      const Index src = sp.parent[static_cast<size_t>(kept[j])];
      orig_next[j] = orig[static_cast<size_t>(src)];
      pw_next[j] =
          pweight[static_cast<size_t>(src)] * 2.0 / static_cast<double>(sp.copies[static_cast<size_t>(src)]);
    }
    cur = std::move(next);
    orig = std::move(orig_next);
    pweight = std::move(pw_next);
    ++out.depth;
  }

  out.sample_rows = orig;
  out.sample_weights =
      Eigen::Map<Vector>(pweight.data(), static_cast<Index>(pweight.size()));
  out.sol = solve_on_rows(A, b, p, out.sample_rows, out.sample_weights, cfg.solver);
  return out;
}

SolveResult high_prob_relative_lp(const Matrix& A, TargetOracle& b, double p, double eps,
                                  double delta, RngStream& rng, const LpActiveConfig& cfg) {
  const Index d = A.cols();
  ActiveBudget bud = budget(p, d, A.rows(), eps, delta, cfg.budget);

  // shared round-1 Lewis weights across trials
  LewisWeights lw0 = lewis_weights(A, p, cfg.lewis_tol, cfg.lewis_max_iter);

  std::vector<RecursiveLpResult> trials;
  trials.reserve(static_cast<size_t>(bud.ell));
  for (Index t = 0; t < bud.ell; ++t) {
    RngStream trng = rng.substream(0x7e00 + static_cast<std::uint64_t>(t));
    trials.push_back(recursive_relative_lp(A, b, p, bud.m_trial, trng, cfg, &lw0.w));
  }

  // constant-factor pilot, with its embedding sized to fit the reserve
  LpActiveConfig cf_cfg = cfg;
  {
    const Index ell_cf = std::max<Index>(
        1, static_cast<Index>(std::ceil(cfg.budget.c_delta * std::log2(1.0 / delta))));
    const Index cap_per_trial = std::max<Index>(d + 1, bud.m_cf / ell_cf);
    Index r_half = embedding_target_rows(A.rows(), d, p, 0.5, delta, cfg.embed);
    if (r_half > cap_per_trial)
      cf_cfg.embed.C_se *= static_cast<double>(cap_per_trial) / static_cast<double>(r_half);
  }
  RngStream crng = rng.substream(0xcf);
  SolveResult pilot = constant_factor_lp(A, b, p, delta, crng, cf_cfg);

  // rank trials by the residual against the pilot on their own samples;
  // those b entries were already read at the base case
  std::vector<std::pair<double, Index>> ranked;
  for (Index t = 0; t < bud.ell; ++t) {
    const auto& tr = trials[static_cast<size_t>(t)];
    double score = 0.0;
    for (size_t j = 0; j < tr.sample_rows.size(); ++j) {
      const Index i = tr.sample_rows[j];
      score += tr.sample_weights[static_cast<Index>(j)] *
               std::pow(std::abs(b(i) - A.row(i).dot(pilot.x)), p);
    }
    ranked.push_back({score, t});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& c) { return a.first < c.first; });
  const Index keep = std::max<Index>(1, bud.ell - bud.ell / 10);

  std::vector<Vector> candidates;
  for (Index k = 0; k < keep; ++k)
    candidates.push_back(trials[static_cast<size_t>(ranked[static_cast<size_t>(k)].second)].sol.x);

  const double kappa = p >= 1 ? 1.0 : std::pow(2.0, 1.0 / p - 1.0);
  BoostResult boosted = boost_candidates(candidates, A, lp_loss(p), kappa);

  SolveResult res = trials[static_cast<size_t>(ranked[0].second)].sol;
  res.x = boosted.x;
  for (const auto& tr : trials) res.converged = res.converged && tr.depth_ok;
  return res;
}

SolveResult no_assumptions_lp(const Matrix& A, TargetOracle& b, double p, double eps,
                              double delta, RngStream& rng, const NoAssumptionsConfig& cfg) {
  const Index n = A.rows(), d = A.cols();
  LewisWeights lw = lewis_weights(A, p, cfg.inner.lewis_tol, cfg.inner.lewis_max_iter);

  // stage 1: one-shot Lewis sampling to poly(d/eps) rows, querying b there
  const double m1 = cfg.C_stage1 * static_cast<double>(d) * lg2(1.0 / (eps * delta)) /
                    std::pow(eps, 2.0 + p);
  SamplingPlan plan = lewis_sampling_plan(cfg.inner.embed.ub_slack * lw.w, p, m1, d);
  RngStream prng = rng.substream(0x9a9e1);
  PlanApplication app = apply_plan(A, &b, plan, prng);

  const Index nr = static_cast<Index>(app.rows.size());
  if (nr <= d) {
    // degenerate draw; solve on what we have
    Matrix As(nr, d);
    for (Index j = 0; j < nr; ++j) As.row(j) = app.scale[j] * A.row(app.rows[static_cast<size_t>(j)]);
    return solve_weighted_lp(As, app.b, p, cfg.inner.solver);
  }

  Matrix Ar(nr, d);
  for (Index j = 0; j < nr; ++j) Ar.row(j) = app.scale[j] * A.row(app.rows[static_cast<size_t>(j)]);
  // the reduced oracle serves values already charged to the outer counter
  TargetOracle br(app.b);

  RngStream srng = rng.substream(0x57a9e2);
  return high_prob_relative_lp(Ar, br, p, eps, delta, srng, cfg.inner);
}

}  // namespace alsq
