#include "alsq/lewis.hpp"

#include <cmath>

namespace alsq {

namespace {

constexpr double kRankTol = 1e-10;

double lg2(double x) { return std::max(1.0, std::log2(std::max(2.0, x))); }

}  // namespace

Vector leverage_scores(const Matrix& A) {
  const Index n = A.rows();
  check_finite(A, "leverage_scores");
  Eigen::ColPivHouseholderQR<Matrix> qr(A);
  qr.setThreshold(kRankTol);
  const Index r = qr.rank();
  Vector tau = Vector::Zero(n);
  if (r == 0) return tau;
  Matrix Q = qr.householderQ() * Matrix::Identity(n, r);
  for (Index i = 0; i < n; ++i) tau[i] = std::min(1.0, Q.row(i).squaredNorm());
  return tau;
}

Index numeric_rank(const Matrix& A) {
  Eigen::ColPivHouseholderQR<Matrix> qr(A);
  qr.setThreshold(kRankTol);
  return qr.rank();
}

LewisWeights lewis_weights(const Matrix& A, double p, double tol, int max_iter) {
  require(p > 0, "lewis_weights: p must be > 0");
  require(tol > 0, "lewis_weights: tol must be > 0");
  const Index n = A.rows(), d = A.cols();

  std::vector<Index> nz;
  nz.reserve(n);
  for (Index i = 0; i < n; ++i)
    if (A.row(i).squaredNorm() > 0) nz.push_back(i);

  LewisWeights out;
  out.p = p;
  out.w = Vector::Zero(n);
  if (nz.empty()) {
    out.converged = true;
    return out;
  }

  const Index m = static_cast<Index>(nz.size());
  Matrix An(m, d);
  for (Index j = 0; j < m; ++j) An.row(j) = A.row(nz[static_cast<size_t>(j)]);

  Vector w = Vector::Constant(m, std::min(1.0, static_cast<double>(d) / static_cast<double>(n)));
  const double row_expo = 0.5 - 1.0 / p;      // B = W^{1/2 - 1/p} A
  const double step_expo = p < 4 ? p / 2 : 1; // damped to lev(B) itself for p >= 4

  Matrix B(m, d);
  for (int iter = 0;; ++iter) {
    if (p == 2.0) {
      B = An;
    } else {
      for (Index j = 0; j < m; ++j) B.row(j) = std::pow(w[j], row_expo) * An.row(j);
    }
    Vector lev = leverage_scores(B);
    double resid = 0.0;
    Vector w_next(m);
    for (Index j = 0; j < m; ++j) {
      double ratio = std::max(lev[j], 1e-300) / w[j];
      double cand = w[j] * std::pow(ratio, p / 2);  // full fixed-point step
      resid = std::max(resid, std::abs(w[j] - cand) / w[j]);
      w_next[j] = w[j] * std::pow(ratio, step_expo);
    }
    out.iterations = iter;
    out.residual = resid;
    if (resid <= tol) {
      out.converged = true;
      break;
    }
    if (iter >= max_iter) break;
    w = w_next;
  }

  for (Index j = 0; j < m; ++j) out.w[nz[static_cast<size_t>(j)]] = std::min(1.0, w[j]);
  out.sum_w = out.w.sum();
  return out;
}

SplitRows split_rows(const Matrix& A, const Vector& w_ub, double p, double C2) {
  const Index n = A.rows(), d = A.cols();
  require(w_ub.size() == n, "split_rows: weight length mismatch");
  require(C2 > 0, "split_rows: C2 must be > 0");
  for (Index i = 0; i < n; ++i)
    require(w_ub[i] >= 0, "split_rows: weights must be nonnegative");

  const double threshold = C2 * static_cast<double>(d) / static_cast<double>(n);
  std::vector<Index> copies(static_cast<size_t>(n), 1);
  Index n_out = 0;
  for (Index i = 0; i < n; ++i) {
    if (w_ub[i] > threshold)
      copies[static_cast<size_t>(i)] = static_cast<Index>(std::ceil(w_ub[i] / threshold));
    n_out += copies[static_cast<size_t>(i)];
  }

  SplitRows out;
  out.A.resize(n_out, d);
  out.parent.reserve(static_cast<size_t>(n_out));
  out.copies = copies;
  Index r = 0;
  for (Index i = 0; i < n; ++i) {
    const Index k = copies[static_cast<size_t>(i)];
    const double scale = std::pow(static_cast<double>(k), -1.0 / p);
    for (Index c = 0; c < k; ++c, ++r) {
      out.A.row(r) = scale * A.row(i);
      out.parent.push_back(i);
    }
  }
  return out;
}

std::pair<Matrix, std::vector<Index>> split_and_sample(const Matrix& Ap, double p,
                                                       RngStream& rng) {
  const Index n = Ap.rows();
  std::vector<Index> kept;
  kept.reserve(static_cast<size_t>(n) / 2 + 8);
  for (Index i = 0; i < n; ++i)
    if (rng.bernoulli(0.5)) kept.push_back(i);
  const double scale = std::pow(2.0, 1.0 / p);
  Matrix S(static_cast<Index>(kept.size()), Ap.cols());
  for (size_t j = 0; j < kept.size(); ++j) S.row(static_cast<Index>(j)) = scale * Ap.row(kept[j]);
  return {std::move(S), std::move(kept)};
}

SamplingPlan lewis_sampling_plan(const Vector& w_ub, double p, double m, Index d) {
  require(m > 0, "lewis_sampling_plan: m must be > 0");
  SamplingPlan plan;
  plan.p = p;
  const double boost = std::pow(static_cast<double>(d), std::max(0.0, p / 2 - 1));
  plan.prob = (m * boost * w_ub.array()).min(1.0).max(0.0).matrix();
  return plan;
}

PlanApplication apply_plan(const Matrix& A, TargetOracle* b, const SamplingPlan& plan,
                           RngStream& rng) {
  const Index n = A.rows();
  require(plan.prob.size() == n, "apply_plan: plan length mismatch");
  PlanApplication out;
  std::vector<double> scales, bvals;
  for (Index i = 0; i < n; ++i) {
    const double pi = plan.prob[i];
    if (pi <= 0) continue;
    if (pi >= 1.0 || rng.bernoulli(pi)) {
      const double s = std::pow(std::min(pi, 1.0), -1.0 / plan.p);
      out.rows.push_back(i);
      scales.push_back(s);
      if (b) bvals.push_back(s * (*b)(i));
    }
  }
  out.scale = Eigen::Map<Vector>(scales.data(), static_cast<Index>(scales.size()));
  if (b) out.b = Eigen::Map<Vector>(bvals.data(), static_cast<Index>(bvals.size()));
  return out;
}

Index embedding_target_rows(Index n, Index d, double p, double eps, double delta,
                            const EmbeddingConfig& cfg) {
  require(eps > 0 && eps <= 0.5, "embedding: eps must be in (0, 1/2]");
  require(delta > 0 && delta < 1, "embedding: delta must be in (0, 1)");
  const double dd = static_cast<double>(d);
  const double bracket = lg2(dd) * lg2(dd) * lg2(static_cast<double>(n)) + std::log2(1.0 / delta);
  const double r = cfg.C_se * std::pow(dd, std::max(1.0, p / 2)) / (eps * eps) * bracket;
  return static_cast<Index>(std::ceil(std::max(r, static_cast<double>(d))));
}

EmbeddingResult lp_subspace_embedding(const Matrix& A, double p, double eps, double delta,
                                      RngStream& rng, const EmbeddingConfig& cfg) {
  return lp_subspace_embedding_from(A, p, eps, delta, rng, cfg, nullptr);
}

EmbeddingResult lp_subspace_embedding_from(const Matrix& A, double p, double eps, double delta,
                                           RngStream& rng, const EmbeddingConfig& cfg,
                                           const Vector* first_round_lewis) {
  const Index n = A.rows();
  const Index target = embedding_target_rows(n, A.cols(), p, eps, delta, cfg);

  EmbeddingResult out;
  out.w = WeightVector(n);
  if (n <= target) {
    out.w = WeightVector::ones(n);
    return out;
  }

  Matrix cur = A;
  std::vector<Index> orig(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) orig[static_cast<size_t>(i)] = i;
  std::vector<double> pweight(static_cast<size_t>(n), 1.0);  // |row| = (pweight)^{1/p} |a_orig|

  const int cap = static_cast<int>(std::ceil(std::log2(std::max<double>(2, n)))) + cfg.extra_rounds;
  while (cur.rows() > target) {
    if (out.rounds >= cap) {
      out.ok = false;
      break;
    }
    ++out.rounds;
    Vector lwv;
    if (out.rounds == 1 && first_round_lewis) {
      lwv = *first_round_lewis;
    } else {
      lwv = lewis_weights(cur, p, cfg.lewis_tol, cfg.lewis_max_iter).w;
    }
    Vector ub = cfg.ub_slack * lwv;
    SplitRows sp = split_rows(cur, ub, p, cfg.C2);

    std::vector<Index> kept;
    Matrix next;
    do {
      std::tie(next, kept) = split_and_sample(sp.A, p, rng);
    } while (kept.empty());

    std::vector<Index> orig_next(kept.size());
    std::vector<double> pw_next(kept.size());
    for (size_t j = 0; j < kept.size(); ++j) {
      const Index src = sp.parent[static_cast<size_t>(kept[j])];
      orig_next[j] = orig[static_cast<size_t>(src)];
      pw_next[j] = pweight[static_cast<size_t>(src)] * 2.0 /
                   static_cast<double>(sp.copies[static_cast<size_t>(src)]);
    }
    cur = std::move(next);
    orig = std::move(orig_next);
    pweight = std::move(pw_next);
  }

  for (size_t j = 0; j < orig.size(); ++j) {
    const Index i = orig[j];
    out.w.set(i, out.w(i) + pweight[j]);
  }
  return out;
}

double weighted_lp_cost(const Matrix& A, const Vector& x, const WeightVector& w, double p) {
  double s = 0.0;
  for (const auto& [i, wi] : w.entries()) s += wi * std::pow(std::abs(A.row(i).dot(x)), p);
  return s;
}

}  // namespace alsq
