#include "alsq/kron.hpp"

#include <cmath>
#include <deque>

namespace alsq {

AliasTable alias_build(const Vector& probs) {
  const Index n = probs.size();
  require(n > 0, "alias_build: empty distribution");
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    require(probs[i] >= 0 && std::isfinite(probs[i]), "alias_build: probabilities must be >= 0");
    total += probs[i];
  }
  require(total > 0, "alias_build: all-zero distribution");

  AliasTable t;
  t.n = n;
  t.prob.assign(static_cast<size_t>(n), 0.0);
  t.alias.assign(static_cast<size_t>(n), -1);

  std::vector<double> scaled(static_cast<size_t>(n));
  std::deque<Index> small, large;
  for (Index i = 0; i < n; ++i) {
    scaled[static_cast<size_t>(i)] = probs[i] / total * static_cast<double>(n);
    (scaled[static_cast<size_t>(i)] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    Index s = small.front(), l = large.front();
    small.pop_front();
    large.pop_front();
    t.prob[static_cast<size_t>(s)] = scaled[static_cast<size_t>(s)];
    t.alias[static_cast<size_t>(s)] = l;
    scaled[static_cast<size_t>(l)] -= 1.0 - scaled[static_cast<size_t>(s)];
    (scaled[static_cast<size_t>(l)] < 1.0 ? small : large).push_back(l);
  }
  for (Index i : small) t.prob[static_cast<size_t>(i)] = 1.0;
  for (Index i : large) t.prob[static_cast<size_t>(i)] = 1.0;
  return t;
}

Index alias_draw(const AliasTable& table, RngStream& rng) {
  const Index slot = rng.uniform_index(table.n);
  const double u = rng.uniform();
  if (u < table.prob[static_cast<size_t>(slot)] || table.alias[static_cast<size_t>(slot)] < 0)
    return slot;
  return table.alias[static_cast<size_t>(slot)];
}

Index kron_flat_index(const std::vector<Index>& dims, const std::vector<Index>& idx) {
  require(dims.size() == idx.size(), "kron_flat_index: rank mismatch");
  Index flat = 0;
  for (size_t l = 0; l < dims.size(); ++l) {
    require(idx[l] >= 0 && idx[l] < dims[l], "kron_flat_index: index out of range");
    flat = flat * dims[l] + idx[l];
  }
  return flat;
}

std::vector<Index> kron_multi_index(const std::vector<Index>& dims, Index flat) {
  std::vector<Index> idx(dims.size());
  for (size_t l = dims.size(); l-- > 0;) {
    idx[l] = flat % dims[l];
    flat /= dims[l];
  }
  return idx;
}

Vector kron_row(const std::vector<Matrix>& factors, const std::vector<Index>& idx) {
  require(factors.size() == idx.size(), "kron_row: rank mismatch");
  Vector row = Vector::Constant(1, 1.0);
  for (size_t l = 0; l < factors.size(); ++l) {
    const auto r = factors[l].row(idx[l]);
    Vector next(row.size() * r.size());
    for (Index a = 0; a < row.size(); ++a)
      for (Index c = 0; c < r.size(); ++c) next[a * r.size() + c] = row[a] * r[c];
    row = std::move(next);
  }
  return row;
}

Matrix kron_materialize(const std::vector<Matrix>& factors) {
  require(!factors.empty(), "kron_materialize: no factors");
  Matrix out = factors[0];
  for (size_t l = 1; l < factors.size(); ++l) {
    const Matrix& B = factors[l];
    Matrix next(out.rows() * B.rows(), out.cols() * B.cols());
    for (Index i = 0; i < out.rows(); ++i)
      for (Index j = 0; j < out.cols(); ++j)
        next.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = out(i, j) * B;
    out = std::move(next);
  }
  return out;
}

std::vector<LewisWeights> kron_lewis_weights(const std::vector<Matrix>& factors, double p,
                                             double tol, int max_iter) {
  require(!factors.empty(), "kron_lewis_weights: no factors");
  std::vector<LewisWeights> out;
  out.reserve(factors.size());
  for (const Matrix& f : factors) {
    out.push_back(lewis_weights(f, p, tol, max_iter));
    if (!out.back().converged)
      throw Error("kron_lewis_weights: factor Lewis weights did not converge");
  }
  return out;
}

Index kron_sample_count(double p, Index d_total, double eps, double delta,
                        const KronConfig& cfg) {
  const double dd = static_cast<double>(d_total);
  auto lg = [](double x) { return std::max(1.0, std::log2(std::max(2.0, x))); };
  const double bracket = lg(dd) * lg(dd) * lg(dd / eps) + std::log2(1.0 / delta);
  const double m = cfg.C * std::pow(dd, std::max(1.0, p / 2)) /
                   std::pow(eps, std::max(2.0, p)) * bracket;
  return static_cast<Index>(std::ceil(std::max(m, static_cast<double>(d_total + 1))));
}

SolveResult kron_regress(const std::vector<Matrix>& factors, TargetOracle& b, double p,
                         double eps, double delta, RngStream& rng, const KronConfig& cfg) {
  require(!factors.empty(), "kron_regress: no factors");
  std::vector<Index> ns, ds;
  Index d_total = 1;
  for (const Matrix& f : factors) {
    ns.push_back(f.rows());
    ds.push_back(f.cols());
    d_total *= f.cols();
  }

  std::vector<LewisWeights> lw = kron_lewis_weights(factors, p, cfg.lewis_tol, cfg.lewis_max_iter);
  std::vector<AliasTable> tables;
  std::vector<double> sums;
  for (const auto& l : lw) {
    tables.push_back(alias_build(l.w));
    sums.push_back(l.w.sum());
  }

  const Index m = kron_sample_count(p, d_total, eps, delta, cfg);
  Matrix S(m, d_total);
  Vector bs(m);
  std::vector<Index> idx(factors.size());
  for (Index s = 0; s < m; ++s) {
    double pi = 1.0;
    for (size_t l = 0; l < factors.size(); ++l) {
      idx[l] = alias_draw(tables[l], rng);
      pi *= lw[l].w[idx[l]] / sums[l];
    }
    // weight 1/(m*pi) on the sampled term keeps the lp^p objective unbiased
    const double scale = std::pow(1.0 / (static_cast<double>(m) * pi), 1.0 / p);
    S.row(s) = scale * kron_row(factors, idx).transpose();
    bs[s] = scale * b(kron_flat_index(ns, idx));
  }
  return solve_weighted_lp(S, bs, p, cfg.solver);
}

}  // namespace alsq
